//! Numbered walking guides from terse scripts.
//!
//! The template engine is the reference backend. The language-model backend
//! sends the terse block to an external completion endpoint and accepts the
//! answer only if it passes [`postprocess`]; otherwise the template output
//! is used.

mod lm;
mod postprocess;
mod prompt;
mod template;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use lm::{
    invoke_lm, invoke_with, CompletionBackend, CompletionRequest, LmConfig, LmEndpoint, LmError,
    COMPLETION_SCHEMA,
};
pub use postprocess::{postprocess, RepairIssue, RepairReport};
pub use prompt::{build_prompt, SystemPrompt, DEFAULT_SYSTEM_PROMPT, TERSE_HEADER};
pub use template::render_template;

use crate::compressor::{terse_text, TerseScript};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuideSource {
    Template,
    LanguageModel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuideLine {
    pub index: usize,
    pub text: String,
}

impl fmt::Display for GuideLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}. {}", self.index, self.text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionScript {
    pub lines: Vec<GuideLine>,
    pub source: GuideSource,
}

impl InstructionScript {
    /// `"1. Start by walking ..."` lines.
    pub fn render(&self) -> Vec<String> {
        self.lines.iter().map(|l| l.to_string()).collect()
    }

    pub fn text(&self) -> String {
        self.render().join("\n")
    }

    /// Checks numbering (1..n, consecutive), line shape and line count.
    pub fn check_format(&self, commands: usize) -> Result<(), String> {
        if self.lines.len() != commands {
            return Err(format!(
                "{} lines for {} commands",
                self.lines.len(),
                commands
            ));
        }
        for (pos, line) in self.lines.iter().enumerate() {
            if line.index != pos + 1 {
                return Err(format!("line {} numbered {}", pos + 1, line.index));
            }
            let rendered = line.to_string();
            let prefix = format!("{}. ", line.index);
            let rest = rendered.strip_prefix(&prefix).unwrap_or_default();
            if rest.trim().is_empty()
                || rest.contains('\n')
                || rest.starts_with(char::is_whitespace)
            {
                return Err(format!("line {} is not '<n>. <text>'", pos + 1));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NarrateError {
    #[error("terse script is empty")]
    EmptyScript,
    #[error("system prompt is empty")]
    EmptyPrompt,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NarrateMode {
    Template,
    LanguageModel {
        config: LmConfig,
        system: SystemPrompt,
    },
}

/// Why the language-model answer was not used.
#[derive(Clone, Debug, PartialEq)]
pub enum FallbackReason {
    Transport(LmError),
    Rejected(RepairReport),
}

impl fmt::Display for FallbackReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FallbackReason::Transport(e) => write!(f, "{e}"),
            FallbackReason::Rejected(r) => write!(f, "completion rejected: {r}"),
        }
    }
}

pub fn narrate(
    script: &TerseScript,
    mode: &NarrateMode,
) -> Result<InstructionScript, NarrateError> {
    narrate_traced(script, mode).map(|(g, _)| g)
}

/// Like [`narrate`], also reporting why the model output was discarded.
pub fn narrate_traced(
    script: &TerseScript,
    mode: &NarrateMode,
) -> Result<(InstructionScript, Option<FallbackReason>), NarrateError> {
    match mode {
        NarrateMode::Template => Ok((render_template(script)?, None)),
        NarrateMode::LanguageModel { config, system } => {
            narrate_with(script, &config.endpoint, config, system)
        }
    }
}

/// Language-model narration through an arbitrary backend, with template
/// fallback.
pub fn narrate_with(
    script: &TerseScript,
    backend: &dyn CompletionBackend,
    config: &LmConfig,
    system: &SystemPrompt,
) -> Result<(InstructionScript, Option<FallbackReason>), NarrateError> {
    if script.is_empty() {
        return Err(NarrateError::EmptyScript);
    }
    let prompt = build_prompt(system, &terse_text(script))?;
    let reason = match invoke_with(backend, &prompt, config, script.len()) {
        Ok(raw) => match postprocess(&raw, script) {
            Ok(guide) => return Ok((guide, None)),
            Err(report) => FallbackReason::Rejected(report),
        },
        Err(e) => FallbackReason::Transport(e),
    };
    log::warn!("falling back to template narration: {reason}");
    Ok((render_template(script)?, Some(reason)))
}

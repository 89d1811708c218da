use super::NarrateError;

/// Default instructions for the completion model, including the worked
/// example it was tuned against. The example's repeated "2." is kept as-is;
/// completions are still held to consecutive numbering by `postprocess`.
pub const DEFAULT_SYSTEM_PROMPT: &str = "You are a precise navigation assistant.
Convert provided terse commands into a numbered walking guide.
Use \u{201c}Start by walking\u{2026}\u{201d} for step 1,
\u{201c}Then walk\u{2026}\u{201d} for steps 2\u{2026}(n-1),
\"Take the escalator from Floor n to n+1\",
and \u{201c}Finally walk\u{2026}\u{201d} for the last step.
Output one numbered line per command.

Here is an example case given:
Terse commands:
Go East 3 steps
Take the escalator from Floor 0 to 1
Go North 1 step

For the example terse commands, the output is:
1. Start by walking east for 3 steps.
2. Take the escalator from Floor 0 to 1.
2. Finally, walk north for 1 step, and you will reach your destination.

Terse commands are given as follows: you have to convert them into a numbered list of directions as provided in the prior example. Keep the step number as given; do not modify it. Do not change the order of the steps, and do not add any additional steps. The output should be numbered lines starting with a number followed by a period and a space.";

/// Header placed between the system prompt and the command block.
pub const TERSE_HEADER: &str = "Terse commands:";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemPrompt(String);

impl SystemPrompt {
    pub fn new(text: impl Into<String>) -> Result<Self, NarrateError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(NarrateError::EmptyPrompt);
        }
        Ok(Self(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Default for SystemPrompt {
    fn default() -> Self {
        Self(DEFAULT_SYSTEM_PROMPT.to_owned())
    }
}

/// System prompt, a blank line, the header, then the terse block.
pub fn build_prompt(system: &SystemPrompt, terse_text: &str) -> Result<String, NarrateError> {
    let terse = terse_text.trim_end();
    if terse.trim().is_empty() {
        return Err(NarrateError::EmptyScript);
    }
    Ok(format!(
        "{}\n\n{TERSE_HEADER}\n{terse}\n",
        system.as_str().trim_end()
    ))
}

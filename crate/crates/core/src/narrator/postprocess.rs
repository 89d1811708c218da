use std::fmt;
use std::sync::LazyLock;

use regex::Regex;

use super::{GuideLine, GuideSource, InstructionScript};
use crate::compressor::{TerseCommand, TerseScript};

static NUMBERED: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*(\d+)\. (\S.*?)\s*$").expect("valid regex"));

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepairIssue {
    NoNumberedLines,
    LineCount {
        expected: usize,
        found: usize,
    },
    NonConsecutiveIndex {
        position: usize,
        expected: usize,
        found: usize,
    },
    MissingCount {
        line: usize,
        count: usize,
    },
    MissingDirection {
        line: usize,
        direction: &'static str,
    },
    MissingPortalSentence {
        line: usize,
        sentence: String,
    },
}

impl fmt::Display for RepairIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepairIssue::NoNumberedLines => write!(f, "no numbered lines in completion"),
            RepairIssue::LineCount { expected, found } => {
                write!(f, "expected {expected} numbered lines, found {found}")
            }
            RepairIssue::NonConsecutiveIndex {
                position,
                expected,
                found,
            } => {
                write!(f, "non-consecutive numbering: line {position} is numbered {found}, expected {expected}")
            }
            RepairIssue::MissingCount { line, count } => {
                write!(f, "line {line} is missing step count {count}")
            }
            RepairIssue::MissingDirection { line, direction } => {
                write!(f, "line {line} is missing direction '{direction}'")
            }
            RepairIssue::MissingPortalSentence { line, sentence } => {
                write!(
                    f,
                    "line {line} is missing command coverage for \"{sentence}\""
                )
            }
        }
    }
}

/// Why a completion was rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairReport {
    pub issues: Vec<RepairIssue>,
}

impl fmt::Display for RepairReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.issues.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

fn contains_word(haystack: &str, word: &str) -> bool {
    haystack
        .split(|c: char| !c.is_ascii_alphanumeric())
        .any(|tok| tok.eq_ignore_ascii_case(word))
}

/// Extracts `N. text` lines from a completion and checks them against the
/// terse script: one line per command, numbered 1..n, each line carrying its
/// command's count and spelled direction, portal sentences verbatim.
pub fn postprocess(raw: &str, expected: &TerseScript) -> Result<InstructionScript, RepairReport> {
    let numbered: Vec<(usize, String)> = raw
        .lines()
        .filter_map(|l| {
            let caps = NUMBERED.captures(l)?;
            let idx = caps[1].parse().ok()?;
            Some((idx, caps[2].to_owned()))
        })
        .collect();

    let mut issues = Vec::new();
    if numbered.is_empty() {
        issues.push(RepairIssue::NoNumberedLines);
        return Err(RepairReport { issues });
    }
    if numbered.len() != expected.commands.len() {
        issues.push(RepairIssue::LineCount {
            expected: expected.commands.len(),
            found: numbered.len(),
        });
    }
    for (pos, (idx, _)) in numbered.iter().enumerate() {
        if *idx != pos + 1 {
            issues.push(RepairIssue::NonConsecutiveIndex {
                position: pos + 1,
                expected: pos + 1,
                found: *idx,
            });
        }
    }
    for (pos, (cmd, (_, text))) in expected.commands.iter().zip(&numbered).enumerate() {
        let line = pos + 1;
        match *cmd {
            TerseCommand::Move { dir, count } => {
                if !contains_word(text, &count.to_string()) {
                    issues.push(RepairIssue::MissingCount { line, count });
                }
                if !contains_word(text, dir.word()) {
                    issues.push(RepairIssue::MissingDirection {
                        line,
                        direction: dir.word(),
                    });
                }
            }
            TerseCommand::PortalTransit(t) => {
                let sentence = t.to_string();
                if !text.contains(&sentence) {
                    issues.push(RepairIssue::MissingPortalSentence { line, sentence });
                }
            }
        }
    }
    if !issues.is_empty() {
        return Err(RepairReport { issues });
    }
    Ok(InstructionScript {
        lines: numbered
            .into_iter()
            .map(|(index, text)| GuideLine { index, text })
            .collect(),
        source: GuideSource::LanguageModel,
    })
}

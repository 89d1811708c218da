use super::{GuideLine, GuideSource, InstructionScript, NarrateError};
use crate::compressor::{TerseCommand, TerseScript};

const ARRIVAL: &str = ", and you will reach your destination.";

fn phrase(word: &str, count: usize) -> String {
    let unit = if count == 1 { "step" } else { "steps" };
    format!("{word} for {count} {unit}")
}

/// Deterministic numbered guide. Moves open with "Start by walking", continue
/// with "Then walk" and close with "Finally, walk ..., and you will reach
/// your destination." Portal sentences are emitted verbatim.
pub fn render_template(script: &TerseScript) -> Result<InstructionScript, NarrateError> {
    let n = script.commands.len();
    if n == 0 {
        return Err(NarrateError::EmptyScript);
    }
    let lines = script
        .commands
        .iter()
        .enumerate()
        .map(|(k, cmd)| {
            let (first, last) = (k == 0, k + 1 == n);
            let text = match *cmd {
                TerseCommand::Move { dir, count } => {
                    let p = phrase(dir.word(), count);
                    match (first, last) {
                        (true, true) => format!("Start by walking {p}{ARRIVAL}"),
                        (true, false) => format!("Start by walking {p}."),
                        (false, true) => format!("Finally, walk {p}{ARRIVAL}"),
                        (false, false) => format!("Then walk {p}."),
                    }
                }
                TerseCommand::PortalTransit(t) if last => format!("{t}{ARRIVAL}"),
                TerseCommand::PortalTransit(t) => format!("{t}."),
            };
            GuideLine { index: k + 1, text }
        })
        .collect();
    Ok(InstructionScript {
        lines,
        source: GuideSource::Template,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::{NodeRef, PortalKind};
    use crate::planner::Direction::*;

    fn script(commands: Vec<TerseCommand>) -> TerseScript {
        TerseScript {
            origin: NodeRef::new(0, 0, 0),
            commands,
        }
    }

    #[test]
    fn three_moves() {
        let g = render_template(&script(vec![
            TerseCommand::go(SE, 5),
            TerseCommand::go(N, 3),
            TerseCommand::go(E, 2),
        ]))
        .unwrap();
        assert_eq!(
            g.render(),
            vec![
                "1. Start by walking southeast for 5 steps.",
                "2. Then walk north for 3 steps.",
                "3. Finally, walk east for 2 steps, and you will reach your destination.",
            ]
        );
        assert_eq!(g.source, GuideSource::Template);
    }

    #[test]
    fn escalator_in_the_middle() {
        let g = render_template(&script(vec![
            TerseCommand::go(E, 3),
            TerseCommand::transit(PortalKind::Escalator, 0, 1),
            TerseCommand::go(N, 1),
        ]))
        .unwrap();
        assert_eq!(g.lines[1].text, "Take the escalator from Floor 0 to 1.");
        assert_eq!(
            g.lines[2].text,
            "Finally, walk north for 1 step, and you will reach your destination."
        );
    }

    #[test]
    fn single_command_merges_start_and_finish() {
        let g = render_template(&script(vec![TerseCommand::go(N, 1)])).unwrap();
        assert_eq!(
            g.render(),
            vec!["1. Start by walking north for 1 step, and you will reach your destination."]
        );
    }

    #[test]
    fn portal_last() {
        let g = render_template(&script(vec![
            TerseCommand::go(W, 2),
            TerseCommand::transit(PortalKind::Elevator, 2, 0),
        ]))
        .unwrap();
        assert_eq!(
            g.lines[1].text,
            "Take the elevator from Floor 2 to 0, and you will reach your destination."
        );
    }

    #[test]
    fn empty_script_errors() {
        assert!(matches!(
            render_template(&script(vec![])),
            Err(NarrateError::EmptyScript)
        ));
    }
}

use super::{TerseCommand, TerseScript};
use crate::gridmap::{BuildingMap, FloorId, NodeRef};
use crate::num::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReplayError {
    #[error("origin {0} is not a free cell")]
    BadOrigin(NodeRef),
    #[error("command #{command} steps from {from} into a blocked or off-grid cell")]
    CollisionDuringReplay { command: usize, from: NodeRef },
    #[error("command #{command}: no {kind} at {at} leads to floor {to_floor}")]
    NoPortalHere {
        command: usize,
        at: NodeRef,
        kind: String,
        to_floor: FloorId,
    },
}

/// Every cell touched while replaying a script, plus its cost.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplayTrace<S> {
    pub visited: Vec<NodeRef>,
    pub cost: S,
}

impl<S> ReplayTrace<S> {
    pub fn end(&self) -> NodeRef {
        *self.visited.last().expect("trace includes the origin")
    }
}

/// Walks the script from its origin and returns the terminal node.
pub fn replay<S: Scalar>(
    script: &TerseScript,
    map: &BuildingMap<S>,
) -> Result<NodeRef, ReplayError> {
    replay_from(script.origin, &script.commands, map, |_| {}).map(|(end, _)| end)
}

pub fn replay_trace<S: Scalar>(
    script: &TerseScript,
    map: &BuildingMap<S>,
) -> Result<ReplayTrace<S>, ReplayError> {
    let mut visited = vec![script.origin];
    let (_, cost) = replay_from(script.origin, &script.commands, map, |n| visited.push(n))?;
    Ok(ReplayTrace { visited, cost })
}

pub(super) fn replay_from<S: Scalar>(
    origin: NodeRef,
    commands: &[TerseCommand],
    map: &BuildingMap<S>,
    mut visit: impl FnMut(NodeRef),
) -> Result<(NodeRef, S), ReplayError> {
    if !map.is_free(origin) {
        return Err(ReplayError::BadOrigin(origin));
    }
    let mut at = origin;
    let mut cost = S::zero();
    for (command, cmd) in commands.iter().enumerate() {
        match *cmd {
            TerseCommand::Move { dir, count } => {
                let grid = map.grid(at.floor).ok_or(ReplayError::BadOrigin(at))?;
                let (di, dj) = dir.offset();
                for _ in 0..count {
                    let next = at
                        .cell
                        .offset(di, dj)
                        .filter(|&c| grid.is_free(c))
                        .ok_or(ReplayError::CollisionDuringReplay { command, from: at })?;
                    at = NodeRef {
                        floor: at.floor,
                        cell: next,
                    };
                    cost = cost + dir.cost();
                    visit(at);
                }
            }
            TerseCommand::PortalTransit(t) => {
                let hop = map
                    .portals_at(at)
                    .find(|(p, other)| {
                        p.kind == t.kind && other.floor == t.to_floor && at.floor == t.from_floor
                    })
                    .filter(|(_, other)| map.is_free(*other));
                let (portal, other) = hop.ok_or_else(|| ReplayError::NoPortalHere {
                    command,
                    at,
                    kind: t.kind.to_string(),
                    to_floor: t.to_floor,
                })?;
                cost = cost + portal.cost;
                at = other;
                visit(at);
            }
        }
    }
    Ok((at, cost))
}

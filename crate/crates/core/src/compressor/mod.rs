//! Route compression: cell path -> compass symbols -> runs -> diagonal
//! collapse -> runs again.

mod replay;
mod stages;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use replay::{replay, replay_trace, ReplayError, ReplayTrace};
pub use stages::{
    compress, compress_with_stats, diagonal_collapse, expand, merge_runs, rle, vectorize,
    CompressStats,
};

use crate::gridmap::{FloorId, NodeRef, PortalKind};
pub use crate::planner::Direction;

/// A floor change through a portal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transit {
    pub kind: PortalKind,
    pub from_floor: FloorId,
    pub to_floor: FloorId,
}

impl fmt::Display for Transit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Take the {} from Floor {} to {}",
            self.kind, self.from_floor, self.to_floor
        )
    }
}

/// One symbol per consecutive pair of path nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    Move(Direction),
    Portal(Transit),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TerseCommand {
    Move { dir: Direction, count: usize },
    PortalTransit(Transit),
}

impl TerseCommand {
    pub fn go(dir: Direction, count: usize) -> Self {
        TerseCommand::Move { dir, count }
    }

    pub fn transit(kind: PortalKind, from: u32, to: u32) -> Self {
        TerseCommand::PortalTransit(Transit {
            kind,
            from_floor: FloorId(from),
            to_floor: FloorId(to),
        })
    }

    /// Real-world length of a move given the size of one cell. Transits have
    /// no walking distance.
    pub fn walk_distance(&self, meters_per_cell: f64) -> Option<f64> {
        match *self {
            TerseCommand::Move { dir, count } => {
                Some(count as f64 * dir.cost::<f64>() * meters_per_cell)
            }
            TerseCommand::PortalTransit(_) => None,
        }
    }
}

impl fmt::Display for TerseCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TerseCommand::Move { dir, count: 1 } => write!(f, "Go {dir} 1 step"),
            TerseCommand::Move { dir, count } => write!(f, "Go {dir} {count} steps"),
            TerseCommand::PortalTransit(t) => t.fmt(f),
        }
    }
}

/// Compressed route, replayable from `origin`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerseScript {
    pub origin: NodeRef,
    pub commands: Vec<TerseCommand>,
}

impl TerseScript {
    pub fn len(&self) -> usize {
        self.commands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commands.is_empty()
    }

    /// True when no two adjacent moves share a direction and no count is 0.
    pub fn is_normalized(&self) -> bool {
        self.commands
            .iter()
            .all(|c| !matches!(c, TerseCommand::Move { count: 0, .. }))
            && self.commands.windows(2).all(|w| match (w[0], w[1]) {
                (TerseCommand::Move { dir: a, .. }, TerseCommand::Move { dir: b, .. }) => a != b,
                _ => true,
            })
    }
}

/// One line per command: "Go SE 5 steps", "Take the escalator from Floor 0 to 1".
pub fn render_terse(script: &TerseScript) -> Vec<String> {
    script.commands.iter().map(|c| c.to_string()).collect()
}

/// [`render_terse`] joined with newlines, the narrator's input block.
pub fn terse_text(script: &TerseScript) -> String {
    render_terse(script).join("\n")
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompressError {
    #[error("path nodes #{index} {from} -> {to} are not adjacent")]
    NonAdjacentPair {
        index: usize,
        from: NodeRef,
        to: NodeRef,
    },
    #[error("runs do not replay on this map: {0}")]
    InvalidReplay(#[from] ReplayError),
}

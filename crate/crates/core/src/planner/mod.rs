//! Optimal routing over the implicit 8-connected multi-floor graph.
//!
//! Every free cell is a node. Grid edges join 8-neighbors on the same floor
//! (cost 1 orthogonal, √2 diagonal); portal edges join the two endpoints of
//! each declared [`Portal`](crate::gridmap::Portal) at its traversal cost.

mod astar;
mod heuristic;
mod moves;
mod neighbors;
mod oracle;
mod validate;

use std::time::Duration;

pub use astar::astar;
pub use heuristic::GoalBound;
pub use moves::{move_offsets, step_target, CornerRule, Direction, MoveOffset};
pub use neighbors::{chebyshev, neighbors};
pub use oracle::dijkstra_oracle;
pub use validate::{validate_path, PathViolation};

use crate::gridmap::FloorId;
pub use crate::gridmap::NodeRef;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Nodes moved to the closed set.
    pub expanded_nodes: usize,
    /// Heap insertions, including the start.
    pub pushed_nodes: usize,
    pub wall_time: Duration,
}

/// A route: `nodes[0]` is the start, the last node the goal.
#[derive(Clone, Debug, PartialEq)]
pub struct Path<S> {
    pub nodes: Vec<NodeRef>,
    pub total_cost: S,
    pub stats: SearchStats,
}

impl<S> Path<S> {
    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn start(&self) -> NodeRef {
        self.nodes[0]
    }

    pub fn goal(&self) -> NodeRef {
        *self.nodes.last().expect("non-empty path")
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("start {0} is not a free cell")]
    StartBlocked(NodeRef),
    #[error("goal {0} is not a free cell")]
    GoalBlocked(NodeRef),
    #[error("node {0} is not a free cell")]
    NodeBlocked(NodeRef),
    #[error("floor {0} does not exist")]
    UnknownFloor(FloorId),
    #[error("no path from {start} to {goal}")]
    NoPath { start: NodeRef, goal: NodeRef },
}

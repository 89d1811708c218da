use super::{step_target, CornerRule, Direction, PlanError};
use crate::gridmap::{BuildingMap, NodeRef};
use crate::num::Scalar;

/// All edges leaving `node`: free 8-neighbors in [`Direction::ALL`] order,
/// followed by portal hops in declaration order.
pub fn neighbors<S: Scalar>(
    map: &BuildingMap<S>,
    node: NodeRef,
    rule: CornerRule,
) -> Result<Vec<(NodeRef, S)>, PlanError> {
    let grid = map
        .grid(node.floor)
        .ok_or(PlanError::UnknownFloor(node.floor))?;
    if !grid.is_free(node.cell) {
        return Err(PlanError::NodeBlocked(node));
    }
    let mut out = Vec::with_capacity(8);
    for dir in Direction::ALL {
        if let Some(cell) = step_target(grid, node.cell, dir, rule) {
            out.push((
                NodeRef {
                    floor: node.floor,
                    cell,
                },
                dir.cost(),
            ));
        }
    }
    for (portal, other) in map.portals_at(node) {
        if map.is_free(other) {
            out.push((other, portal.cost));
        }
    }
    Ok(out)
}

/// Chebyshev distance `max(|di|, |dj|)`.
#[inline]
pub fn chebyshev<S: Scalar>(a: crate::gridmap::CellCoord, b: crate::gridmap::CellCoord) -> S {
    S::from_steps(a.i.abs_diff(b.i).max(a.j.abs_diff(b.j)))
}

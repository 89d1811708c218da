use super::{CornerRule, Path};
use crate::gridmap::{BuildingMap, CellCoord, NodeRef};
use crate::num::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PathViolation {
    #[error("path is empty")]
    Empty,
    #[error("path starts at {found}, expected {expected}")]
    WrongStart { expected: NodeRef, found: NodeRef },
    #[error("path ends at {found}, expected {expected}")]
    WrongGoal { expected: NodeRef, found: NodeRef },
    #[error("node #{index} {node} is not a free cell")]
    BlockedNode { index: usize, node: NodeRef },
    #[error("nodes #{index} {from} -> {to} are neither grid neighbors nor a portal")]
    NotAdjacent {
        index: usize,
        from: NodeRef,
        to: NodeRef,
    },
    #[error("diagonal #{index} {from} -> {to} cuts a blocked corner")]
    CutsCorner {
        index: usize,
        from: NodeRef,
        to: NodeRef,
    },
    #[error("declared cost {declared} differs from edge sum {summed}")]
    CostMismatch { declared: f64, summed: f64 },
}

/// Re-walks `path` against the map from scratch: endpoints, free cells,
/// adjacency (8-neighbor or declared portal) and the cost sum.
pub fn validate_path<S: Scalar>(
    map: &BuildingMap<S>,
    path: &Path<S>,
    start: NodeRef,
    goal: NodeRef,
    rule: CornerRule,
    tolerance: S,
) -> Result<(), PathViolation> {
    let (Some(&first), Some(&last)) = (path.nodes.first(), path.nodes.last()) else {
        return Err(PathViolation::Empty);
    };
    if first != start {
        return Err(PathViolation::WrongStart {
            expected: start,
            found: first,
        });
    }
    if last != goal {
        return Err(PathViolation::WrongGoal {
            expected: goal,
            found: last,
        });
    }
    for (index, &node) in path.nodes.iter().enumerate() {
        if !map.is_free(node) {
            return Err(PathViolation::BlockedNode { index, node });
        }
    }

    let mut sum = S::zero();
    for (index, w) in path.nodes.windows(2).enumerate() {
        let (from, to) = (w[0], w[1]);
        let di = to.cell.i as i64 - from.cell.i as i64;
        let dj = to.cell.j as i64 - from.cell.j as i64;
        let grid_step =
            from.floor == to.floor && di.abs() <= 1 && dj.abs() <= 1 && (di, dj) != (0, 0);
        if grid_step {
            if di != 0 && dj != 0 {
                if rule == CornerRule::Strict {
                    let flank_a = NodeRef {
                        floor: from.floor,
                        cell: CellCoord::new(to.cell.i, from.cell.j),
                    };
                    let flank_b = NodeRef {
                        floor: from.floor,
                        cell: CellCoord::new(from.cell.i, to.cell.j),
                    };
                    if !(map.is_free(flank_a) && map.is_free(flank_b)) {
                        return Err(PathViolation::CutsCorner { index, from, to });
                    }
                }
                sum = sum + S::SQRT_2();
            } else {
                sum = sum + S::one();
            }
        } else if let Some(p) = map.portal_between(from, to) {
            sum = sum + p.cost;
        } else {
            return Err(PathViolation::NotAdjacent { index, from, to });
        }
    }
    if (sum - path.total_cost).abs() > tolerance {
        return Err(PathViolation::CostMismatch {
            declared: path.total_cost.as_f64(),
            summed: sum.as_f64(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::OccupancyGrid;
    use crate::planner::SearchStats;

    fn path(nodes: Vec<NodeRef>, cost: f64) -> Path<f64> {
        Path {
            nodes,
            total_cost: cost,
            stats: SearchStats::default(),
        }
    }

    #[test]
    fn catches_each_defect() {
        let g = OccupancyGrid::from_row_strings(&["110", "011"]).unwrap();
        let m = BuildingMap::<f64>::single_floor("f", g);
        let (a, b, c) = (
            NodeRef::new(0, 0, 0),
            NodeRef::new(0, 0, 1),
            NodeRef::new(0, 1, 2),
        );
        let s2 = std::f64::consts::SQRT_2;
        let ok = path(vec![a, b, c], 1.0 + s2);
        assert_eq!(
            validate_path(&m, &ok, a, c, CornerRule::Permissive, 1e-9),
            Ok(())
        );
        assert!(matches!(
            validate_path(&m, &ok, a, c, CornerRule::Strict, 1e-9),
            Err(PathViolation::CutsCorner { index: 1, .. })
        ));
        assert!(matches!(
            validate_path(
                &m,
                &path(vec![a, c], 1.0),
                a,
                c,
                CornerRule::Permissive,
                1e-9
            ),
            Err(PathViolation::NotAdjacent { .. })
        ));
        assert!(matches!(
            validate_path(
                &m,
                &path(vec![a, b, c], 3.0),
                a,
                c,
                CornerRule::Permissive,
                1e-9
            ),
            Err(PathViolation::CostMismatch { .. })
        ));
        assert!(matches!(
            validate_path(
                &m,
                &path(vec![b, c], s2),
                a,
                c,
                CornerRule::Permissive,
                1e-9
            ),
            Err(PathViolation::WrongStart { .. })
        ));
        let blocked = NodeRef::new(0, 1, 0);
        assert!(matches!(
            validate_path(
                &m,
                &path(vec![a, blocked], 1.0),
                a,
                blocked,
                CornerRule::Permissive,
                1e-9
            ),
            Err(PathViolation::BlockedNode { index: 1, .. })
        ));
        assert_eq!(
            validate_path(&m, &path(vec![], 0.0), a, c, CornerRule::Permissive, 1e-9),
            Err(PathViolation::Empty)
        );
    }
}

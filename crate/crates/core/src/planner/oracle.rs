//! Uniform-cost reference search.
//!
//! Deliberately plain: hash maps keyed by [`NodeRef`], edges from the public
//! [`neighbors`] function, an ordered set as the priority queue. It shares no
//! code with the A* hot path beyond the edge definition.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::Instant;

use super::{neighbors, CornerRule, Path, PlanError, SearchStats};
use crate::gridmap::{BuildingMap, NodeRef};
use crate::num::Scalar;

/// Orders by `(g, floor, i, j)` through the raw IEEE bits, which sort like the
/// numbers for non-negative finite values.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    g_bits: u64,
    node: NodeRef,
}

fn key<S: Scalar>(g: S, node: NodeRef) -> Key {
    Key {
        g_bits: g.as_f64().to_bits(),
        node,
    }
}

pub fn dijkstra_oracle<S: Scalar>(
    map: &BuildingMap<S>,
    start: NodeRef,
    goal: NodeRef,
    rule: CornerRule,
) -> Result<Path<S>, PlanError> {
    let t0 = Instant::now();
    if map.floor(start.floor).is_none() {
        return Err(PlanError::UnknownFloor(start.floor));
    }
    if !map.is_free(start) {
        return Err(PlanError::StartBlocked(start));
    }
    if map.floor(goal.floor).is_none() {
        return Err(PlanError::UnknownFloor(goal.floor));
    }
    if !map.is_free(goal) {
        return Err(PlanError::GoalBlocked(goal));
    }

    let mut dist: HashMap<NodeRef, S> = HashMap::from([(start, S::zero())]);
    let mut prev: HashMap<NodeRef, NodeRef> = HashMap::new();
    let mut settled: HashSet<NodeRef> = HashSet::new();
    let mut queue: BTreeSet<Key> = BTreeSet::from([key(S::zero(), start)]);
    let mut stats = SearchStats {
        pushed_nodes: 1,
        ..Default::default()
    };

    while let Some(Key { node: u, .. }) = queue.pop_first() {
        if !settled.insert(u) {
            continue;
        }
        if u == goal {
            break;
        }
        stats.expanded_nodes += 1;
        let du = dist[&u];
        for (v, c) in neighbors(map, u, rule)? {
            if settled.contains(&v) {
                continue;
            }
            let cand = du + c;
            let better = dist.get(&v).is_none_or(|&dv| cand < dv);
            if better {
                if let Some(&old) = dist.get(&v) {
                    queue.remove(&key(old, v));
                }
                dist.insert(v, cand);
                prev.insert(v, u);
                queue.insert(key(cand, v));
                stats.pushed_nodes += 1;
            }
        }
    }
    stats.wall_time = t0.elapsed();

    if !settled.contains(&goal) {
        return Err(PlanError::NoPath { start, goal });
    }
    let mut nodes = vec![goal];
    let mut cur = goal;
    while cur != start {
        cur = prev[&cur];
        nodes.push(cur);
    }
    nodes.reverse();
    Ok(Path {
        nodes,
        total_cost: dist[&goal],
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::OccupancyGrid;

    #[test]
    fn three_by_three_all_nodes() {
        let m = BuildingMap::<f64>::single_floor("f", OccupancyGrid::new_free(3, 3).unwrap());
        let p = dijkstra_oracle(
            &m,
            NodeRef::new(0, 0, 0),
            NodeRef::new(0, 2, 2),
            CornerRule::Permissive,
        )
        .unwrap();
        assert!((p.total_cost - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn unreachable_goal() {
        let g = OccupancyGrid::from_row_strings(&["101"]).unwrap();
        let m = BuildingMap::<f64>::single_floor("f", g);
        assert!(matches!(
            dijkstra_oracle(
                &m,
                NodeRef::new(0, 0, 0),
                NodeRef::new(0, 0, 2),
                CornerRule::Permissive
            ),
            Err(PlanError::NoPath { .. })
        ));
    }
}

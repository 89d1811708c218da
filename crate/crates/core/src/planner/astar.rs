use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

use super::heuristic::GoalBound;
use super::{step_target, CornerRule, Direction, Path, PlanError, SearchStats};
use crate::gridmap::{BuildingMap, CellCoord, FloorId, NodeRef};
use crate::num::{total_cmp, Scalar};

/// Flat node numbering across all floors.
pub(crate) struct NodeSpace {
    offsets: Vec<usize>,
    floor_ids: Vec<FloorId>,
    cols: Vec<usize>,
    total: usize,
}

impl NodeSpace {
    pub(crate) fn new<S: Scalar>(map: &BuildingMap<S>) -> Self {
        let mut offsets = Vec::with_capacity(map.floors.len());
        let mut total = 0;
        for f in &map.floors {
            offsets.push(total);
            total += f.grid.len();
        }
        Self {
            offsets,
            floor_ids: map.floors.iter().map(|f| f.id).collect(),
            cols: map.floors.iter().map(|f| f.grid.cols()).collect(),
            total,
        }
    }

    #[inline]
    fn id(&self, floor_idx: usize, c: CellCoord) -> usize {
        self.offsets[floor_idx] + c.i * self.cols[floor_idx] + c.j
    }

    #[inline]
    fn node(&self, id: usize) -> (usize, NodeRef) {
        let fidx = self.offsets.partition_point(|&o| o <= id) - 1;
        let local = id - self.offsets[fidx];
        let cols = self.cols[fidx];
        (
            fidx,
            NodeRef {
                floor: self.floor_ids[fidx],
                cell: CellCoord::new(local / cols, local % cols),
            },
        )
    }
}

#[derive(Clone, Copy)]
struct Entry<S> {
    f: S,
    g: S,
    node: NodeRef,
    id: usize,
}

impl<S: Scalar> Entry<S> {
    fn key_cmp(&self, other: &Self) -> Ordering {
        total_cmp(self.f, other.f)
            .then_with(|| total_cmp(self.g, other.g))
            .then_with(|| self.node.floor.cmp(&other.node.floor))
            .then_with(|| self.node.cell.i.cmp(&other.node.cell.i))
            .then_with(|| self.node.cell.j.cmp(&other.node.cell.j))
    }
}

impl<S: Scalar> PartialEq for Entry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}
impl<S: Scalar> Eq for Entry<S> {}
impl<S: Scalar> PartialOrd for Entry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: Scalar> Ord for Entry<S> {
    // Reversed: BinaryHeap is a max-heap and we pop the smallest key.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

pub(crate) fn check_endpoint<S: Scalar>(
    map: &BuildingMap<S>,
    node: NodeRef,
    err: fn(NodeRef) -> PlanError,
) -> Result<usize, PlanError> {
    let fidx = map
        .floor_index(node.floor)
        .ok_or(PlanError::UnknownFloor(node.floor))?;
    if !map.floors[fidx].grid.is_free(node.cell) {
        return Err(err(node));
    }
    Ok(fidx)
}

/// Optimal route from `start` to `goal` over 8-connected free cells and
/// declared portals.
///
/// Open-list ties break on `(f, g, floor, i, j)`, all ascending, so identical
/// inputs always yield the identical node sequence. Stale heap entries are
/// skipped when popped.
pub fn astar<S: Scalar>(
    map: &BuildingMap<S>,
    start: NodeRef,
    goal: NodeRef,
    rule: CornerRule,
) -> Result<Path<S>, PlanError> {
    let t0 = Instant::now();
    let start_fidx = check_endpoint(map, start, PlanError::StartBlocked)?;
    let goal_fidx = check_endpoint(map, goal, PlanError::GoalBlocked)?;

    let space = NodeSpace::new(map);
    let bound = GoalBound::new(map, goal);

    // Portal adjacency keyed by flat id, both directions, declaration order.
    // `has_portal` keeps the hash lookup off the common path.
    let mut portal_adj: HashMap<usize, Vec<(usize, S)>> = HashMap::new();
    let mut has_portal = vec![false; space.total];
    for p in &map.portals {
        let (Some(fa), Some(fb)) = (map.floor_index(p.a.floor), map.floor_index(p.b.floor)) else {
            continue;
        };
        if !(map.floors[fa].grid.is_free(p.a.cell) && map.floors[fb].grid.is_free(p.b.cell)) {
            continue;
        }
        let (ia, ib) = (space.id(fa, p.a.cell), space.id(fb, p.b.cell));
        portal_adj.entry(ia).or_default().push((ib, p.cost));
        portal_adj.entry(ib).or_default().push((ia, p.cost));
        has_portal[ia] = true;
        has_portal[ib] = true;
    }

    let mut g = vec![S::infinity(); space.total];
    let mut parent = vec![usize::MAX; space.total];
    let mut closed = vec![false; space.total];
    let mut heap = BinaryHeap::new();
    let mut stats = SearchStats::default();

    let start_id = space.id(start_fidx, start.cell);
    let goal_id = space.id(goal_fidx, goal.cell);
    g[start_id] = S::zero();
    heap.push(Entry {
        f: bound.estimate(start),
        g: S::zero(),
        node: start,
        id: start_id,
    });
    stats.pushed_nodes += 1;

    let mut reached = false;
    while let Some(Entry {
        g: gu,
        node: u,
        id: uid,
        ..
    }) = heap.pop()
    {
        if uid == goal_id {
            reached = true;
            break;
        }
        if closed[uid] {
            continue;
        }
        closed[uid] = true;
        stats.expanded_nodes += 1;

        let (fidx, _) = space.node(uid);
        let grid = &map.floors[fidx].grid;
        let mut relax = |vid: usize, v: NodeRef, cost: S, heap: &mut BinaryHeap<Entry<S>>| {
            if closed[vid] {
                return;
            }
            let gv = gu + cost;
            if gv < g[vid] {
                let h = bound.estimate(v);
                if h.is_infinite() {
                    return;
                }
                g[vid] = gv;
                parent[vid] = uid;
                heap.push(Entry {
                    f: gv + h,
                    g: gv,
                    node: v,
                    id: vid,
                });
                stats.pushed_nodes += 1;
            }
        };
        for dir in Direction::ALL {
            if let Some(cell) = step_target(grid, u.cell, dir, rule) {
                let v = NodeRef {
                    floor: u.floor,
                    cell,
                };
                relax(space.id(fidx, cell), v, dir.cost(), &mut heap);
            }
        }
        if let Some(hops) = has_portal[uid].then(|| &portal_adj[&uid]) {
            for &(vid, cost) in hops {
                let (_, v) = space.node(vid);
                relax(vid, v, cost, &mut heap);
            }
        }
    }

    stats.wall_time = t0.elapsed();
    if !reached {
        return Err(PlanError::NoPath { start, goal });
    }

    let mut ids = vec![goal_id];
    let mut cur = goal_id;
    while cur != start_id {
        cur = parent[cur];
        if cur == usize::MAX {
            return Err(PlanError::NoPath { start, goal });
        }
        ids.push(cur);
    }
    ids.reverse();
    Ok(Path {
        nodes: ids.into_iter().map(|id| space.node(id).1).collect(),
        total_cost: g[goal_id],
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::{Floor, OccupancyGrid, Portal, PortalKind};

    fn open(rows: usize, cols: usize) -> BuildingMap<f64> {
        BuildingMap::single_floor("open", OccupancyGrid::new_free(rows, cols).unwrap())
    }

    #[test]
    fn corridor() {
        let p = astar(
            &open(1, 5),
            NodeRef::new(0, 0, 0),
            NodeRef::new(0, 0, 4),
            CornerRule::Permissive,
        )
        .unwrap();
        assert_eq!(p.total_cost, 4.0);
        assert_eq!(p.nodes.len(), 5);
        assert!(p.stats.expanded_nodes <= p.stats.pushed_nodes);
    }

    #[test]
    fn diagonal_three_by_three() {
        let p = astar(
            &open(3, 3),
            NodeRef::new(0, 0, 0),
            NodeRef::new(0, 2, 2),
            CornerRule::Permissive,
        )
        .unwrap();
        assert!((p.total_cost - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
        assert_eq!(
            p.nodes,
            vec![
                NodeRef::new(0, 0, 0),
                NodeRef::new(0, 1, 1),
                NodeRef::new(0, 2, 2)
            ]
        );
    }

    #[test]
    fn start_equals_goal() {
        let p = astar(
            &open(2, 2),
            NodeRef::new(0, 1, 1),
            NodeRef::new(0, 1, 1),
            CornerRule::Strict,
        )
        .unwrap();
        assert_eq!(p.nodes, vec![NodeRef::new(0, 1, 1)]);
        assert_eq!(p.total_cost, 0.0);
    }

    #[test]
    fn enclosed_start_has_no_path() {
        let g = OccupancyGrid::from_row_strings(&["00000", "01000", "00011"]).unwrap();
        let m = BuildingMap::<f64>::single_floor("f", g);
        let err = astar(
            &m,
            NodeRef::new(0, 1, 1),
            NodeRef::new(0, 2, 4),
            CornerRule::Permissive,
        )
        .unwrap_err();
        assert!(matches!(err, PlanError::NoPath { .. }));
    }

    #[test]
    fn blocked_endpoints() {
        let g = OccupancyGrid::from_row_strings(&["10", "01"]).unwrap();
        let m = BuildingMap::<f64>::single_floor("f", g);
        assert!(matches!(
            astar(
                &m,
                NodeRef::new(0, 0, 1),
                NodeRef::new(0, 1, 1),
                CornerRule::Permissive
            ),
            Err(PlanError::StartBlocked(_))
        ));
        assert!(matches!(
            astar(
                &m,
                NodeRef::new(0, 0, 0),
                NodeRef::new(0, 1, 0),
                CornerRule::Permissive
            ),
            Err(PlanError::GoalBlocked(_))
        ));
        assert!(matches!(
            astar(
                &m,
                NodeRef::new(4, 0, 0),
                NodeRef::new(0, 1, 1),
                CornerRule::Permissive
            ),
            Err(PlanError::UnknownFloor(_))
        ));
    }

    #[test]
    fn diagonal_squeeze_depends_on_rule() {
        let g = OccupancyGrid::from_row_strings(&["10", "01"]).unwrap();
        let m = BuildingMap::<f64>::single_floor("f", g);
        let (a, b) = (NodeRef::new(0, 0, 0), NodeRef::new(0, 1, 1));
        assert_eq!(
            astar(&m, a, b, CornerRule::Permissive).unwrap().nodes.len(),
            2
        );
        assert!(matches!(
            astar(&m, a, b, CornerRule::Strict),
            Err(PlanError::NoPath { .. })
        ));
    }

    #[test]
    fn crosses_floors_through_portal() {
        let m = open(3, 4)
            .with_floor(Floor::new(
                1,
                "First Floor",
                OccupancyGrid::new_free(3, 4).unwrap(),
            ))
            .with_portal(Portal::new(
                PortalKind::Escalator,
                NodeRef::new(0, 2, 3),
                NodeRef::new(1, 0, 0),
            ));
        let p = astar(
            &m,
            NodeRef::new(0, 0, 0),
            NodeRef::new(1, 2, 3),
            CornerRule::Permissive,
        )
        .unwrap();
        let k = p
            .nodes
            .iter()
            .position(|n| *n == NodeRef::new(0, 2, 3))
            .unwrap();
        assert_eq!(p.nodes[k + 1], NodeRef::new(1, 0, 0));
        // 2 diag + 1 east = 2√2 + 1, portal 1, then same again.
        let leg = 2.0 * std::f64::consts::SQRT_2 + 1.0;
        assert!((p.total_cost - (2.0 * leg + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn node_space_round_trip() {
        let m = open(3, 4).with_floor(Floor::new(7, "x", OccupancyGrid::new_free(2, 5).unwrap()));
        let s = NodeSpace::new(&m);
        assert_eq!(s.total, 22);
        for id in 0..s.total {
            let (fidx, n) = s.node(id);
            assert_eq!(s.id(fidx, n.cell), id);
        }
        assert_eq!(s.node(12).1, NodeRef::new(7, 0, 0));
    }
}

//! Goal-distance lower bound for the joint multi-floor graph.
//!
//! On the goal floor the bound is the Chebyshev distance to the goal. Portals
//! add a second family of bounds: for every portal endpoint `e` we know a
//! lower bound `D(e)` on the cost from `e` to the goal, computed by running
//! Dijkstra on a tiny abstract graph whose nodes are the portal endpoints plus
//! the goal. Abstract edges are the portals themselves (at their traversal
//! cost) and Chebyshev distances between points on the same floor, each of
//! which underestimates the real walk. The bound at a cell `v` is
//!
//! ```text
//! h(v) = min( cheb(v, goal)          if v is on the goal floor,
//!             min_e cheb(v, e) + D(e) over endpoints e on v's floor )
//! ```
//!
//! Every term is consistent across grid edges (costs are never below the
//! Chebyshev step) and across portal edges (`D` satisfies the triangle
//! inequality on the abstract graph), so A* with a closed set stays optimal.
//! Without portals this is exactly the Chebyshev heuristic.

use std::collections::HashMap;

use super::chebyshev;
use crate::gridmap::{BuildingMap, CellCoord, FloorId, NodeRef};
use crate::num::{total_cmp, Scalar};

pub struct GoalBound<S> {
    goal: NodeRef,
    /// Per floor: endpoints with a finite lower bound to the goal. Buildings
    /// have few floors, so a linear scan beats hashing.
    anchors: Vec<(FloorId, Vec<(CellCoord, S)>)>,
}

impl<S: Scalar> GoalBound<S> {
    pub fn new(map: &BuildingMap<S>, goal: NodeRef) -> Self {
        if map.portals.is_empty() {
            return Self {
                goal,
                anchors: Vec::new(),
            };
        }

        // Abstract nodes: index 0 is the goal, then unique portal endpoints.
        let mut nodes: Vec<NodeRef> = vec![goal];
        let mut index: HashMap<NodeRef, usize> = HashMap::from([(goal, 0)]);
        let mut id = |n: NodeRef, nodes: &mut Vec<NodeRef>| {
            *index.entry(n).or_insert_with(|| {
                nodes.push(n);
                nodes.len() - 1
            })
        };
        let mut portal_edges = Vec::with_capacity(map.portals.len());
        for p in &map.portals {
            let a = id(p.a, &mut nodes);
            let b = id(p.b, &mut nodes);
            portal_edges.push((a, b, p.cost));
        }

        let n = nodes.len();
        let mut adj: Vec<Vec<(usize, S)>> = vec![Vec::new(); n];
        for (a, b, c) in portal_edges {
            adj[a].push((b, c));
            adj[b].push((a, c));
        }
        for x in 0..n {
            for y in (x + 1)..n {
                if nodes[x].floor == nodes[y].floor {
                    let d = chebyshev(nodes[x].cell, nodes[y].cell);
                    adj[x].push((y, d));
                    adj[y].push((x, d));
                }
            }
        }

        // Dense Dijkstra; the abstract graph has at most 2 * portals + 1 nodes.
        let mut dist = vec![S::infinity(); n];
        let mut done = vec![false; n];
        dist[0] = S::zero();
        for _ in 0..n {
            let next = (0..n)
                .filter(|&k| !done[k] && dist[k].is_finite())
                .min_by(|&a, &b| total_cmp(dist[a], dist[b]));
            let Some(u) = next else { break };
            done[u] = true;
            for &(v, c) in &adj[u] {
                let cand = dist[u] + c;
                if cand < dist[v] {
                    dist[v] = cand;
                }
            }
        }

        let mut anchors: Vec<(FloorId, Vec<(CellCoord, S)>)> = Vec::new();
        for (k, node) in nodes.iter().enumerate().skip(1) {
            if dist[k].is_finite() {
                match anchors.iter_mut().find(|(f, _)| *f == node.floor) {
                    Some((_, list)) => list.push((node.cell, dist[k])),
                    None => anchors.push((node.floor, vec![(node.cell, dist[k])])),
                }
            }
        }
        Self { goal, anchors }
    }

    /// Lower bound on the cost from `v` to the goal; infinite when no portal
    /// chain can lead from `v`'s floor to the goal floor.
    #[inline]
    pub fn estimate(&self, v: NodeRef) -> S {
        let mut best = if v.floor == self.goal.floor {
            chebyshev(v.cell, self.goal.cell)
        } else {
            S::infinity()
        };
        if let Some((_, list)) = self.anchors.iter().find(|(f, _)| *f == v.floor) {
            for &(cell, d) in list {
                let t = chebyshev::<S>(v.cell, cell) + d;
                if t < best {
                    best = t;
                }
            }
        }
        best
    }
}

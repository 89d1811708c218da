//! Seeded synthetic floor plans for tests and benchmarks.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gridmap::{
    BuildingMap, CellCoord, Floor, NodeRef, OccupancyGrid, Poi, Portal, PortalKind,
};
use crate::num::Scalar;

/// Each cell blocked independently with probability `density`.
pub fn random_grid(rows: usize, cols: usize, density: f64, seed: u64) -> OccupancyGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = (0..rows * cols)
        .map(|_| !rng.random_bool(density.clamp(0.0, 1.0)))
        .collect();
    OccupancyGrid::from_cells(rows, cols, cells).expect("positive dimensions")
}

/// Labels 8-connected free components; returns per-cell labels
/// (`usize::MAX` for blocked) and component sizes.
pub fn components(grid: &OccupancyGrid) -> (Vec<usize>, Vec<usize>) {
    let mut label = vec![usize::MAX; grid.len()];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..grid.len() {
        if !grid.cells()[start] || label[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut size = 0;
        label[start] = id;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            size += 1;
            let c = grid.coord_of(idx);
            for di in -1isize..=1 {
                for dj in -1isize..=1 {
                    let (i, j) = (c.i as isize + di, c.j as isize + dj);
                    if grid.is_free_at(i, j) {
                        let n = grid.index_of(CellCoord::new(i as usize, j as usize));
                        if label[n] == usize::MAX {
                            label[n] = id;
                            queue.push_back(n);
                        }
                    }
                }
            }
        }
        sizes.push(size);
    }
    (label, sizes)
}

/// Blocks every free cell outside the largest component.
pub fn keep_largest_component(grid: &mut OccupancyGrid) {
    let (label, sizes) = components(grid);
    let Some((best, _)) = sizes
        .iter()
        .enumerate()
        .max_by_key(|&(k, s)| (*s, std::cmp::Reverse(k)))
    else {
        return;
    };
    for (idx, &l) in label.iter().enumerate() {
        if l != usize::MAX && l != best {
            let c = grid.coord_of(idx);
            grid.set(c, false).expect("in bounds");
        }
    }
}

/// Connected floor plan: random wall segments and pillars are dropped until
/// roughly `blocked` of the cells are obstacles, then stray pockets are
/// filled so every free cell is reachable.
pub fn floor_plan(rows: usize, cols: usize, blocked: f64, seed: u64) -> OccupancyGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = OccupancyGrid::new_free(rows, cols).expect("positive dimensions");
    let max_h = (rows / 4).max(1);
    let max_w = (cols / 4).max(1);
    let mut guard = 0;
    while grid.blocked_fraction() < blocked && guard < 100_000 {
        guard += 1;
        // Thin walls read like corridors; small blocks like shops.
        let (h, w) = if rng.random_bool(0.5) {
            if rng.random_bool(0.5) {
                (1, rng.random_range(1..=max_w))
            } else {
                (rng.random_range(1..=max_h), 1)
            }
        } else {
            (
                rng.random_range(1..=max_h.min(8)),
                rng.random_range(1..=max_w.min(8)),
            )
        };
        let i0 = rng.random_range(0..rows);
        let j0 = rng.random_range(0..cols);
        let before = grid.clone();
        for i in i0..(i0 + h).min(rows) {
            for j in j0..(j0 + w).min(cols) {
                grid.set(CellCoord::new(i, j), false).expect("in bounds");
            }
        }
        keep_largest_component(&mut grid);
        // Undo placements that seal off a large region.
        if grid.blocked_fraction() > blocked + 0.03 {
            grid = before;
        }
    }
    grid
}

/// Two floors of `(rows, cols)` joined by one escalator, with a POI on each
/// floor ("Entrance" on floor 0, "Food Court" on floor 1). Floor grids use
/// seeds `seed` and `seed + 1`.
pub fn two_floor_building<S: Scalar>(
    floor0: (usize, usize),
    floor1: (usize, usize),
    blocked: f64,
    seed: u64,
) -> BuildingMap<S> {
    let g0 = floor_plan(floor0.0, floor0.1, blocked, seed);
    let g1 = floor_plan(floor1.0, floor1.1, blocked, seed.wrapping_add(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut pick = |g: &OccupancyGrid| {
        let free: Vec<CellCoord> = g.free_cells().collect();
        free[rng.random_range(0..free.len())]
    };
    let esc = (pick(&g0), pick(&g1));
    let poi0 = pick(&g0);
    let poi1 = pick(&g1);
    BuildingMap::new("synthetic two-floor")
        .with_floor(Floor::new(0, "Ground Floor", g0))
        .with_floor(Floor::new(1, "First Floor", g1))
        .with_portal(Portal::new(
            PortalKind::Escalator,
            NodeRef {
                floor: crate::FloorId(0),
                cell: esc.0,
            },
            NodeRef {
                floor: crate::FloorId(1),
                cell: esc.1,
            },
        ))
        .with_poi(Poi::new(
            "Entrance",
            NodeRef {
                floor: crate::FloorId(0),
                cell: poi0,
            },
        ))
        .with_poi(Poi::new(
            "Food Court",
            NodeRef {
                floor: crate::FloorId(1),
                cell: poi1,
            },
        ))
}

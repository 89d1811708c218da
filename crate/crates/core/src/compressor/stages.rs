use super::replay::{replay_from, ReplayError};
use super::{CompressError, Step, TerseCommand, TerseScript, Transit};
use crate::gridmap::{BuildingMap, NodeRef};
use crate::num::Scalar;
use crate::planner::{step_target, CornerRule, Direction, Path};

/// Per-stage work counters, for checking that compression stays linear.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CompressStats {
    pub vectorize_ops: usize,
    pub rle_ops: usize,
    pub collapse_ops: usize,
    pub merge_ops: usize,
}

impl CompressStats {
    pub fn total(&self) -> usize {
        self.vectorize_ops + self.rle_ops + self.collapse_ops + self.merge_ops
    }
}

/// Maps each consecutive node pair to a compass step or a portal transit.
pub fn vectorize<S: Scalar>(
    path: &Path<S>,
    map: &BuildingMap<S>,
) -> Result<Vec<Step>, CompressError> {
    let mut out = Vec::with_capacity(path.edge_count());
    for (index, w) in path.nodes.windows(2).enumerate() {
        out.push(
            classify_pair(w[0], w[1], map).ok_or(CompressError::NonAdjacentPair {
                index,
                from: w[0],
                to: w[1],
            })?,
        );
    }
    Ok(out)
}

fn classify_pair<S: Scalar>(from: NodeRef, to: NodeRef, map: &BuildingMap<S>) -> Option<Step> {
    if from.floor == to.floor {
        let di = to.cell.i as isize - from.cell.i as isize;
        let dj = to.cell.j as isize - from.cell.j as isize;
        if let Some(d) = Direction::from_offset(di, dj) {
            return Some(Step::Move(d));
        }
    }
    map.portal_between(from, to).map(|p| {
        Step::Portal(Transit {
            kind: p.kind,
            from_floor: from.floor,
            to_floor: to.floor,
        })
    })
}

/// Single linear scan folding maximal runs of equal moves into counts.
/// Portal markers are never merged.
pub fn rle(steps: &[Step]) -> Vec<TerseCommand> {
    rle_counted(steps, &mut 0)
}

fn rle_counted(steps: &[Step], ops: &mut usize) -> Vec<TerseCommand> {
    let mut out: Vec<TerseCommand> = Vec::new();
    for step in steps {
        *ops += 1;
        match *step {
            Step::Move(d) => match out.last_mut() {
                Some(TerseCommand::Move { dir, count }) if *dir == d => *count += 1,
                _ => out.push(TerseCommand::Move { dir: d, count: 1 }),
            },
            Step::Portal(t) => out.push(TerseCommand::PortalTransit(t)),
        }
    }
    out
}

/// Inverse of [`rle`].
pub fn expand(commands: &[TerseCommand]) -> Vec<Step> {
    let mut out = Vec::new();
    for c in commands {
        match *c {
            TerseCommand::Move { dir, count } => {
                out.extend(std::iter::repeat_n(Step::Move(dir), count))
            }
            TerseCommand::PortalTransit(t) => out.push(Step::Portal(t)),
        }
    }
    out
}

/// Run-length pass over an already run-length list: adjacent moves with the
/// same heading are summed.
pub fn merge_runs(commands: Vec<TerseCommand>) -> Vec<TerseCommand> {
    merge_counted(commands, &mut 0)
}

fn merge_counted(commands: Vec<TerseCommand>, ops: &mut usize) -> Vec<TerseCommand> {
    let mut out: Vec<TerseCommand> = Vec::with_capacity(commands.len());
    for c in commands {
        *ops += 1;
        match (out.last_mut(), c) {
            (Some(TerseCommand::Move { dir, count }), TerseCommand::Move { dir: d, count: n })
                if *dir == d =>
            {
                *count += n
            }
            (_, TerseCommand::Move { count: 0, .. }) => {}
            _ => out.push(c),
        }
    }
    out
}

/// Replaces adjacent single-step perpendicular moves, e.g. `(S,1),(E,1)`,
/// by one diagonal `(SE,1)`, but only where that diagonal is an edge of the
/// grid under `rule`. Scans left to right, greedily, then merges the result.
pub fn diagonal_collapse<S: Scalar>(
    runs: &[TerseCommand],
    map: &BuildingMap<S>,
    origin: NodeRef,
    rule: CornerRule,
) -> Result<Vec<TerseCommand>, CompressError> {
    collapse_counted(runs, map, origin, rule, &mut CompressStats::default())
}

fn collapse_counted<S: Scalar>(
    runs: &[TerseCommand],
    map: &BuildingMap<S>,
    origin: NodeRef,
    rule: CornerRule,
    stats: &mut CompressStats,
) -> Result<Vec<TerseCommand>, CompressError> {
    if !map.is_free(origin) {
        return Err(ReplayError::BadOrigin(origin).into());
    }
    let mut out = Vec::with_capacity(runs.len());
    let mut at = origin;
    let mut k = 0;
    while k < runs.len() {
        stats.collapse_ops += 1;
        if let (
            TerseCommand::Move { dir: a, count: 1 },
            Some(TerseCommand::Move { dir: b, count: 1 }),
        ) = (runs[k], runs.get(k + 1).copied())
        {
            if let Some(diag) = a.combine(b) {
                let grid = map.grid(at.floor).ok_or(ReplayError::BadOrigin(at))?;
                if let Some(cell) = step_target(grid, at.cell, diag, rule) {
                    out.push(TerseCommand::Move {
                        dir: diag,
                        count: 1,
                    });
                    at = NodeRef {
                        floor: at.floor,
                        cell,
                    };
                    k += 2;
                    continue;
                }
            }
        }
        at = replay_from(at, &runs[k..=k], map, |_| stats.collapse_ops += 1)
            .map_err(|e| reindex(e, k))?
            .0;
        out.push(runs[k]);
        k += 1;
    }
    Ok(merge_counted(out, &mut stats.merge_ops))
}

fn reindex(e: ReplayError, k: usize) -> ReplayError {
    match e {
        ReplayError::CollisionDuringReplay { from, .. } => {
            ReplayError::CollisionDuringReplay { command: k, from }
        }
        ReplayError::NoPortalHere {
            at, kind, to_floor, ..
        } => ReplayError::NoPortalHere {
            command: k,
            at,
            kind,
            to_floor,
        },
        other => other,
    }
}

/// vectorize -> rle -> diagonal_collapse -> rle.
pub fn compress<S: Scalar>(
    path: &Path<S>,
    map: &BuildingMap<S>,
    rule: CornerRule,
) -> Result<TerseScript, CompressError> {
    compress_with_stats(path, map, rule).map(|(s, _)| s)
}

pub fn compress_with_stats<S: Scalar>(
    path: &Path<S>,
    map: &BuildingMap<S>,
    rule: CornerRule,
) -> Result<(TerseScript, CompressStats), CompressError> {
    let mut stats = CompressStats::default();
    let origin = path.start();
    let steps = vectorize(path, map)?;
    stats.vectorize_ops = steps.len();
    let runs = rle_counted(&steps, &mut stats.rle_ops);
    let collapsed = collapse_counted(&runs, map, origin, rule, &mut stats)?;
    let commands = merge_counted(collapsed, &mut stats.merge_ops);
    Ok((TerseScript { origin, commands }, stats))
}

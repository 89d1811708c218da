//! Seeded timing and determinism harness.
//!
//! For each map, random free origin/destination pairs are drawn from a
//! seeded ChaCha stream. Pairs that coincide or have no route are redrawn
//! and counted. Every accepted pair is routed `repeats` times; the first
//! run supplies the timing sample and all runs must agree on nodes, terse
//! script and guide.

use std::time::Instant;

use floorwalk::compressor::{compress, render_terse};
use floorwalk::narrator::render_template;
use floorwalk::planner::{astar, PlanError};
use floorwalk::{BuildingMap, CornerRule, NodeRef};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::protocol::NodeJson;

pub const BENCH_SCHEMA: &str = "floorwalk.bench/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub trials: usize,
    pub repeats: usize,
    pub seed: u64,
    pub corner_rule: CornerRule,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            trials: 20,
            repeats: 2,
            seed: 0,
            corner_rule: CornerRule::Permissive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub p95_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

impl Summary {
    /// Median averages the two middle samples for even counts; p95 is the
    /// nearest-rank percentile.
    pub fn from_samples(samples: &[f64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let mut s = samples.to_vec();
        s.sort_by(f64::total_cmp);
        let n = s.len();
        let median = if n % 2 == 1 {
            s[n / 2]
        } else {
            (s[n / 2 - 1] + s[n / 2]) / 2.0
        };
        let rank = ((0.95 * n as f64).ceil() as usize).clamp(1, n);
        Some(Self {
            count: n,
            mean_ms: s.iter().sum::<f64>() / n as f64,
            median_ms: median,
            p95_ms: s[rank - 1],
            min_ms: s[0],
            max_ms: s[n - 1],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub origin: NodeJson,
    pub destination: NodeJson,
    pub cost: f64,
    pub edges: usize,
    pub expanded_nodes: usize,
    pub search_ms: f64,
    pub end_to_end_ms: f64,
    pub identical: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapBench {
    pub map: String,
    pub cells: usize,
    pub blocked_fraction: f64,
    pub trials: usize,
    pub resampled: usize,
    pub search: Summary,
    pub end_to_end: Summary,
    pub identical_trials: usize,
    pub deterministic: bool,
    pub samples: Vec<TrialRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedMap {
    pub map: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema: String,
    pub config: BenchConfig,
    pub maps: Vec<MapBench>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<SkippedMap>,
}

impl BenchReport {
    pub fn all_deterministic(&self) -> bool {
        self.maps.iter().all(|m| m.deterministic)
    }

    /// One summary row per map.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "map",
            "cells",
            "blocked_fraction",
            "trials",
            "resampled",
            "search_mean_ms",
            "search_median_ms",
            "search_p95_ms",
            "end_to_end_mean_ms",
            "identical_trials",
            "deterministic",
        ])
        .expect("write to memory");
        for m in &self.maps {
            w.write_record([
                m.map.clone(),
                m.cells.to_string(),
                format!("{:.4}", m.blocked_fraction),
                m.trials.to_string(),
                m.resampled.to_string(),
                format!("{:.4}", m.search.mean_ms),
                format!("{:.4}", m.search.median_ms),
                format!("{:.4}", m.search.p95_ms),
                format!("{:.4}", m.end_to_end.mean_ms),
                m.identical_trials.to_string(),
                m.deterministic.to_string(),
            ])
            .expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
    }
}

#[derive(PartialEq)]
struct RunOutput {
    nodes: Vec<NodeRef>,
    terse: Vec<String>,
    guide: Vec<String>,
}

fn run_once(
    map: &BuildingMap,
    s: NodeRef,
    g: NodeRef,
    rule: CornerRule,
) -> Result<(RunOutput, f64, f64, f64, usize), PlanError> {
    let t0 = Instant::now();
    let path = astar(map, s, g, rule)?;
    let search_ms = t0.elapsed().as_secs_f64() * 1e3;
    let script = compress(&path, map, rule).expect("planner output compresses");
    let guide = render_template(&script).expect("non-empty script");
    let e2e_ms = t0.elapsed().as_secs_f64() * 1e3;
    let out = RunOutput {
        nodes: path.nodes,
        terse: render_terse(&script),
        guide: guide.render(),
    };
    Ok((
        out,
        search_ms,
        e2e_ms,
        path.total_cost,
        path.stats.expanded_nodes,
    ))
}

/// Benchmarks one map. Fails only when no routable pair can be found.
pub fn bench_map(id: &str, map: &BuildingMap, cfg: &BenchConfig) -> Result<MapBench, String> {
    let free: Vec<NodeRef> = map
        .floors
        .iter()
        .flat_map(|f| {
            f.grid.free_cells().map(move |c| NodeRef {
                floor: f.id,
                cell: c,
            })
        })
        .collect();
    if free.len() < 2 {
        return Err("fewer than two free cells".into());
    }
    let cells: usize = map.floors.iter().map(|f| f.grid.len()).sum();
    let blocked = cells - free.len();
    let trials = cfg.trials.max(1);
    let repeats = cfg.repeats.max(1);
    let max_draws = trials * 1000;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut samples = Vec::with_capacity(trials);
    let mut resampled = 0;
    let mut draws = 0;
    while samples.len() < trials {
        if draws == max_draws {
            return Err(format!("no routable pair after {max_draws} draws"));
        }
        draws += 1;
        let s = free[rng.random_range(0..free.len())];
        let g = free[rng.random_range(0..free.len())];
        if s == g {
            resampled += 1;
            continue;
        }
        let (first, search_ms, e2e_ms, cost, expanded) = match run_once(map, s, g, cfg.corner_rule)
        {
            Ok(r) => r,
            Err(PlanError::NoPath { .. }) => {
                resampled += 1;
                continue;
            }
            Err(e) => return Err(e.to_string()),
        };
        let identical =
            (1..repeats).all(|_| run_once(map, s, g, cfg.corner_rule).is_ok_and(|r| r.0 == first));
        samples.push(TrialRecord {
            trial: samples.len(),
            origin: s.into(),
            destination: g.into(),
            cost,
            edges: first.nodes.len() - 1,
            expanded_nodes: expanded,
            search_ms,
            end_to_end_ms: e2e_ms,
            identical,
        });
    }
    let search: Vec<f64> = samples.iter().map(|t| t.search_ms).collect();
    let e2e: Vec<f64> = samples.iter().map(|t| t.end_to_end_ms).collect();
    let identical_trials = samples.iter().filter(|t| t.identical).count();
    Ok(MapBench {
        map: id.to_owned(),
        cells,
        blocked_fraction: blocked as f64 / cells as f64,
        trials: samples.len(),
        resampled,
        search: Summary::from_samples(&search).expect("at least one trial"),
        end_to_end: Summary::from_samples(&e2e).expect("at least one trial"),
        identical_trials,
        deterministic: identical_trials == samples.len(),
        samples,
    })
}

pub fn run_bench<'a>(
    maps: impl IntoIterator<Item = (&'a str, &'a BuildingMap)>,
    cfg: &BenchConfig,
) -> BenchReport {
    let mut report = BenchReport {
        schema: BENCH_SCHEMA.to_owned(),
        config: *cfg,
        maps: Vec::new(),
        skipped: Vec::new(),
    };
    for (id, map) in maps {
        match bench_map(id, map, cfg) {
            Ok(m) => report.maps.push(m),
            Err(reason) => {
                log::warn!("skipping map '{id}': {reason}");
                report.skipped.push(SkippedMap {
                    map: id.to_owned(),
                    reason,
                });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use floorwalk::gridmap::OccupancyGrid;

    #[test]
    fn summary_statistics() {
        let s = Summary::from_samples(&[5.0, 1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!(
            (s.median_ms, s.mean_ms, s.p95_ms, s.min_ms, s.max_ms),
            (3.0, 3.0, 5.0, 1.0, 5.0)
        );
        let s = Summary::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.median_ms, 2.5);
        let twenty: Vec<f64> = (1..=20).map(f64::from).collect();
        assert_eq!(Summary::from_samples(&twenty).unwrap().p95_ms, 19.0);
        assert!(Summary::from_samples(&[]).is_none());
    }

    #[test]
    fn tiny_map_single_trial() {
        let m = BuildingMap::single_floor("t", OccupancyGrid::new_free(1, 2).unwrap());
        let cfg = BenchConfig {
            trials: 1,
            ..BenchConfig::default()
        };
        let r = bench_map("t", &m, &cfg).unwrap();
        assert_eq!(r.trials, 1);
        assert!(r.deterministic);
    }

    #[test]
    fn single_cell_map_is_skipped() {
        let m = BuildingMap::single_floor("t", OccupancyGrid::new_free(1, 1).unwrap());
        let r = run_bench([("t", &m)], &BenchConfig::default());
        assert!(r.maps.is_empty());
        assert_eq!(r.skipped.len(), 1);
    }

    #[test]
    fn disconnected_pairs_are_resampled() {
        let g = OccupancyGrid::from_row_strings(&["11011", "11011"]).unwrap();
        let m = BuildingMap::single_floor("split", g);
        let r = bench_map(
            "split",
            &m,
            &BenchConfig {
                seed: 3,
                ..BenchConfig::default()
            },
        )
        .unwrap();
        assert_eq!(r.trials, 20);
        assert!(r.resampled > 0);
        for t in &r.samples {
            assert_eq!((t.origin.j < 2), (t.destination.j < 2));
        }
    }
}

//! Acceptance checks. Each criterion prints one PASS/FAIL line and the
//! process exits non-zero if any fails. Runs without the libtest harness so
//! the lines always show and timings are not disturbed by sibling tests.

mod common;

use std::process::Command;
use std::time::Instant;

use common::*;
use floorwalk::compressor::{
    compress, diagonal_collapse, expand, merge_runs, render_terse, replay_trace, rle, Step,
    TerseCommand, TerseScript,
};
use floorwalk::gridmap::OccupancyGrid;
use floorwalk::narrator::{
    narrate_traced, render_template, FallbackReason, GuideSource, LmConfig, LmEndpoint,
    NarrateMode, SystemPrompt,
};
use floorwalk::planner::{astar, dijkstra_oracle, PlanError};
use floorwalk::synth::random_grid;
use floorwalk::{BuildingMap, CornerRule, Direction, NodeRef, Path, PortalKind};
use floorwalk_service::bench::{bench_map, BenchConfig, Summary};
use floorwalk_service::protocol::RouteRequest;
use floorwalk_service::route::{plan_route, NarratorSettings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(name: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome { name, pass, detail }
}

/// Routed instances shared by several criteria.
struct Instance {
    map: BuildingMap,
    path: Path,
    rule: CornerRule,
}

fn optimality(instances: &mut Vec<Instance>) -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0a5ea);
    let (grids, mut solvable, mut agree, mut both_unsolvable, mut mismatches) = (240, 0, 0, 0, 0);
    let mut worst: f64 = 0.0;
    for k in 0..grids {
        let rows = rng.random_range(10..=50);
        let cols = rng.random_range(10..=50);
        let density = rng.random_range(0.0..=0.4);
        let rule = if k % 2 == 0 {
            CornerRule::Permissive
        } else {
            CornerRule::Strict
        };
        let grid = random_grid(rows, cols, density, rng.random());
        let free: Vec<_> = grid.free_cells().collect();
        let s = free[rng.random_range(0..free.len())];
        let g = free[rng.random_range(0..free.len())];
        let map = BuildingMap::single_floor("random", grid);
        let (s, g) = (NodeRef::new(0, s.i, s.j), NodeRef::new(0, g.i, g.j));
        match (astar(&map, s, g, rule), dijkstra_oracle(&map, s, g, rule)) {
            (Ok(p), Ok(o)) => {
                solvable += 1;
                let d = (p.total_cost - o.total_cost).abs();
                worst = worst.max(d);
                if d <= 1e-9 {
                    agree += 1;
                }
                instances.push(Instance { map, path: p, rule });
            }
            (Err(PlanError::NoPath { .. }), Err(PlanError::NoPath { .. })) => both_unsolvable += 1,
            _ => mismatches += 1,
        }
    }
    let pass = agree == solvable && mismatches == 0 && grids >= 200;
    outcome(
        "optimality oracle equivalence",
        pass,
        format!(
            "{grids} grids, {agree}/{solvable} solvable agree (max |diff| {worst:.1e}), {both_unsolvable} unsolvable by both, {mismatches} solvability mismatches, {:.1} s",
            t0.elapsed().as_secs_f64()
        ),
    )
}

fn determinism() -> Outcome {
    let settings = NarratorSettings::default();
    let mut queries: Vec<(&str, BuildingMap, String, String)> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for (id, map) in [
        ("concourse", concourse()),
        ("mall", mall()),
        ("hall", hall()),
    ] {
        let names: Vec<String> = map.pois.iter().map(|p| p.name.clone()).collect();
        queries.push((
            id,
            map.clone(),
            names[0].clone(),
            names[names.len() - 1].clone(),
        ));
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
        for _ in 0..2 {
            let (a, b) = (
                free[rng.random_range(0..free.len())],
                free[rng.random_range(0..free.len())],
            );
            if a != b && astar(&map, a, b, CornerRule::Permissive).is_ok() {
                queries.push((id, map.clone(), a.to_string(), b.to_string()));
            }
        }
    }
    let (mut identical, mut total) = (0, 0);
    for (id, map, from, to) in &queries {
        let req = RouteRequest::new(from.clone(), to.clone());
        let first = plan_route(id, map, &req, &settings).unwrap();
        let key = |r: &floorwalk_service::protocol::RouteResponse| {
            format!(
                "{}\n{}",
                serde_json::to_string(&r.path).unwrap(),
                r.route_section()
            )
        };
        let reference = key(&first);
        for _ in 0..20 {
            total += 1;
            if key(&plan_route(id, map, &req, &settings).unwrap()) == reference {
                identical += 1;
            }
        }
    }
    outcome(
        "determinism",
        identical == total,
        format!(
            "{} queries on 3 fixture maps x 20 repeats: {identical}/{total} byte-identical",
            queries.len()
        ),
    )
}

fn latency() -> (Outcome, Summary) {
    let map = concourse();
    let g = &map.floors[0].grid;
    let cfg = BenchConfig {
        trials: 20,
        repeats: 1,
        seed: 1,
        corner_rule: CornerRule::Permissive,
    };
    let r = bench_map("concourse", &map, &cfg).unwrap();
    let s = r.search;
    let out = outcome(
        "search latency",
        s.median_ms <= 50.0,
        format!(
            "{}x{} grid, {:.1}% blocked, {} trials: median {:.3} ms, mean {:.3} ms, p95 {:.3} ms (reference 4.14 ms mean, limit 50 ms median)",
            g.rows(),
            g.cols(),
            100.0 * g.blocked_fraction(),
            r.trials,
            s.median_ms,
            s.mean_ms,
            s.p95_ms
        ),
    );
    (out, s)
}

fn multi_floor() -> Outcome {
    let map = mall();
    let cfg = BenchConfig {
        trials: 20,
        repeats: 1,
        seed: 2,
        corner_rule: CornerRule::Permissive,
    };
    let singles: Vec<Summary> = map
        .floors
        .iter()
        .map(|f| {
            bench_map(
                &f.label,
                &BuildingMap::single_floor(f.label.clone(), f.grid.clone()),
                &cfg,
            )
            .unwrap()
            .search
        })
        .collect();
    let free0: Vec<_> = map.floors[0].grid.free_cells().collect();
    let free1: Vec<_> = map.floors[1].grid.free_cells().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut times = Vec::new();
    while times.len() < 20 {
        let a = free0[rng.random_range(0..free0.len())];
        let b = free1[rng.random_range(0..free1.len())];
        let t = Instant::now();
        if astar(
            &map,
            NodeRef::new(0, a.i, a.j),
            NodeRef::new(1, b.i, b.j),
            CornerRule::Permissive,
        )
        .is_ok()
        {
            times.push(t.elapsed().as_secs_f64() * 1e3);
        }
    }
    let multi = Summary::from_samples(&times).unwrap();
    let larger = singles.iter().map(|s| s.median_ms).fold(0.0, f64::max);
    let ratio = multi.median_ms / larger;
    outcome(
        "multi-floor overhead",
        ratio <= 4.0,
        format!(
            "floors {}x{} and {}x{}: single-floor medians {:.3} / {:.3} ms, cross-floor median {:.3} ms, ratio {ratio:.2} (reference 8.80 / 4.23 = 2.08, limit 4)",
            map.floors[0].grid.rows(),
            map.floors[0].grid.cols(),
            map.floors[1].grid.rows(),
            map.floors[1].grid.cols(),
            singles[0].median_ms,
            singles[1].median_ms,
            multi.median_ms
        ),
    )
}

fn compression(instances: &[Instance]) -> Outcome {
    let mut failures = Vec::new();
    for (k, inst) in instances.iter().enumerate() {
        let script = match compress(&inst.path, &inst.map, inst.rule) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("#{k}: {e}"));
                continue;
            }
        };
        match replay_trace(&script, &inst.map) {
            Ok(t) if t.end() != inst.path.goal() => {
                failures.push(format!("#{k}: ends at {}", t.end()))
            }
            Ok(t) if t.cost > inst.path.total_cost + 1e-9 => failures.push(format!(
                "#{k}: script cost {} > path cost {}",
                t.cost, inst.path.total_cost
            )),
            Ok(_) => {}
            Err(e) => failures.push(format!("#{k}: {e}")),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut rle_ok = 0;
    for _ in 0..1000 {
        let len = rng.random_range(0..=100);
        let steps: Vec<Step> = (0..len)
            .map(|_| Step::Move(Direction::ALL[rng.random_range(0..8)]))
            .collect();
        let runs = rle(&steps);
        if expand(&runs) == steps && rle(&expand(&runs)) == runs {
            rle_ok += 1;
        }
    }
    outcome(
        "compression correctness",
        failures.is_empty() && rle_ok == 1000,
        format!(
            "{} routed instances replay to goal, collision-free, cost non-increasing ({} failures{}); RLE round-trip {rle_ok}/1000",
            instances.len(),
            failures.len(),
            failures.first().map(|f| format!(", first: {f}")).unwrap_or_default()
        ),
    )
}

fn worked_examples() -> Outcome {
    use Direction::*;
    let go = TerseCommand::go;
    let mut checks = Vec::new();

    let steps: Vec<Step> = [E, E, E, E, E, S, S].into_iter().map(Step::Move).collect();
    checks.push((
        "[E x5, S x2] -> [(E,5),(S,2)]",
        rle(&steps) == vec![go(E, 5), go(S, 2)],
    ));

    let open = BuildingMap::single_floor("open", OccupancyGrid::new_free(3, 3).unwrap());
    let collapsed = diagonal_collapse(
        &[go(S, 1), go(E, 1)],
        &open,
        NodeRef::new(0, 0, 0),
        CornerRule::Permissive,
    );
    checks.push((
        "(S,1)+(E,1) -> (SE,1)",
        collapsed.ok() == Some(vec![go(SE, 1)]),
    ));

    checks.push((
        "(SE,1)+(SE,1) -> (SE,2)",
        merge_runs(vec![go(SE, 1), go(SE, 1)]) == vec![go(SE, 2)],
    ));

    let script = TerseScript {
        origin: NodeRef::new(0, 0, 0),
        commands: vec![go(SE, 5), go(N, 3), go(E, 2)],
    };
    checks.push((
        "[(SE,5),(N,3),(E,2)] renders three lines",
        render_terse(&script) == ["Go SE 5 steps", "Go N 3 steps", "Go E 2 steps"],
    ));

    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(
        "worked examples",
        failed.is_empty(),
        if failed.is_empty() {
            format!("{}/{} exact matches", checks.len(), checks.len())
        } else {
            format!("mismatch: {}", failed.join("; "))
        },
    )
}

/// Numbered-line pattern, consecutive indices, counts, directions and
/// portal sentences.
fn contract_violation(script: &TerseScript, lines: &[String]) -> Option<String> {
    let pattern = Regex::new(r"^(\d+)\. \S.*$").unwrap();
    if lines.len() != script.commands.len() {
        return Some(format!(
            "{} lines for {} commands",
            lines.len(),
            script.commands.len()
        ));
    }
    for (k, (line, cmd)) in lines.iter().zip(&script.commands).enumerate() {
        let Some(caps) = pattern.captures(line) else {
            return Some(format!("pattern: {line:?}"));
        };
        if caps[1].parse::<usize>().ok() != Some(k + 1) {
            return Some(format!("index: {line:?}"));
        }
        let words: Vec<&str> = line.split(|c: char| !c.is_ascii_alphanumeric()).collect();
        let ok = match *cmd {
            TerseCommand::Move { dir, count } => {
                words.contains(&count.to_string().as_str()) && words.contains(&dir.word())
            }
            TerseCommand::PortalTransit(t) => line.contains(&t.to_string()),
        };
        if !ok {
            return Some(format!("content: {line:?} for {cmd}"));
        }
    }
    None
}

fn narrator(instances: &[Instance]) -> Outcome {
    let mut scripts: Vec<TerseScript> = instances
        .iter()
        .map(|i| compress(&i.path, &i.map, i.rule).unwrap())
        .collect();
    for (map, from, to) in [
        (concourse(), "Gate A", "Gate B"),
        (mall(), "Entrance", "Food Court"),
        (hall(), "West", "East"),
    ] {
        let (a, b) = (
            map.find_poi(from).unwrap().location,
            map.find_poi(to).unwrap().location,
        );
        let p = astar(&map, a, b, CornerRule::Permissive).unwrap();
        scripts.push(compress(&p, &map, CornerRule::Permissive).unwrap());
    }
    let mut bad = Vec::new();
    for s in &scripts {
        let g = render_template(s).unwrap();
        if let Some(v) = contract_violation(s, &g.render()) {
            bad.push(v);
        }
    }

    // Stub endpoint answering with the published prompt's own example.
    let addr = stub_completion_server(MALFORMED_EXAMPLE);
    let example = TerseScript {
        origin: NodeRef::new(0, 0, 0),
        commands: vec![
            TerseCommand::go(Direction::E, 3),
            TerseCommand::transit(PortalKind::Escalator, 0, 1),
            TerseCommand::go(Direction::N, 1),
        ],
    };
    let mode = NarrateMode::LanguageModel {
        config: LmConfig::new(LmEndpoint::Tcp { addr }),
        system: SystemPrompt::default(),
    };
    let (guide, why) = narrate_traced(&example, &mode).unwrap();
    let fell_back =
        matches!(why, Some(FallbackReason::Rejected(_))) && guide.source == GuideSource::Template;
    let lm_contract = contract_violation(&example, &guide.render());
    outcome(
        "narrator format contract",
        bad.is_empty() && fell_back && lm_contract.is_none(),
        format!(
            "template: {}/{} guides conform{}; lm stub with \"1., 2., 2.\" numbering: fallback {}, {}",
            scripts.len() - bad.len(),
            scripts.len(),
            bad.first().map(|b| format!(" (first violation {b})")).unwrap_or_default(),
            if fell_back { "triggered" } else { "NOT triggered" },
            lm_contract.map(|v| format!("output violates contract: {v}")).unwrap_or_else(|| "output conforms".into())
        ),
    )
}

fn end_to_end() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let bundle = write_bundle(dir.path(), "mall", &mall());
    let t = Instant::now();
    let o = Command::new(bin())
        .args(["route", bundle.to_str().unwrap(), "Entrance", "Food Court"])
        .output()
        .unwrap();
    let elapsed = t.elapsed().as_secs_f64();
    let text = String::from_utf8_lossy(&o.stdout);
    let has = |s: &str| text.contains(s);
    let pass = o.status.success()
        && has("cost: ")
        && has("terse:\n")
        && has("guide:\n")
        && has("Take the escalator from Floor 0 to 1")
        && elapsed < 1.0;
    outcome(
        "end-to-end CLI",
        pass,
        format!(
            "exit {:?}, cost/terse/guide present: {}, escalator line: {}, wall time {:.3} s (limit 1 s)",
            o.status.code(),
            has("cost: ") && has("terse:\n") && has("guide:\n"),
            has("Take the escalator from Floor 0 to 1"),
            elapsed
        ),
    )
}

fn main() {
    let mut instances = Vec::new();
    let mut results = vec![optimality(&mut instances), determinism()];
    results.push(latency().0);
    results.push(multi_floor());
    results.push(compression(&instances));
    results.push(worked_examples());
    results.push(narrator(&instances));
    results.push(end_to_end());

    for r in &results {
        println!(
            "{} {}: {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.name).collect();
    println!(
        "acceptance: {}/{} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

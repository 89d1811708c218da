//! `floorwalk` command-line front end.

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use floorwalk::gridmap::{
    binarize_mask, load_bundle, save_bundle, suggest_dimensions, BinarizeParams, Floor, GrayMask,
    LuminanceCutoff,
};
use floorwalk::narrator::{LmConfig, LmEndpoint, SystemPrompt};
use floorwalk::{BuildingMap, CornerRule};

use crate::bench::{run_bench, BenchConfig};
use crate::protocol::{ErrorCode, NarrateChoice, RouteRequest, ServiceError};
use crate::route::{plan_route, NarratorSettings};
use crate::server::{serve, AppState};
use crate::store::{map_id, MapStore};

#[derive(Parser, Debug)]
#[command(
    name = "floorwalk",
    version,
    about = "Indoor route planning on occupancy-grid floor plans"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Binarize a floor-plan mask image into a single-floor bundle.
    BuildGrid(BuildGridArgs),
    /// Plan a route and print cost, terse commands, guide and timings.
    Route(RouteArgs),
    /// Serve a directory of bundles over HTTP.
    Serve(ServeArgs),
    /// Time seeded random routes and check run-to-run identity.
    Bench(BenchArgs),
    /// Check bundles for schema and map-invariant errors.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
pub struct BuildGridArgs {
    /// Mask image; dark pixels are obstacles.
    pub image: PathBuf,
    /// Output bundle path.
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, requires = "cols")]
    pub rows: Option<usize>,
    #[arg(long, requires = "rows")]
    pub cols: Option<usize>,
    /// Longer grid side when --rows/--cols are omitted.
    #[arg(long, default_value_t = 130)]
    pub max_dim: usize,
    /// A cell is blocked when more than this fraction of its pixels are dark.
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Pixels darker than this 8-bit value count as obstacles.
    #[arg(long, default_value_t = 128)]
    pub cutoff: u8,
    /// Map name; defaults to the image file stem.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, default_value = "Ground Floor")]
    pub floor_label: String,
    #[arg(long)]
    pub meters_per_cell: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct LmArgs {
    /// Completion server `host:port`.
    #[arg(long, conflicts_with = "lm_cmd")]
    pub lm_tcp: Option<String>,
    /// Completion program speaking the same protocol on stdin/stdout.
    #[arg(long)]
    pub lm_cmd: Option<String>,
    #[arg(long = "lm-arg", allow_hyphen_values = true)]
    pub lm_args: Vec<String>,
    #[arg(long, default_value_t = 30_000)]
    pub lm_timeout_ms: u64,
    /// File replacing the default system prompt.
    #[arg(long)]
    pub lm_system_prompt: Option<PathBuf>,
}

impl LmArgs {
    fn settings(&self) -> Result<NarratorSettings, ServiceError> {
        let endpoint = match (&self.lm_tcp, &self.lm_cmd) {
            (Some(addr), _) => LmEndpoint::Tcp { addr: addr.clone() },
            (None, Some(program)) => LmEndpoint::Process {
                program: program.clone(),
                args: self.lm_args.clone(),
            },
            (None, None) => return Ok(NarratorSettings::default()),
        };
        let system = match &self.lm_system_prompt {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    ServiceError::new(ErrorCode::BadRequest, format!("{}: {e}", p.display()))
                })?;
                SystemPrompt::new(text)
                    .map_err(|e| ServiceError::new(ErrorCode::BadRequest, e.to_string()))?
            }
            None => SystemPrompt::default(),
        };
        let config =
            LmConfig::new(endpoint).with_timeout(Duration::from_millis(self.lm_timeout_ms));
        config
            .validate()
            .map_err(|e| ServiceError::new(ErrorCode::BadRequest, e.to_string()))?;
        Ok(NarratorSettings {
            lm: Some((config, system)),
        })
    }
}

#[derive(Args, Debug)]
pub struct RouteArgs {
    pub bundle: PathBuf,
    /// POI name or `floor:i:j`.
    pub origin: String,
    /// POI name or `floor:i:j`.
    pub destination: String,
    #[arg(long, default_value_t = CornerRule::Permissive)]
    pub corner_rule: CornerRule,
    #[arg(long, default_value = "template")]
    pub narrate: NarrateChoice,
    /// Print the response document as JSON instead of text.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub lm: LmArgs,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    /// Directory of `*.json` bundles; the file stem is the map id.
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    /// Maximum concurrent language-model calls.
    #[arg(long, default_value_t = 2)]
    pub lm_in_flight: usize,
    #[command(flatten)]
    pub lm: LmArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(required = true)]
    pub bundles: Vec<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Runs per pair for the identity check.
    #[arg(long, default_value_t = 2)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = CornerRule::Permissive)]
    pub corner_rule: CornerRule,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub format: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(required = true)]
    pub bundles: Vec<PathBuf>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> ServiceError {
    ServiceError::new(ErrorCode::PersistFailed, format!("{}: {e}", path.display()))
}

fn build_grid(a: &BuildGridArgs) -> Result<(), ServiceError> {
    let img = image::open(&a.image)
        .map_err(|e| {
            ServiceError::new(ErrorCode::BadRequest, format!("{}: {e}", a.image.display()))
        })?
        .to_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let bad =
        |e: floorwalk::gridmap::GridError| ServiceError::new(ErrorCode::BadRequest, e.to_string());
    let (rows, cols) = match (a.rows, a.cols) {
        (Some(r), Some(c)) => (r, c),
        _ => suggest_dimensions(w, h, a.max_dim).map_err(bad)?,
    };
    let params = BinarizeParams::new(rows, cols)
        .with_threshold(a.threshold)
        .with_cutoff(LuminanceCutoff::Below(a.cutoff));
    let mask = GrayMask::new(w, h, img.as_raw()).map_err(bad)?;
    let grid = binarize_mask(mask, &params).map_err(bad)?;
    let stem = map_id(&a.image).unwrap_or_else(|| "map".into());
    let mut floor = Floor::new(0, a.floor_label.clone(), grid);
    floor.source_image = a
        .image
        .file_name()
        .and_then(|n| n.to_str())
        .map(str::to_owned);
    let mut map = BuildingMap::new(a.name.clone().unwrap_or(stem)).with_floor(floor);
    map.meters_per_cell = a.meters_per_cell;
    save_bundle(&map, &a.out)?;
    let g = &map.floors[0].grid;
    println!(
        "wrote {} ({}x{} grid, {:.1}% blocked)",
        a.out.display(),
        g.rows(),
        g.cols(),
        100.0 * g.blocked_fraction()
    );
    Ok(())
}

fn route(a: &RouteArgs) -> Result<(), ServiceError> {
    let map: BuildingMap = load_bundle(&a.bundle)?;
    let id = map_id(&a.bundle).unwrap_or_default();
    let req = RouteRequest {
        schema: None,
        origin: a.origin.clone(),
        destination: a.destination.clone(),
        corner_rule: a.corner_rule,
        narrate: a.narrate,
    };
    let resp = plan_route(&id, &map, &req, &a.lm.settings()?)?;
    let mut out = std::io::stdout().lock();
    let text = if a.json {
        serde_json::to_string_pretty(&resp).expect("response serializes") + "\n"
    } else {
        format!("{}{}\n", resp.route_section(), resp.timings_line())
    };
    out.write_all(text.as_bytes())
        .map_err(|e| ServiceError::new(ErrorCode::Internal, e.to_string()))
}

fn serve_cmd(a: &ServeArgs) -> Result<(), ServiceError> {
    let store = MapStore::open(&a.dir)?;
    let state = Arc::new(AppState::new(store, a.lm.settings()?, a.lm_in_flight));
    let rt = tokio::runtime::Runtime::new()
        .map_err(|e| ServiceError::new(ErrorCode::Internal, e.to_string()))?;
    rt.block_on(serve(state, a.bind))
        .map_err(|e| ServiceError::new(ErrorCode::Internal, format!("{}: {e}", a.bind)))
}

fn bench(a: &BenchArgs) -> Result<bool, ServiceError> {
    let mut maps = Vec::new();
    for p in &a.bundles {
        let m: BuildingMap = load_bundle(p)?;
        maps.push((map_id(p).unwrap_or_default(), m));
    }
    let cfg = BenchConfig {
        trials: a.trials,
        repeats: a.repeats,
        seed: a.seed,
        corner_rule: a.corner_rule,
    };
    let report = run_bench(maps.iter().map(|(id, m)| (id.as_str(), m)), &cfg);
    let text = match a.format {
        ReportFormat::Csv => report.to_csv(),
        ReportFormat::Json => {
            serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
        }
    };
    match &a.out {
        Some(p) => std::fs::write(p, text).map_err(|e| io_err(p, e))?,
        None => print!("{text}"),
    }
    Ok(report.all_deterministic())
}

fn validate(a: &ValidateArgs) -> bool {
    let mut ok = true;
    for p in &a.bundles {
        match load_bundle::<f64>(p) {
            Ok(m) => println!(
                "ok {}: {} floor(s), {} POI(s), {} portal(s)",
                p.display(),
                m.floors.len(),
                m.pois.len(),
                m.portals.len()
            ),
            Err(e) => {
                ok = false;
                println!("invalid {}: {e}", p.display());
            }
        }
    }
    ok
}

/// Runs the parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::BuildGrid(a) => build_grid(a).map(|_| true),
        Command::Route(a) => route(a).map(|_| true),
        Command::Serve(a) => serve_cmd(a).map(|_| true),
        Command::Bench(a) => bench(a),
        Command::Validate(a) => Ok(validate(a)),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.code.exit_code()
        }
    }
}

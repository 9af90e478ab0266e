//! `cubq` argument parsing and dispatch.
//!
//! Exit codes: 0 on success, 2 on invalid input (including usage errors),
//! 1 when a computation or I/O step fails.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use cubiclab::classify::Budgets;
use cubiclab::grid::Window;
use cubiclab::Complex64;
use serde::Serialize;

use crate::config::{self, ServiceConfig};
use crate::jobs::{self, HullJob, PetalJob, PointJob, RaysJob, SliceJob};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cubq", version, about = "Explore the cubic family λz + bz² + z³")]
pub struct Cli {
    /// Key-value file supplying defaults for any flag.
    #[arg(long, global = true, env = "CUBQ_CONFIG")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a parameter-plane slice and write a tile plus JSON sidecar.
    #[command(allow_negative_numbers = true)]
    Slice(SliceArgs),
    /// Classify one map and print its component type.
    #[command(allow_negative_numbers = true)]
    Classify(ClassifyArgs),
    /// Build and check the attracting petals at a parabolic multiplier.
    #[command(allow_negative_numbers = true)]
    Petal(PetalArgs),
    /// Trace periodic external rays and report co-landing pairs.
    #[command(allow_negative_numbers = true)]
    Rays(RaysArgs),
    /// Recompute the topological hull of a stored slice tile.
    Hull(HullArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct LambdaArgs {
    #[arg(long, default_value_t = 0.0)]
    pub lambda_re: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda_im: f64,
}

impl LambdaArgs {
    fn value(&self) -> Complex64 {
        Complex64::new(self.lambda_re, self.lambda_im)
    }
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub lambda: LambdaArgs,
    #[arg(long, default_value_t = 0.0)]
    pub b_re: f64,
    #[arg(long, default_value_t = 0.0)]
    pub b_im: f64,
}

impl PointArgs {
    fn b(&self) -> Complex64 {
        Complex64::new(self.b_re, self.b_im)
    }
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Iterations for critical orbits.
    #[arg(long, default_value_t = Budgets::default().orbit)]
    pub orbit_budget: usize,
    /// Iterations per cell of the dynamical sub-raster.
    #[arg(long, default_value_t = Budgets::default().dynamic)]
    pub dynamic_budget: usize,
    #[arg(long, default_value_t = Budgets::default().dynamic_resolution)]
    pub dynamic_resolution: u32,
    #[arg(long, default_value_t = Budgets::default().max_cells)]
    pub max_cells: usize,
    #[arg(long, default_value_t = Budgets::default().siegel)]
    pub siegel_budget: usize,
}

impl BudgetArgs {
    fn value(&self) -> Budgets {
        Budgets {
            orbit: self.orbit_budget,
            dynamic: self.dynamic_budget,
            dynamic_resolution: self.dynamic_resolution,
            max_cells: self.max_cells,
            siegel: self.siegel_budget,
        }
    }
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    #[command(flatten)]
    pub lambda: LambdaArgs,
    #[arg(long, default_value_t = -2.5)]
    pub x0: f64,
    #[arg(long, default_value_t = -2.5)]
    pub y0: f64,
    #[arg(long, default_value_t = 2.5)]
    pub x1: f64,
    #[arg(long, default_value_t = 2.5)]
    pub y1: f64,
    /// Pixels per side.
    #[arg(long, default_value_t = 1024)]
    pub res: u32,
    #[command(flatten)]
    pub budgets: BudgetArgs,
    /// Perturbation seeding the closure on |λ| = 1.
    #[arg(long, default_value_t = 1e-2)]
    pub closure_eps: f64,
    /// Classify each component with this many samples (0 skips).
    #[arg(long, default_value_t = 0)]
    pub component_samples: usize,
    #[arg(long, default_value = "slice.cubq")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub budgets: BudgetArgs,
    /// Also write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PetalArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Samples per petal for the property check.
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RaysArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value_t = 3)]
    pub max_period: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HullArgs {
    /// Slice tile to read.
    #[arg(long)]
    pub input: PathBuf,
    /// Layer to fill: m3, phd, p-closure or hull.
    #[arg(long, default_value = "p-closure")]
    pub layer: String,
    /// Output tile; defaults to the input with `.hull` inserted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, env = "CUBQ_PORT", default_value_t = config::DEFAULT_PORT)]
    pub port: u16,
    /// Concurrent compute jobs.
    #[arg(long, env = "CUBQ_WORKERS", default_value_t = config::DEFAULT_WORKERS)]
    pub workers: usize,
    #[arg(long, env = "CUBQ_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Milliseconds a tile request waits before answering 503.
    #[arg(long, default_value_t = config::DEFAULT_WAIT_MS)]
    pub wait_ms: u64,
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<cubiclab::Error> for CliError {
    fn from(e: cubiclab::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

/// Finds `--config` on the command line, falling back to `CUBQ_CONFIG`.
fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    std::env::var_os("CUBQ_CONFIG").map(PathBuf::from)
}

/// The clap command with defaults replaced by configuration-file values.
pub fn command_with_config(pairs: &[(String, String)]) -> Result<clap::Command, CliError> {
    let mut cmd = Cli::command();
    for (key, value) in pairs {
        if key == "config" {
            continue;
        }
        let owners: Vec<String> = cmd
            .get_subcommands()
            .filter(|sc| sc.get_arguments().any(|a| a.get_id() == key.as_str()))
            .map(|sc| sc.get_name().to_string())
            .collect();
        if owners.is_empty() {
            return Err(CliError::Validation(format!("unknown config key {key:?}")));
        }
        for name in owners {
            let (key, value) = (key.clone(), value.clone());
            cmd = cmd.mut_subcommand(name, move |sc| sc.mut_arg(key, move |a| a.default_value(value)));
        }
    }
    Ok(cmd)
}

fn parse(args: &[OsString]) -> Result<Cli, (i32, String)> {
    let pairs = match config_path(args) {
        Some(p) => config::read_config(&p).map_err(|e| (EXIT_VALIDATION, e.to_string()))?,
        None => Vec::new(),
    };
    let cmd = command_with_config(&pairs).map_err(|e| (e.exit_code(), e.to_string()))?;
    let matches = cmd.try_get_matches_from(args).map_err(|e| {
        let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        (code, e.render().to_string())
    })?;
    Cli::from_arg_matches(&matches).map_err(|e| (EXIT_VALIDATION, e.render().to_string()))
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match parse(&args) {
        Ok(c) => c,
        Err((code, text)) => {
            if code == EXIT_OK {
                print!("{text}");
            } else {
                eprint!("{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    if let Some(p) = out {
        jobs::write_json(p, value)?;
    }
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("{text}");
    Ok(())
}

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Slice(a) => {
            let job = SliceJob {
                lambda: a.lambda.value(),
                window: Window::new(a.x0, a.y0, a.x1, a.y1)?,
                resolution: a.res,
                budgets: a.budgets.value(),
                closure_eps: a.closure_eps,
                component_samples: a.component_samples,
                out: a.out,
            };
            let out = jobs::run_slice(&job)?;
            emit(&out, None)
        }
        Command::Classify(a) => {
            let job = PointJob {
                lambda: a.point.lambda.value(),
                b: a.point.b(),
                budgets: a.budgets.value(),
            };
            emit(&jobs::run_classify(&job)?, a.out.as_deref())
        }
        Command::Petal(a) => {
            let job = PetalJob {
                lambda: a.point.lambda.value(),
                b: a.point.b(),
                samples: a.samples,
            };
            emit(&jobs::run_petal(&job)?, a.out.as_deref())
        }
        Command::Rays(a) => {
            let job = RaysJob {
                lambda: a.point.lambda.value(),
                b: a.point.b(),
                max_period: a.max_period,
            };
            emit(&jobs::run_rays(&job)?, a.out.as_deref())
        }
        Command::Hull(a) => {
            let out = a.out.unwrap_or_else(|| a.input.with_extension("hull.cubq"));
            let job = HullJob {
                input: a.input,
                out,
                layer: a.layer,
            };
            emit(&jobs::run_hull(&job)?, None)
        }
        Command::Serve(a) => {
            let config = ServiceConfig {
                host: a.host,
                port: a.port,
                workers: a.workers,
                cache_dir: a.cache_dir,
                wait_ms: a.wait_ms,
            };
            let rt = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            rt.block_on(crate::server::serve(config))
                .map_err(|e| CliError::Runtime(e.to_string()))
        }
    }
}

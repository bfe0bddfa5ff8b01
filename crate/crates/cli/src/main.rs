//! `isoprofile`: command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input or numerical failure, 2 a
//! verified property did not hold.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Relative `--out` paths resolve against this directory when it is set.
pub const OUT_DIR_ENV: &str = "ISOPROFILE_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "isoprofile", version, about = "Isoperimetric profiles and convex exhaustions on surfaces of revolution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ball volume, sphere area and profile tables of a space form.
    Spaceform(SpaceformArgs),
    /// Warping function, curvature and pole-ball tables of a surface.
    Surface(SurfaceArgs),
    /// Strict convexity report for the square-root exhaustion.
    Exhaustion(ExhaustionArgs),
    /// Ball placement witness and Fubini average for a scenario.
    Placement(PlacementArgs),
    /// Disk, sublevel or inf-over-r profile curves.
    Profile(ProfileArgs),
    /// Monotone limit and one-sided continuity checks.
    Limits(LimitsArgs),
    /// Runs the full acceptance suite.
    VerifyAll(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Defaults to the `--out` extension, else CSV for tables and JSON for reports.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug)]
pub struct SurfaceSelect {
    /// Catalog surface: plane, hyperbolic, cigar or flare.
    #[arg(long, conflicts_with = "surface_config")]
    pub surface: Option<String>,
    /// Surface configuration JSON file.
    #[arg(long = "surface-config")]
    pub surface_config: Option<PathBuf>,
    /// Override of the numerical domain radius.
    #[arg(long)]
    pub t_num: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SpaceformArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SurfaceArgs {
    #[command(flatten)]
    pub select: SurfaceSelect,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ExhaustionArgs {
    #[command(flatten)]
    pub select: SurfaceSelect,
    #[arg(long, default_value_t = 100)]
    pub geodesics: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct PlacementArgs {
    /// Scenario JSON: surface, E, B, D, r0 and optional inj.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 17)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProfileKindArg {
    Disk,
    Sublevel,
    Inf,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub select: SurfaceSelect,
    #[arg(long, value_enum, default_value_t = ProfileKindArg::Disk)]
    pub kind: ProfileKindArg,
    #[arg(long)]
    pub vmin: f64,
    #[arg(long)]
    pub vmax: f64,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Sublevel radius for `--kind sublevel`.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Levels in the schedule for `--kind inf`.
    #[arg(long, default_value_t = 32)]
    pub levels: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    Remark,
}

#[derive(Args, Debug)]
pub struct LimitsArgs {
    #[arg(long, value_enum, conflicts_with = "matrix")]
    pub demo: Option<Demo>,
    /// CSV matrix: first row the x grid, then one row per family member.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Point for the one-sided continuity checks.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    /// First probe offset; later offsets halve it twelve times.
    #[arg(long)]
    pub h0: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub tail_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 100)]
    pub geodesics: usize,
    /// Restrict to these criteria (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<u32>>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(commands::Status::Ok) => ExitCode::SUCCESS,
        Ok(commands::Status::VerificationFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("isoprofile: {e}");
            ExitCode::from(if e.is_verification() { 2 } else { 1 })
        }
    }
}

//! `confinv` command line: invariant tables, convergence studies of the
//! circular-polygon estimators, cross-ratio reports and surface samples.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 numerical failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use confinv::rectifier::SphereNormals;

use config::{Format, Overrides, RunConfig, ScheduleSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Core(#[from] confinv::Error),
}

impl CliError {
    /// For library errors that are caused by bad input rather than geometry.
    fn config(e: confinv::Error) -> Self {
        if e.is_numerical() {
            CliError::Core(e)
        } else {
            CliError::Config(e.to_string())
        }
    }

    fn csv(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Failed(_) => 2,
            CliError::Core(e) if e.is_numerical() => 2,
            CliError::Core(_) => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "confinv", version, about = "Metric and conformal invariants of space curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of κ, τ, κ', ν, √ν, Q, T, P over an arc-length range.
    Invariants(Opts),
    /// Convergence study of the discrete estimators at one point.
    Converge(Opts),
    /// Cross ratios and circle-crossing angles of four points, with a
    /// Möbius-invariance check.
    Crossratio(Opts),
    /// Samples of the constraint surface p² + q² + r² − 2pqr = 1.
    Tetrahedron(Opts),
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Catalog curve: helix, torus_knot, trig_poly, circle, ellipse, line.
    #[arg(long)]
    curve: Option<String>,
    /// Comma-separated curve parameters.
    #[arg(long, allow_hyphen_values = true)]
    params: Option<String>,
    /// CSV file of sampled points (x,y,z per row) instead of a catalog curve.
    #[arg(long)]
    polyline: Option<PathBuf>,
    /// Arc-length point for converge, or the single row of invariants.
    #[arg(long, allow_hyphen_values = true)]
    s0: Option<f64>,
    /// Start of the invariants range (default 0).
    #[arg(long, allow_hyphen_values = true)]
    s_min: Option<f64>,
    /// End of the invariants range (default: curve length).
    #[arg(long, allow_hyphen_values = true)]
    s_max: Option<f64>,
    /// Number of invariant rows over the range.
    #[arg(long)]
    rows: Option<usize>,
    /// First conformal step ω of the conformal estimators.
    #[arg(long)]
    omega_start: Option<f64>,
    /// Ratio between successive ω steps.
    #[arg(long)]
    omega_ratio: Option<f64>,
    /// Number of ω steps.
    #[arg(long)]
    omega_count: Option<usize>,
    /// First arc-length step ε of the κ and τ estimators.
    #[arg(long)]
    epsilon_start: Option<f64>,
    /// Ratio between successive ε steps.
    #[arg(long)]
    epsilon_ratio: Option<f64>,
    /// Number of ε steps.
    #[arg(long)]
    epsilon_count: Option<usize>,
    /// Comma-separated estimators: nu, P, T2beta, T2gamma, Q, kappa, tau,
    /// cusp_leading. Default: all.
    #[arg(long)]
    which: Option<String>,
    /// Sphere-normal route for T2gamma.
    #[arg(long, value_enum)]
    sphere_normals: Option<Normals>,
    /// Output format (default csv).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random points and Möbius maps.
    #[arg(long)]
    seed: Option<u64>,
    /// Four points as "x,y,z;x,y,z;x,y,z;x,y,z".
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    /// Angle subdivisions of the tetrahedron surface.
    #[arg(long)]
    grid_n: Option<usize>,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum Normals {
    Gram,
    Centers,
}

fn parse_reals(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| CliError::Config(format!("bad {what} value `{s}`: {e}"))))
        .collect()
}

fn parse_points(text: &str) -> Result<Vec<[f64; 3]>, CliError> {
    text.split(';')
        .map(|p| {
            let v = parse_reals(p, "point")?;
            <[f64; 3]>::try_from(v.as_slice())
                .map_err(|_| CliError::Config(format!("point `{p}` needs three coordinates")))
        })
        .collect()
}

impl Opts {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let overrides = Overrides {
            curve: self.curve,
            params: self.params.as_deref().map(|p| parse_reals(p, "parameter")).transpose()?,
            polyline: self.polyline,
            s0: self.s0,
            s_min: self.s_min,
            s_max: self.s_max,
            rows: self.rows,
            omega: ScheduleSpec { start: self.omega_start, ratio: self.omega_ratio, count: self.omega_count, steps: None },
            epsilon: ScheduleSpec {
                start: self.epsilon_start,
                ratio: self.epsilon_ratio,
                count: self.epsilon_count,
                steps: None,
            },
            format: self.format,
            out: self.out,
            seed: self.seed,
            which: self.which,
            points: self.points.as_deref().map(parse_points).transpose()?,
            grid_n: self.grid_n,
            sphere_normals: self.sphere_normals.map(|n| match n {
                Normals::Gram => SphereNormals::Gram,
                Normals::Centers => SphereNormals::Centers,
            }),
        };
        RunConfig::load(self.config.as_deref(), overrides)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Invariants(o) => commands::invariants(&o.into_config()?),
        Command::Converge(o) => commands::converge(&o.into_config()?),
        Command::Crossratio(o) => commands::crossratio(&o.into_config()?),
        Command::Tetrahedron(o) => commands::tetrahedron(&o.into_config()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{Failure, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "hypfill", version, about = "Minimal surfaces in H2xR: families, tables, Dirichlet solves, boundary analysis")]
pub struct Cli {
    /// JSON file with default settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a surface mesh and write OBJ and CSV files.
    Family(FamilyArgs),
    /// Tabulate profile heights over a parameter grid.
    Table(TableArgs),
    /// Solve a vertical-graph Dirichlet problem.
    Solve(SolveArgs),
    /// Classify a boundary curve.
    Classify(ClassifyArgs),
    /// Trace the asymptotic boundary of a mesh.
    Trace(TraceArgs),
    /// Run the acceptance suite.
    Accept,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Slice,
    Flat,
    Tall,
    Catenoid,
    Diagonal,
    Helicoid,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    pub kind: FamilyKind,
    #[arg(long = "C")]
    pub c: Option<f64>,
    /// Bottom height of a tall rectangle.
    #[arg(long)]
    pub a: Option<f64>,
    /// Height of a horizontal slice.
    #[arg(long)]
    pub t: Option<f64>,
    /// Ideal endpoints (number or `inf`) of the flat or of the tall rectangle's arc.
    #[arg(long)]
    pub q1: Option<String>,
    #[arg(long)]
    pub q2: Option<String>,
    #[arg(long)]
    pub slope: Option<f64>,
    #[arg(long)]
    pub pitch: Option<f64>,
    /// Grid nodes per parameter direction.
    #[arg(long)]
    pub res: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    Tall,
    Catenoid,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    pub kind: TableKind,
    /// Explicit parameter values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Vec<f64>,
    /// `START,STOP,N` evenly spaced.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub linspace: Option<Vec<f64>>,
    /// `START,STOP,N` geometrically spaced.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub logspace: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// `NX` or `NXxNY` node counts.
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub curve: PathBuf,
    /// Read a geodesic boundary set (arcs, poles, chambers) instead of a product curve.
    #[arg(long)]
    pub geodesic: bool,
    #[arg(long)]
    pub theta_samples: Option<usize>,
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// Basepoint `x,y,t`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub base: Option<Vec<f64>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match RunConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(f) => return report_early(&f),
    };
    if let Some(out) = cli.out {
        cfg.out = Some(out);
    }
    if let Err(f) = cfg.init_threads() {
        return report_early(&f);
    }
    let (name, result) = commands::dispatch(&cli.command, &mut cfg);
    let code = match &result {
        Ok(r) => r.failure.as_ref().map_or(0, Failure::code),
        Err(f) => f.code(),
    };
    if let Err(f) = config::write_manifest(name, &cfg, &result) {
        eprintln!("{}", f.to_json());
        return ExitCode::from(f.code());
    }
    match &result {
        Err(f) => eprintln!("{}", f.to_json()),
        Ok(r) => {
            if let Some(f) = &r.failure {
                eprintln!("{}", f.to_json());
            }
        }
    }
    ExitCode::from(code)
}

fn report_early(f: &Failure) -> ExitCode {
    eprintln!("{}", f.to_json());
    ExitCode::from(f.code())
}

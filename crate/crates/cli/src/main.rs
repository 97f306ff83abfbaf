mod commands;

use clap::{Parser, Subcommand};
use parabolic_cylinder::config::RunConfig;
use parabolic_cylinder::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Experiments on a one-resonant germ, its blow-up and its parabolic cylinder.
#[derive(Debug, Parser)]
#[command(name = "pcyl", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; built-in defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Main count of the subcommand: terms, steps or samples.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Coordinate tolerance (overrides `coords.tol`).
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dyadic small divisors and Brjuno partial sums.
    Brjuno,
    /// One orbit as CSV plus its asymptotic diagnostics.
    Orbit,
    /// Radius search and basin-invariance sampling.
    Basin,
    /// psi, sigma, tau, Phi and Psi on basin samples.
    Coords,
    /// Limit circle of the configured start point.
    Limitset,
    /// The full acceptance suite.
    Verify,
    /// Basin membership slices as P6 images.
    Render {
        /// The `|y|` slice (overrides `render.slice`).
        #[arg(long, allow_negative_numbers = true)]
        slice: Option<f64>,
    },
}

pub enum Failure {
    Infrastructure(String),
    Config(String),
    Checks(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(msg) => Failure::Config(msg),
            other => Failure::Infrastructure(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Infrastructure(e.to_string())
    }
}

fn load(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?.0,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = cli.tol {
        cfg.coords.tol = tol;
    }
    if let Some(n) = cli.n {
        match cli.command {
            Command::Brjuno => {
                cfg.suite.brjuno_terms = u32::try_from(n).map_err(|_| Failure::Config(format!("--n {n} too large")))?
            }
            Command::Orbit | Command::Limitset => cfg.orbit.n = n,
            Command::Basin => cfg.suite.invariance_samples = n,
            Command::Coords => cfg.suite.coord_samples = n,
            Command::Verify | Command::Render { .. } => {}
        }
    }
    if let Command::Render { slice: Some(s) } = cli.command {
        cfg.render.slice = s;
    }
    for w in cfg.validate()? {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = load(cli)?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    match cli.command {
        Command::Brjuno => commands::brjuno(&cfg),
        Command::Orbit => commands::orbit(&cfg),
        Command::Basin => commands::basin(&cfg),
        Command::Coords => commands::coords(&cfg),
        Command::Limitset => commands::limitset(&cfg),
        Command::Verify => commands::verify(&cfg),
        Command::Render { .. } => commands::render(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Infrastructure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Checks(names)) => {
            eprintln!("failed checks: {}", names.join(", "));
            ExitCode::from(3)
        }
    }
}

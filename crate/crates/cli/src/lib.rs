//! Command-line front end for the `fraclog` solver.
//!
//! | exit | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | configuration, usage or I/O error |
//! | 2 | ground state did not converge |
//! | 3 | conservation drift above threshold |
//! | 4 | non-finite field during evolution |
//! | 5 | a verification property failed |
//! | 6 | a stability seed failed |

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod report;
pub mod verify;

pub use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "fraclog", version, about = "Fractional logarithmic Schrödinger experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the verification seed, or replaces the stability seed list.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps, seeds and suites.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Minimize the action on the Nehari manifold.
    Groundstate,
    /// Integrate the regularized flow and track conservation.
    Evolve,
    /// Run the randomized inequality and identity suites.
    Verify,
    /// Perturb a ground state and track its orbital distance.
    Stability,
    /// Ground states over a grid of (s, omega).
    Sweep,
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    NotConverged(String),
    #[error("{0}")]
    Drift(String),
    #[error("{0}")]
    NonFinite(String),
    #[error("{0}")]
    Verify(String),
    #[error("{0}")]
    Stability(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::NotConverged(_) => 2,
            Failure::Drift(_) => 3,
            Failure::NonFinite(_) => 4,
            Failure::Verify(_) => 5,
            Failure::Stability(_) => 6,
        }
    }
}

impl From<fraclog::Error> for Failure {
    fn from(e: fraclog::Error) -> Self {
        use fraclog::Error as E;
        match e {
            E::NonFiniteEvolution { .. } => Failure::NonFinite(e.to_string()),
            E::Divergence { .. } | E::ZeroCollapse { .. } => Failure::NotConverged(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(format!("I/O: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Config(format!("CSV: {e}"))
    }
}

/// Everything a command needs besides its own section.
pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
    pub seed: Option<u64>,
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    std::fs::create_dir_all(&cli.out)?;
    let ctx = Context {
        config,
        out: cli.out.clone(),
        seed: cli.seed,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Config("--threads: must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure::Config(format!("--threads: {e}")))?;
    pool.install(|| match cli.command {
        Command::Groundstate => commands::groundstate(&ctx),
        Command::Evolve => commands::evolve(&ctx),
        Command::Verify => commands::verify(&ctx),
        Command::Stability => commands::stability(&ctx),
        Command::Sweep => commands::sweep(&ctx),
    })
}

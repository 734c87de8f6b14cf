//! `sweepoutlab`: meshing, verification campaigns and plot data.

mod config;
mod mesh;
mod output;
mod plot;
mod verify;

use clap::{Parser, Subcommand};
use config::CampaignConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sweepoutlab", version, about = "Saddle-family sweepouts of the unit ball: meshes, areas and verification campaigns")]
struct Cli {
    /// Worker threads (default: config value, then all cores).
    #[arg(long, global = true, env = "SWEEPOUTLAB_THREADS")]
    threads: Option<usize>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides the config `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mesh one family member in the unit ball.
    Mesh(mesh::MeshArgs),
    /// Run a verification campaign and write its reports.
    Verify {
        /// global-max, width, local-max, lemma43 (alias scaling), cubic-lemma,
        /// genus, appendixA, parity-table, first-variation, equivariance
        campaign: String,
        /// TOML config; built-in defaults when omitted.
        config: Option<PathBuf>,
    },
    /// Emit mesh files and `.dat` tables for plots.
    PlotData {
        /// table1, phi1-figure or scaling
        figure: String,
        config: Option<PathBuf>,
    },
}

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad config, unknown campaign or unusable parameters (exit 2).
    Config(anyhow::Error),
    /// The requested member is singular (exit 2).
    Singular(String),
    /// Reading or writing files failed (exit 1).
    Io(anyhow::Error),
    /// The campaign ran and its verdict is FAIL (exit 1).
    VerdictFailed(String),
    /// A computation failed for a valid input (exit 1).
    Failed(anyhow::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Singular(_) => 2,
            CliError::Io(_) | CliError::VerdictFailed(_) | CliError::Failed(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e:#}"),
            CliError::Singular(m) => write!(f, "singular parameter: {m}"),
            CliError::Io(e) => write!(f, "I/O error: {e:#}"),
            CliError::VerdictFailed(m) => write!(f, "verdict FAIL: {m}"),
            CliError::Failed(e) => write!(f, "{e:#}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn io_err(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Io(e.into())
}

pub fn config_err(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Config(e.into())
}

/// Config from the file (or defaults) with the global flags applied.
fn effective_config(cli: &Cli, path: Option<&PathBuf>) -> CliResult<CampaignConfig> {
    let mut cfg = match path {
        Some(p) => CampaignConfig::load(p).map_err(config_err)?,
        None => CampaignConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

fn init_threads(threads: Option<usize>) -> CliResult<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(config_err(anyhow::anyhow!("threads must be positive")));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(config_err)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Mesh(args) => {
            init_threads(cli.threads)?;
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            mesh::cmd_mesh(args, &out)
        }
        Command::Verify { campaign, config } => {
            let campaign = verify::Campaign::parse(campaign).map_err(config_err)?;
            let cfg = effective_config(cli, config.as_ref())?;
            init_threads(cfg.threads)?;
            verify::cmd_verify(campaign, &cfg)
        }
        Command::PlotData { figure, config } => {
            let figure = plot::Figure::parse(figure).map_err(config_err)?;
            let cfg = effective_config(cli, config.as_ref())?;
            init_threads(cfg.threads)?;
            plot::cmd_plot_data(figure, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sweepoutlab: {e}");
            ExitCode::from(e.code())
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use psbench::config::RunConfig;
use psbench::report::{cmd_classify, cmd_delta, cmd_measure, cmd_orbit};

/// Worker threads for the parallel library calls.
const THREADS_VAR: &str = "PSBENCH_THREADS";

#[derive(Parser)]
#[command(version, about = "Patterson-Sullivan workbench for discrete groups of the hyperbolic plane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; flags below override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    radius: Option<f64>,
    #[arg(long, global = true)]
    bins: Option<u32>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Enumerate the orbit ball: orbit_ball.csv, annuli.csv.
    Orbit,
    /// Critical exponent estimates: poincare_report.json.
    Delta,
    /// Patterson-Sullivan histogram and audits.
    Measure,
    /// BMS sampling and conservativity report.
    Classify,
}

fn load(cli: &Cli) -> Result<RunConfig, psbench::error::ReportError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &cli.preset {
        cfg.preset = p.clone();
        cfg.generators = None;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(r) = cli.radius {
        cfg.radius = r;
    }
    if let Some(b) = cli.bins {
        cfg.bins = b as usize;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Warn)
        .format_timestamp(None)
        .init();
    if let Some(n) = std::env::var(THREADS_VAR).ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: {THREADS_VAR} ignored: {e}");
        }
    }
    let cfg = match load(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Orbit => cmd_orbit(&cfg),
        Command::Delta => cmd_delta(&cfg),
        Command::Measure => cmd_measure(&cfg),
        Command::Classify => cmd_classify(&cfg),
    };
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

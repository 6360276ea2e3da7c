//! Command-line front end. Errors leave as one-line JSON on stderr
//! with a nonzero exit so callers can script against failures.

use bnpma::config::AppConfig;
use bnpma::error::{Error, Result};
use bnpma::runner;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "bnpma", version, about = "Bayesian nonparametric meta-analysis of reported survival summaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the model to a dataset and write posterior outputs
    Analyze(RunArgs),
    /// Generate a synthetic dataset with known truth
    Simulate(RunArgs),
    /// Score an analysis of simulated data against its truth
    Score(RunArgs),
    /// Deprecated spelling of analyze
    #[command(hide = true)]
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Input dataset CSV
    #[arg(long)]
    data: Option<PathBuf>,

    /// Configuration file (sectioned key=value)
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory
    #[arg(long)]
    out: PathBuf,

    /// Chain seed; overrides the config file
    #[arg(long)]
    seed: Option<u64>,

    /// Sampler worker threads; overrides the config file
    #[arg(long)]
    workers: Option<usize>,

    /// External comparator CSV in the forest schema
    #[arg(long)]
    baseline: Option<PathBuf>,
}

impl RunArgs {
    fn load_config(&self) -> Result<AppConfig> {
        let mut cfg = match &self.config {
            Some(path) => AppConfig::from_file(path)?,
            None => AppConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = Some(seed);
        }
        if let Some(workers) = self.workers {
            if workers == 0 {
                return Err(Error::Usage("--workers must be at least 1".into()));
            }
            cfg.workers = workers;
        }
        Ok(cfg)
    }

    fn data(&self) -> Result<&PathBuf> {
        self.data
            .as_ref()
            .ok_or_else(|| Error::Usage("--data <csv> is required for this command".into()))
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze(args) | Command::Run(args) => {
            let cfg = args.load_config()?;
            runner::analyze(args.data()?, &cfg, &args.out, args.baseline.as_deref())
        }
        Command::Simulate(args) => {
            let cfg = args.load_config()?;
            runner::simulate(&cfg, &args.out)
        }
        Command::Score(args) => {
            let score = runner::score(args.data()?, &args.out)?;
            let line = serde_json::to_string(&score)
                .map_err(|e| Error::Data(format!("cannot serialize metrics: {e}")))?;
            println!("{line}");
            Ok(())
        }
    }
}

fn main() {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("BNPMA_LOG", "error"),
    )
    .init();
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        let json = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
        eprintln!("{json}");
        std::process::exit(1);
    }
}

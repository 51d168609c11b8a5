use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use momab_cli::config::OUT_ENV;
use momab_cli::{check, manifest, resolve, run, CliError, RunManifest, Settings};

#[derive(Parser)]
#[command(name = "momab", version = manifest::VERSION, about = "Decentralized multi-objective bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment suite and write traces, summary, plot and manifest.
    Run {
        /// Flat JSON config; flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Replay a previous run's manifest.json.
        #[arg(long, conflicts_with = "config")]
        manifest: Option<PathBuf>,
        #[command(flatten)]
        settings: Settings,
    },
    /// Run structural and diagnostic checks on a small instance.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-plot a summary.csv as SVG.
    Plot {
        #[arg(long)]
        summary: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "cumulative regret")]
        title: String,
    },
}

fn run_command(config: Option<PathBuf>, manifest: Option<PathBuf>, settings: Settings) -> Result<ExitCode, CliError> {
    let env_out = std::env::var_os(OUT_ENV).map(PathBuf::from);
    let manifest = match manifest {
        Some(path) => {
            let mut m = RunManifest::read(&path)?;
            m.version = manifest::VERSION.to_string();
            m.started_at = manifest::now();
            m.finished_at = None;
            if let Some(out) = settings.out.clone().or(env_out) {
                m.out_dir = out;
            }
            m
        }
        None => {
            let file = match config {
                Some(path) => Settings::from_file(&path)?,
                None => Settings::default(),
            };
            let r = resolve(&file.overridden_by(&settings), env_out)?;
            RunManifest::new(r.suite, r.algorithms, r.config, r.out)
        }
    };
    let outcome = run::execute(manifest)?;
    println!("wrote {}", outcome.out_dir.display());
    if outcome.failed_trials > 0 {
        eprintln!("{} trial(s) failed", outcome.failed_trials);
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            manifest,
            settings,
        } => run_command(config, manifest, settings),
        Command::Check { seed } => {
            let results = check::run_checks(seed);
            for c in &results {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(if results.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Plot { summary, out, title } => {
            let out = out.unwrap_or_else(|| summary.with_extension("svg"));
            run::replot(&summary, &out, &title).map(|_| {
                println!("wrote {}", out.display());
                ExitCode::SUCCESS
            })
        }
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}

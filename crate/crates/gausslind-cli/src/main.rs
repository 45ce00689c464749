//! `gausslind`: run scenario configurations and installation self-checks.

use clap::{Parser, Subcommand};
use gausslind_cli::config::ScenarioConfig;
use gausslind_cli::failure::CliError;
use gausslind_cli::{scenarios, selfcheck};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "gausslind", version, about = "Gaussian-state decoherence and discord scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a JSON scenario and write its CSV.
    Run {
        /// Scenario configuration (JSON).
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads for parallel sweeps (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the installation self-checks.
    Selfcheck,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Config(e.kind().to_string() + ": " + e.to_string().lines().next().unwrap_or(""))),
    };
    let result = match cli.command {
        Command::Run { config, out, threads } => run(&config, &out, threads),
        Command::Selfcheck => run_selfcheck(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn run(config: &Path, out: &Path, threads: Option<usize>) -> Result<(), CliError> {
    let cfg = ScenarioConfig::load(config)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
    let path = pool.install(|| scenarios::run(&cfg, out))?;
    println!("[gausslind] {} -> {}", cfg.mode.name(), path.display());
    Ok(())
}

fn run_selfcheck() -> Result<(), CliError> {
    let outcomes = selfcheck::run_all();
    let mut failed = Vec::new();
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {:<24} {status} ({:.2} s) {}", o.criterion, o.name, o.seconds, o.detail);
        if !o.passed {
            failed.push(o.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(failed.join(", ")))
    }
}

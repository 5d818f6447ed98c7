//! Command-line driver: `run`, `verify` and `bench`.

mod bench;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use streamsub::io::{execute, RunConfig};
use streamsub::verify::{run_all, VerifyConfig};
use streamsub::ExecMode;

#[derive(Parser)]
#[command(name = "streamsub", version, about = "Streaming submodular maximization under matchoid and knapsack constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stream an input file through the configured algorithm and write a report.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check guarantee and invariant suites on generated small instances.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instances per suite.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Disable data-parallel enumeration.
        #[arg(long)]
        sequential: bool,
    },
    /// Time per-element updates against chain length, grid size and segment size.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
}

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn run(config: PathBuf) -> Result<()> {
    let cfg = RunConfig::load(&config).with_context(|| format!("reading config {}", config.display()))?;
    let report = execute(&cfg).context("running the stream")?;
    match &cfg.output {
        Some(path) => std::fs::write(path, report.to_kv()).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", report.to_kv()),
    }
    if let Some(path) = &cfg.table {
        std::fs::write(path, report.to_tsv()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn verify(seed: u64, trials: usize, sequential: bool) -> Result<bool> {
    let cfg = VerifyConfig {
        seed,
        trials,
        exec: if sequential { ExecMode::Sequential } else { ExecMode::Parallel },
    };
    let results = run_all(&cfg)?;
    let mut ok = true;
    for r in &results {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        println!("{status} {} ({} checks, {} violations)", r.name, r.checked, r.violations);
        if let Some(ex) = &r.example {
            println!("     first violation: {ex}");
        }
        ok &= r.passed();
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Run { config } => run(config).map(|_| true),
        Command::Verify { seed, trials, sequential } => verify(seed, trials, sequential),
        Command::Bench { config } => bench::run(&config).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VIOLATION),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

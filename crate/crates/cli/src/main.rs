//! `heunqp`: construct, tabulate and verify quasi-periodic Heun solutions.

mod commands;
mod config;
mod render;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use config::{Command, Flags, RunConfig, UsageError};

#[derive(Debug, Parser)]
#[command(
    name = "heunqp",
    version,
    about = "Quasi-periodic solutions of Heun's equation from GAL potentials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("HEUNQP_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("HEUNQP_THREADS: expected a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(UsageError("HEUNQP_THREADS must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<usize> {
    init_threads()?;
    let cfg = RunConfig::new(cli.command, cli.flags)?;
    let output = commands::run(&cfg)?;
    match &cfg.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            output.write(cfg.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            output.write(cfg.format, &mut w)?;
        }
    }
    Ok(output.failed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("heunqp: {n} check(s) failed");
            ExitCode::from(1)
        }
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("heunqp: usage error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("heunqp: error: {e:#}");
            ExitCode::from(3)
        }
    }
}

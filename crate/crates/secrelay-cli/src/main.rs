use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use secrelay_cli::commands;
use secrelay_cli::config::{OutputFormat, RunConfig};

/// Secure buffer-aided relaying: throughput analysis, tie-break policy
/// optimization, and slot-level simulation.
#[derive(Parser)]
#[command(name = "secrelay", version, about)]
struct Cli {
    /// Run configuration file (flat key = value lines).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override the base seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the output format.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Evaluate the RF-FD secrecy condition with the sum-rate bound
    /// included.
    #[arg(long, global = true)]
    strict_region: bool,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Chain-analysis throughput with optimized tie-breaks per variant and
    /// buffer capacity
    Analyze,
    /// Slot-level simulation cross-checked against the chain analysis
    Simulate,
    /// Optimize the tie-break policy for one configuration and dump it
    Optimize,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(format) = cli.format {
        cfg.format = format;
    }
    if cli.strict_region {
        cfg.strict_region = true;
    }
    if let Some(out) = cli.out {
        cfg.out = Some(out);
    }

    let dispatch = |cfg: &RunConfig, w: &mut dyn Write| match cli.command {
        Cmd::Analyze => commands::cmd_analyze(cfg, w),
        Cmd::Simulate => commands::cmd_simulate(cfg, w),
        Cmd::Optimize => commands::cmd_optimize(cfg, w),
    };

    match cfg.out.clone() {
        Some(path) => {
            let file = File::create(&path)
                .with_context(|| format!("creating output file {}", path.display()))?;
            let mut w = BufWriter::new(file);
            dispatch(&cfg, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            dispatch(&cfg, &mut w)?;
        }
    }
    Ok(())
}

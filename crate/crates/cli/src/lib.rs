//! Command-line front end for `snsr-core`.
//!
//! Every command writes its outputs into `--out-dir` atomically and finishes
//! with `manifest.json`, which records the resolved configuration and the
//! SHA-256 of every input file. Data outputs are a pure function of the
//! manifest; only latency and timing columns vary between runs.

pub mod commands;
pub mod output;
pub mod spec;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use commands::bench::{scaling_sweep, BenchRow, SweepConfig};

#[derive(Debug, Parser)]
#[command(name = "snsr", version, about = "Spectral neuro-symbolic reasoning on graph Laplacians")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Global {
    /// Seed for every random choice the command makes.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving outputs and the manifest.
    #[arg(long, global = true, default_value = ".")]
    #[serde(skip)]
    pub out_dir: PathBuf,
    /// JSON configuration for `train`, `gen` and `eval`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit Chebyshev coefficients to an analytic response on a graph's spectrum.
    Fit(commands::fit::FitArgs),
    /// Filter beliefs, project predicates and close them under a rulebase.
    Infer(commands::fit::InferArgs),
    /// Train a filter or a mixture of experts on a task file.
    Train(commands::learn::TrainArgs),
    /// Generate synthetic tasks.
    Gen(commands::learn::GenArgs),
    /// Evaluate a model on a task file.
    Eval(commands::learn::EvalArgs),
    /// Band-energy attribution and robustness certificates per instance.
    Attribute(commands::study::AttributeArgs),
    /// Accuracy under band perturbations of increasing magnitude.
    Perturb(commands::study::PerturbArgs),
    /// Co-spectral transfer loss between two graphs' signals.
    Transfer(commands::study::TransferArgs),
    /// Timing sweeps over filter order and edge count.
    Bench(commands::bench::BenchArgs),
}

/// Cap the rayon pool from `SNSR_THREADS` if set. Call once, before any work.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SNSR_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("SNSR_THREADS must be a positive integer, got `{v}`"))?;
        anyhow::ensure!(n >= 1, "SNSR_THREADS must be at least 1");
        // A second call fails harmlessly when the pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Fit(a) => commands::fit::fit(g, a),
        Command::Infer(a) => commands::fit::infer(g, a),
        Command::Train(a) => commands::learn::train(g, a),
        Command::Gen(a) => commands::learn::gen(g, a),
        Command::Eval(a) => commands::learn::eval(g, a),
        Command::Attribute(a) => commands::study::attribute(g, a),
        Command::Perturb(a) => commands::study::perturb(g, a),
        Command::Transfer(a) => commands::study::transfer(g, a),
        Command::Bench(a) => commands::bench::bench(g, a),
    }
}

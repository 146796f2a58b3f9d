use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dgibbs::harness::{parse_samplers, run_experiment, ExperimentConfig, ExperimentKind};
use dgibbs::Error;

/// Runs dynamical Gibbs experiments and writes error curves as CSV.
#[derive(Parser)]
#[command(name = "dgibbs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Random positive table with an exact reference.
    Validate(Overrides),
    /// 2D image target, synthetic or read from a PGM file.
    Image(Overrides),
    /// Antiferromagnetic Ising lattice.
    Ising(Overrides),
    /// Ising denoising of a binary image.
    Denoise(Overrides),
    /// Bayesian logistic regression with binary weights.
    Logreg(Overrides),
}

#[derive(Args)]
struct Overrides {
    /// key = value config file; relative paths inside resolve against its directory.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Iterations per replicate.
    #[arg(long)]
    events: Option<usize>,
    /// Comma-separated list of dgibbs, suzuki, gibbs, independent.
    #[arg(long)]
    sampler: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Command {
    fn split(&self) -> (ExperimentKind, &Overrides) {
        match self {
            Self::Validate(o) => (ExperimentKind::Validate, o),
            Self::Image(o) => (ExperimentKind::Image, o),
            Self::Ising(o) => (ExperimentKind::Ising, o),
            Self::Denoise(o) => (ExperimentKind::Denoise, o),
            Self::Logreg(o) => (ExperimentKind::Logreg, o),
        }
    }
}

fn has_key(text: &str, key: &str) -> bool {
    text.lines().any(|l| {
        let l = l.split('#').next().unwrap_or("");
        l.split_once('=').is_some_and(|(k, _)| k.trim() == key)
    })
}

fn build_config(kind: ExperimentKind, o: &Overrides) -> dgibbs::Result<ExperimentConfig> {
    let (mut text, base) = match &o.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            (text, path.parent().unwrap_or(Path::new(".")).to_path_buf())
        }
        None => (String::new(), PathBuf::from(".")),
    };
    // events is mandatory in the file, so satisfy it before parsing
    if let Some(n) = o.events {
        if !has_key(&text, "events") {
            text.push_str(&format!("\nevents = {n}\n"));
        }
    }
    let mut config = ExperimentConfig::parse(&text, &base, Some(kind))?;
    if let Some(n) = o.events {
        config.budget = n;
    }
    if let Some(s) = &o.sampler {
        config.samplers = parse_samplers(s)?;
    }
    if let Some(seed) = o.seed {
        config.seed = seed;
    }
    if let Some(out) = &o.out {
        config.out = Some(out.clone());
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli) -> dgibbs::Result<()> {
    let (kind, overrides) = cli.command.split();
    let config = build_config(kind, overrides)?;
    let out = run_experiment(&config)?;
    for r in &out.runs {
        println!(
            "{kind} {}: mean error {:e} after {} iterations over {} replicates",
            r.sampler,
            r.curve.last_mean(),
            config.budget,
            config.replicates
        );
    }
    for f in &out.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}

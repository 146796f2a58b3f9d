use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use rayon::prelude::*;

use super::chain::{axis_values, Chain, ChainSpec, RunningMean};
use super::config::{ExperimentConfig, ImageSource, ReferenceMode, SamplerKind, TargetSpec};
use super::curve::{record_schedule, ErrorCurve};
use crate::baselines::{IndependentSampler, RandomStream, ScanOrder};
use crate::discrete::{state_count, DiscreteTarget};
use crate::error::{Error, Result};
use crate::targets::{
    enumerate_exact, load_csv_dataset, load_pgm, parse_pgm, spin_index, ImageTarget, IsingTarget, LogRegTarget,
    TableTarget, ENUMERATION_LIMIT,
};

/// Concrete target of an experiment.
#[derive(Clone, Debug)]
pub enum BuiltTarget {
    Table(TableTarget),
    Image(ImageTarget),
    Ising(IsingTarget),
    Logreg(LogRegTarget),
}

impl BuiltTarget {
    pub fn as_dyn(&self) -> &dyn DiscreteTarget {
        match self {
            Self::Table(t) => t,
            Self::Image(t) => t,
            Self::Ising(t) => t,
            Self::Logreg(t) => t,
        }
    }
}

/// Error of a replicate at a recording point.
#[derive(Clone, Debug)]
pub enum Metric {
    /// Euclidean distance of the running mean to reference means.
    MeanDistance(Vec<f64>),
    /// Distance to the nearer checkerboard, picked by the sign of the
    /// running mean's overlap with the first one.
    Checkerboard([Vec<f64>; 2]),
    /// Fraction of sites where the sign of the running mean differs from
    /// `clean` (spin indices).
    Disagreement(Vec<usize>),
}

/// Fraction of sites where `spin_means` rounds to the wrong spin; a zero
/// mean counts as -1.
fn disagreement(spin_means: &[f64], clean: &[usize]) -> f64 {
    let wrong = spin_means
        .iter()
        .zip(clean)
        .filter(|(m, &c)| spin_index(**m) != c)
        .count();
    wrong as f64 / clean.len() as f64
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

impl Metric {
    pub fn error(&self, mean: &RunningMean) -> f64 {
        match self {
            Self::MeanDistance(reference) => euclid(&mean.means(), reference),
            Self::Checkerboard([a, b]) => {
                let m = mean.means();
                let overlap: f64 = m.iter().zip(a).map(|(x, y)| x * y).sum();
                euclid(&m, if overlap >= 0.0 { a } else { b })
            }
            Self::Disagreement(clean) => disagreement(&mean.means(), clean),
        }
    }
}

/// Reference means with a description for output headers.
#[derive(Clone, Debug)]
pub struct Reference {
    pub means: Vec<f64>,
    pub provenance: String,
}

/// Everything an experiment needs before sampling starts.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub target: BuiltTarget,
    pub start: Vec<usize>,
    pub metric: Metric,
    /// Present when the reference came from a long run.
    pub long_run: Option<Reference>,
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::Config(format!("input file {} does not exist", path.display())))
    }
}

pub fn synthetic_image(source: &ImageSource) -> Option<(usize, usize, Vec<f64>)> {
    match *source {
        ImageSource::Pgm(_) => None,
        ImageSource::Uniform { height, width } => Some((height, width, vec![1.0; height * width])),
        ImageSource::Blob { height, width } => {
            let sigma = height.min(width) as f64 / 6.0;
            let (cr, cc) = (height as f64 / 2.0, width as f64 / 2.0);
            let px = (0..height * width)
                .map(|k| {
                    let (r, c) = ((k / width) as f64 + 0.5, (k % width) as f64 + 0.5);
                    let d2 = (r - cr).powi(2) + (c - cc).powi(2);
                    1.0 + 9.0 * (-d2 / (2.0 * sigma * sigma)).exp()
                })
                .collect();
            Some((height, width, px))
        }
    }
}

/// Clean `side x side` picture of +-1 pixels: a disk and a bar on a dark
/// background.
pub fn synthetic_binary_image(side: usize) -> Vec<i8> {
    let c = side as f64 / 2.0;
    let radius = side as f64 / 4.0;
    (0..side * side)
        .map(|k| {
            let (r, col) = ((k / side) as f64 + 0.5, (k % side) as f64 + 0.5);
            let disk = (r - c * 0.8).powi(2) + (col - c).powi(2) <= radius * radius;
            let bar = r > side as f64 * 0.75
                && r < side as f64 * 0.875
                && col > side as f64 * 0.15
                && col < side as f64 * 0.85;
            if disk || bar {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Flips exactly `round(noise * n)` pixels chosen by a seeded shuffle.
pub fn add_flip_noise(clean: &[i8], noise: f64, seed: u64) -> Vec<i8> {
    let n = clean.len();
    let flips = (noise * n as f64).round() as usize;
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = RandomStream::new(seed);
    for k in 0..flips {
        let j = k + rng.next_index(n - k);
        idx.swap(k, j);
    }
    let mut noisy = clean.to_vec();
    for &i in &idx[..flips] {
        noisy[i] = -noisy[i];
    }
    noisy
}

fn load_binary_pgm(path: &Path) -> Result<(usize, Vec<i8>)> {
    require_file(path)?;
    let pgm = parse_pgm(&std::fs::read(path)?)?;
    if pgm.width != pgm.height {
        return Err(Error::Config(format!(
            "denoising needs a square image, got {}x{}",
            pgm.width, pgm.height
        )));
    }
    let half = pgm.maxval as u32;
    let px = pgm
        .pixels
        .iter()
        .map(|&p| if 2 * p as u32 > half { 1 } else { -1 })
        .collect();
    Ok((pgm.width, px))
}

/// Mean of `5000 n` systematic-scan Gibbs states from `start`.
pub fn long_run_reference<T: DiscreteTarget + ?Sized>(target: &T, start: &[usize], seed: u64) -> Result<Reference> {
    let n = target.dims().len();
    let updates = 5000 * n;
    let spec = ChainSpec {
        sampler: SamplerKind::Gibbs,
        scan: ScanOrder::Systematic,
        seed,
        ..ChainSpec::new(SamplerKind::Gibbs)
    };
    // stream reserved for references, never used by replicates
    let mut chain = Chain::new(target, &spec, start, usize::MAX, None)?;
    let mut mean = RunningMean::new(axis_values(target, chain.state()));
    for _ in 0..updates {
        let step = chain.advance()?;
        mean.record(target, chain.state(), step);
    }
    Ok(Reference {
        means: mean.means(),
        provenance: format!(
            "reference=long-run sampler=gibbs scan=systematic updates={updates} seed={seed} stream={}",
            usize::MAX
        ),
    })
}

fn mean_reference<T: DiscreteTarget + ?Sized>(
    target: &T,
    mode: ReferenceMode,
    start: &[usize],
    seed: u64,
) -> Result<(Vec<f64>, Option<Reference>)> {
    let feasible = state_count(target.dims(), ENUMERATION_LIMIT).is_ok();
    match mode {
        ReferenceMode::Exact if !feasible => Err(Error::Config(
            "exact reference requested but the state space exceeds 2^20".into(),
        )),
        ReferenceMode::Exact | ReferenceMode::Auto if feasible => Ok((enumerate_exact(target)?.means, None)),
        _ => {
            let r = long_run_reference(target, start, seed)?;
            Ok((r.means.clone(), Some(r)))
        }
    }
}

pub fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    let mode = config.reference;
    let seed = config.seed;
    let with_means = |target: BuiltTarget, start: Vec<usize>| -> Result<Prepared> {
        let (means, long_run) = mean_reference(target.as_dyn(), mode, &start, seed)?;
        Ok(Prepared {
            target,
            start,
            metric: Metric::MeanDistance(means),
            long_run,
        })
    };
    match &config.target {
        TargetSpec::Validate { dims, low, high, seed } => {
            let mut rng = RandomStream::new(*seed);
            let t = TableTarget::random_positive(dims.clone(), *low, *high, &mut rng)
                .map_err(|e| Error::Config(e.to_string()))?;
            let start = vec![0; dims.len()];
            with_means(BuiltTarget::Table(t), start)
        }
        TargetSpec::Image { source, floor } => {
            let img = match synthetic_image(source) {
                Some((h, w, px)) => ImageTarget::from_pixels(h, w, &px, *floor)?,
                None => {
                    let ImageSource::Pgm(path) = source else { unreachable!() };
                    require_file(path)?;
                    load_pgm(path, *floor)?
                }
            };
            with_means(BuiltTarget::Image(img), vec![0, 0])
        }
        TargetSpec::Ising { side } => {
            let t = IsingTarget::antiferromagnet(*side).map_err(|e| Error::Config(e.to_string()))?;
            let start = vec![0; t.sites()];
            match mode {
                ReferenceMode::Auto | ReferenceMode::Checkerboard => {
                    let boards = [0, 1].map(|p| axis_values(&t, &t.checkerboard(p)));
                    Ok(Prepared {
                        target: BuiltTarget::Ising(t),
                        start,
                        metric: Metric::Checkerboard(boards),
                        long_run: None,
                    })
                }
                _ => with_means(BuiltTarget::Ising(t), start),
            }
        }
        TargetSpec::Denoise {
            side,
            beta,
            eta,
            noise,
            image_seed,
            image,
        } => {
            let (side, clean) = match image {
                Some(path) => load_binary_pgm(path)?,
                None => (*side, synthetic_binary_image(*side)),
            };
            let noisy = add_flip_noise(&clean, *noise, *image_seed);
            let t = IsingTarget::denoising(side, *beta, *eta, &noisy).map_err(|e| Error::Config(e.to_string()))?;
            Ok(Prepared {
                target: BuiltTarget::Ising(t),
                start: noisy.iter().map(|&v| spin_index(v as f64)).collect(),
                metric: Metric::Disagreement(clean.iter().map(|&v| spin_index(v as f64)).collect()),
                long_run: None,
            })
        }
        TargetSpec::Logreg { dataset, label, rule } => {
            require_file(dataset)?;
            let t = load_csv_dataset(dataset, label, rule)?;
            let start = vec![1; t.params()];
            with_means(BuiltTarget::Logreg(t), start)
        }
    }
}

/// Errors and elapsed seconds of one replicate at every recording point.
pub fn run_replicate<T: DiscreteTarget + ?Sized>(
    target: &T,
    prepared_start: &[usize],
    metric: &Metric,
    spec: &ChainSpec,
    schedule: &[usize],
    replicate: usize,
    independent: Option<&IndependentSampler>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let clock = Instant::now();
    let mut chain = Chain::new(target, spec, prepared_start, replicate, independent)?;
    let mut mean = RunningMean::new(axis_values(target, chain.state()));
    let mut errors = Vec::with_capacity(schedule.len());
    let mut seconds = Vec::with_capacity(schedule.len());
    let budget = *schedule.last().unwrap_or(&0);
    let mut next = 0;
    for k in 1..=budget {
        let step = chain.advance()?;
        mean.record(target, chain.state(), step);
        if k == schedule[next] {
            errors.push(metric.error(&mean));
            seconds.push(clock.elapsed().as_secs_f64());
            next += 1;
        }
    }
    Ok((errors, seconds))
}

/// Curve of one sampler plus mean wall-clock seconds at each recording point.
#[derive(Clone, Debug)]
pub struct SamplerRun {
    pub sampler: SamplerKind,
    pub curve: ErrorCurve,
    pub seconds: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub runs: Vec<SamplerRun>,
    pub files: Vec<PathBuf>,
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

/// Output path of each sampler: `out` itself for a single sampler, otherwise
/// `<stem>.<sampler>.csv`.
pub fn output_paths(out: &Path, samplers: &[SamplerKind]) -> Vec<PathBuf> {
    if samplers.len() == 1 {
        vec![out.to_path_buf()]
    } else {
        samplers.iter().map(|s| with_suffix(out, &s.to_string())).collect()
    }
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Runs every configured sampler; replicates run in parallel and are merged
/// in replicate order. Writes CSVs when `config.out` is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let prepared = prepare(config)?;
    run_prepared(config, &prepared)
}

pub fn run_prepared(config: &ExperimentConfig, prepared: &Prepared) -> Result<ExperimentOutput> {
    let target = prepared.target.as_dyn();
    let schedule = record_schedule(config.budget, config.record_stride);
    let mut runs = Vec::new();
    for &sampler in &config.samplers {
        let spec = ChainSpec {
            sampler,
            coefficients: config.coefficients.clone(),
            scan: config.scan,
            seed: config.seed,
        };
        let independent = match sampler {
            SamplerKind::Independent => Some(IndependentSampler::new(target)?),
            _ => None,
        };
        info!(
            "{} {sampler}: {} replicates of {} iterations",
            config.kind, config.replicates, config.budget
        );
        let results: Vec<(Vec<f64>, Vec<f64>)> = (0..config.replicates)
            .into_par_iter()
            .map(|r| {
                run_replicate(
                    target,
                    &prepared.start,
                    &prepared.metric,
                    &spec,
                    &schedule,
                    r,
                    independent.as_ref(),
                )
            })
            .collect::<Result<_>>()?;
        let (errors, times): (Vec<_>, Vec<_>) = results.into_iter().unzip();
        let seconds = (0..schedule.len())
            .map(|k| times.iter().map(|t| t[k]).sum::<f64>() / times.len() as f64)
            .collect();
        runs.push(SamplerRun {
            sampler,
            curve: ErrorCurve::from_replicates(schedule.clone(), errors)?,
            seconds,
        });
    }

    let mut files = Vec::new();
    if let Some(out) = &config.out {
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        for (run, path) in runs.iter().zip(output_paths(out, &config.samplers)) {
            write_file(&path, |w| run.curve.write_csv(w))?;
            let timing = with_suffix(&path, "timing");
            write_file(&timing, |w| {
                writeln!(w, "iteration,mean_seconds")?;
                for (k, s) in run.curve.iterations.iter().zip(&run.seconds) {
                    writeln!(w, "{k},{s:e}")?;
                }
                Ok(())
            })?;
            files.push(path);
            files.push(timing);
        }
        if let Some(reference) = &prepared.long_run {
            let path = with_suffix(out, "reference");
            write_file(&path, |w| {
                writeln!(w, "# {}", reference.provenance)?;
                writeln!(w, "axis,mean")?;
                for (j, m) in reference.means.iter().enumerate() {
                    writeln!(w, "{j},{m:e}")?;
                }
                Ok(())
            })?;
            files.push(path);
        }
    }
    Ok(ExperimentOutput { runs, files })
}

/// Iterations until the lattice energy first drops to `threshold` or below,
/// tracked incrementally from single-spin flips.
pub fn ising_hitting_iterations(
    target: &IsingTarget,
    spec: &ChainSpec,
    start: &[usize],
    replicate: usize,
    threshold: f64,
    budget: usize,
) -> Result<Option<usize>> {
    let mut chain = Chain::new(target, spec, start, replicate, None)?;
    let mut energy = target.energy(start);
    if energy <= threshold {
        return Ok(Some(0));
    }
    for k in 1..=budget {
        let flipped = match chain.advance()? {
            super::chain::Advance::Crossing { axis, .. } => Some(axis),
            super::chain::Advance::Update { axis, changed: true } => Some(axis),
            super::chain::Advance::Update { .. } => None,
            super::chain::Advance::Draw => {
                energy = target.energy(chain.state());
                None
            }
        };
        if let Some(axis) = flipped {
            // delta of flipping back, from the post-flip state
            energy -= target.flip_energy_delta(chain.state(), axis);
        }
        if energy <= threshold {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Disagreement with `clean` of the sign of the weighted mean spin after
/// `budget` iterations from `noisy`.
pub fn denoise_disagreement(
    target: &IsingTarget,
    spec: &ChainSpec,
    noisy: &[usize],
    clean: &[usize],
    replicate: usize,
    budget: usize,
) -> Result<f64> {
    let mut chain = Chain::new(target, spec, noisy, replicate, None)?;
    let mut mean = RunningMean::new(axis_values(target, chain.state()));
    for _ in 0..budget {
        let step = chain.advance()?;
        mean.record(target, chain.state(), step);
    }
    Ok(disagreement(&mean.means(), clean))
}

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p dgibbs-core --test acceptance`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use dgibbs::baselines::RandomStream;
use dgibbs::continuous::{
    gibbs_field, BivariateGaussian, Exponential, IndependentModel, TorusChart, TorusFlow, Univariate,
};
use dgibbs::discrete::{run_events, weighted_expectation, weighted_histogram, Summation};
use dgibbs::field::{
    arc_length, finite_diff_divergence, hamiltonian_field, integrate, phase_curve_distance, sqrt_prime_coefficients,
    truncate_arc_length, FnDensity, FnField, FnHamiltonian,
};
use dgibbs::harness::{
    add_flip_noise, axis_values, coverage_and_period, denoise_disagreement, ising_hitting_iterations, ks_statistic,
    l1_distance, loglog_slope, median, run_experiment, synthetic_binary_image, ChainSpec, ExperimentConfig,
    SamplerKind,
};
use dgibbs::targets::{enumerate_exact, load_csv_dataset, spin_index, Binarization, IsingTarget, TableTarget};
use dgibbs::{CellState, Coefficients};

type Outcome = Result<(bool, String), dgibbs::Error>;
type Criterion = (&'static str, fn() -> Outcome);

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn c1_invariance() -> Outcome {
    let clock = Instant::now();
    let mut rng = RandomStream::new(1);
    let t = TableTarget::random_positive(vec![4, 4], 0.1, 1.0, &mut rng)?;
    let exact = enumerate_exact(&t)?;
    let trace = run_events(&t, &sqrt_prime_coefficients(2)?, &CellState::centered(2), 1_000_000)?;
    let l1 = l1_distance(&weighted_histogram(&trace, &[4, 4])?, &exact.table);
    let secs = clock.elapsed().as_secs_f64();
    Ok((
        l1 < 1e-3 && secs < 5.0,
        format!("L1 {l1:.2e} (< 1e-3), {secs:.2} s (< 5 s)"),
    ))
}

fn c2_rates() -> Outcome {
    let clock = Instant::now();
    let text = "kind = image\nsynthetic = blob\nheight = 32\nwidth = 32\n\
                sampler = dgibbs, independent\nevents = 100000\nreplicates = 100\n";
    let out = run_experiment(&ExperimentConfig::parse(text, Path::new("."), None)?)?;
    let dg = loglog_slope(&out.runs[0].curve, 1000..=100_000)?;
    let ind = loglog_slope(&out.runs[1].curve, 1000..=100_000)?;
    let secs = clock.elapsed().as_secs_f64();
    let ok = (-1.25..=-0.75).contains(&dg) && (-0.65..=-0.35).contains(&ind) && secs < 120.0;
    Ok((
        ok,
        format!(
            "slopes dgibbs {dg:.3} in [-1.25, -0.75], independent {ind:.3} in [-0.65, -0.35], {secs:.1} s (< 120 s)"
        ),
    ))
}

fn c3_logreg() -> Outcome {
    let clock = Instant::now();
    let t = load_csv_dataset(data("iris.csv"), "species", &Binarization::FirstClassVsRest)?;
    let exact = enumerate_exact(&t)?;
    let n = t.params();
    let trace = run_events(&t, &sqrt_prime_coefficients(n)?, &CellState::centered(n), 100_000)?;
    let est = weighted_expectation(&trace, |s| axis_values(&t, s), Summation::Compensated)?;
    let worst = est
        .iter()
        .zip(&exact.means)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let secs = clock.elapsed().as_secs_f64();
    Ok((
        n == 5 && worst < 0.01 && secs < 30.0,
        format!("{n} parameters, max |mean - exact| {worst:.2e} (< 0.01), {secs:.2} s (< 30 s)"),
    ))
}

fn c4_ergodicity() -> Outcome {
    let uniform = TableTarget::new(vec![2, 2], vec![1.0; 4])?;
    let perturbed = TableTarget::new(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0])?;
    let ones = Coefficients::ones(2)?;
    let irrational = Coefficients::new(vec![2f64.sqrt(), 3f64.sqrt()])?;
    let start = CellState::centered(2);

    let rational = coverage_and_period(&run_events(&uniform, &ones, &start, 100_000)?, 1e-6)?;
    let exact = enumerate_exact(&perturbed)?.table;
    let l1_at = |c: &Coefficients, n: usize| -> Result<f64, dgibbs::Error> {
        let trace = run_events(&perturbed, c, &start, n)?;
        Ok(l1_distance(&weighted_histogram(&trace, &[2, 2])?, &exact))
    };
    let stuck = [l1_at(&ones, 1000)?, l1_at(&ones, 100_000)?];

    let trace = run_events(&uniform, &irrational, &start, 100_000)?;
    let cover = coverage_and_period(&trace, 1e-6)?;
    let l1_uniform = l1_distance(&weighted_histogram(&trace, &[2, 2])?, &[0.25; 4]);
    let l1_perturbed = l1_at(&irrational, 100_000)?;

    let ok = rational.period.is_some()
        && stuck[1] > 0.1
        && stuck[1] > 0.5 * stuck[0]
        && cover.fraction == 1.0
        && cover.period.is_none()
        && l1_uniform < 1e-3
        && l1_perturbed < 1e-3;
    Ok((
        ok,
        format!(
            "c=(1,1): period {:?}, perturbed L1 {:.3} at 1e3 and {:.3} at 1e5; \
             c=(sqrt2,sqrt3): coverage {}, L1 {:.1e} uniform and {:.1e} perturbed (< 1e-3)",
            rational.period, stuck[0], stuck[1], cover.fraction, l1_uniform, l1_perturbed
        ),
    ))
}

fn grid_17() -> impl Iterator<Item = [f64; 2]> {
    (0..17 * 17).map(|k| [-2.0 + 0.25 * (k / 17) as f64, -2.0 + 0.25 * (k % 17) as f64])
}

fn c5_divergence() -> Outcome {
    let model = BivariateGaussian::new(0.8)?;
    let coeffs = sqrt_prime_coefficients(2)?;
    let field = gibbs_field(&model, &coeffs)?;
    let mut gibbs_worst: f64 = 0.0;
    for p in grid_17() {
        gibbs_worst = gibbs_worst.max(finite_diff_divergence(&field, &model, &p, 1e-3)?.abs());
    }

    let std_normal = |v: f64| (-v * v / 2.0).exp() / (2.0 * PI).sqrt();
    let ham = FnHamiltonian::new(1, 1, move |x: &[f64], y: &[f64]| -std_normal(x[0]) * std_normal(y[0]));
    let density = FnDensity::new(2, move |s: &[f64]| std_normal(s[0]) * std_normal(s[1]));
    let hmc = hamiltonian_field(
        ham,
        FnDensity::new(2, move |s: &[f64]| std_normal(s[0]) * std_normal(s[1])),
    )?;
    let mut hmc_worst: f64 = 0.0;
    for p in grid_17() {
        hmc_worst = hmc_worst.max(finite_diff_divergence(&hmc, &density, &p, 1e-3)?.abs());
    }
    Ok((
        gibbs_worst < 1e-5 && hmc_worst < 1e-5,
        format!("max |div(p v)| Gibbs {gibbs_worst:.1e}, HMC {hmc_worst:.1e} (< 1e-5)"),
    ))
}

fn c6_scaling() -> Outcome {
    let rotation = FnField::new(2, |x: &[f64], v: &mut [f64]| {
        v[0] = x[1];
        v[1] = -x[0];
    });
    let scaled = FnField::new(2, |x: &[f64], v: &mut [f64]| {
        let s = 1.0 + x[0] * x[0] + x[1] * x[1];
        v[0] = s * x[1];
        v[1] = -s * x[0];
    });
    let start = [0.6, 0.3];
    let a = integrate(&rotation, &start, 1e-3, 5000)?;
    let b = integrate(&scaled, &start, 1e-3, 5000)?;
    let length = arc_length(&a).min(arc_length(&b));
    let d = phase_curve_distance(&truncate_arc_length(&a, length), &truncate_arc_length(&b, length))?;
    Ok((
        d < 1e-3,
        format!("arc length {length:.3}, phase curve distance {d:.1e} (< 1e-3)"),
    ))
}

fn c7_exponential() -> Outcome {
    let exp = Exponential { rate: 1.0 };
    let model = IndependentModel::new(vec![Arc::new(exp)]);
    let chart = TorusChart::for_model(&model);
    let coeffs = sqrt_prime_coefficients(1)?;
    let mut flow = TorusFlow::new(&model, &chart, &coeffs, &[1.0], 0.01)?;
    let traj = flow.record(100_000, 1)?;
    let xs: Vec<f64> = traj.points.iter().map(|p| p[0]).collect();
    let ks = ks_statistic(&xs, |x| exp.cdf(x))?;
    Ok((
        chart.axis(0).is_cdf() && ks < 0.01,
        format!("KS {ks:.2e} over {} samples (< 0.01)", xs.len()),
    ))
}

fn c8_ising() -> Outcome {
    let small = IsingTarget::antiferromagnet(3)?;
    let exact = enumerate_exact(&small)?;
    let trace = run_events(&small, &sqrt_prime_coefficients(9)?, &CellState::centered(9), 1_000_000)?;
    let est = weighted_expectation(&trace, |s| axis_values(&small, s), Summation::Compensated)?;
    let worst = est
        .iter()
        .zip(&exact.means)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let lattice = IsingTarget::antiferromagnet(28)?;
    let threshold = -0.95 * lattice.edge_count() as f64;
    let start = vec![0; lattice.sites()];
    let hitting = |sampler: SamplerKind| -> Result<f64, dgibbs::Error> {
        let spec = ChainSpec::new(sampler);
        let hits = (0..10)
            .map(|r| {
                let k = ising_hitting_iterations(&lattice, &spec, &start, r, threshold, 2_000_000)?;
                Ok(k.map_or(f64::INFINITY, |k| k as f64))
            })
            .collect::<Result<Vec<_>, dgibbs::Error>>()?;
        Ok(median(&hits))
    };
    let dg = hitting(SamplerKind::DGibbs)?;
    let gibbs = hitting(SamplerKind::Gibbs)?;
    Ok((
        worst < 5e-3 && dg <= gibbs,
        format!(
            "3x3 max |mean - exact| {worst:.2e} (< 5e-3); 28x28 median iterations to E <= {threshold:.1}: \
             dgibbs {dg}, gibbs {gibbs}"
        ),
    ))
}

fn c9_denoise() -> Outcome {
    let side = 64;
    let clean = synthetic_binary_image(side);
    let noisy = add_flip_noise(&clean, 0.1, 1);
    let target = IsingTarget::denoising(side, 1.0, 2.1, &noisy)?;
    let to_idx = |px: &[i8]| px.iter().map(|&v| spin_index(v as f64)).collect::<Vec<_>>();
    let (clean, noisy) = (to_idx(&clean), to_idx(&noisy));
    let budget = 20 * side * side;
    let run = |sampler: SamplerKind| -> Result<f64, dgibbs::Error> {
        let spec = ChainSpec::new(sampler);
        let d = (0..10)
            .map(|r| denoise_disagreement(&target, &spec, &noisy, &clean, r, budget))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(median(&d))
    };
    let dg = run(SamplerKind::DGibbs)?;
    let gibbs = run(SamplerKind::Gibbs)?;
    Ok((
        dg < gibbs,
        format!("median disagreement after {budget} updates: dgibbs {dg:.4}, gibbs {gibbs:.4}"),
    ))
}

fn c10_determinism() -> Outcome {
    let iris = data("iris.csv");
    let configs = [
        "kind = validate\nevents = 1000000\nreplicates = 2\n".to_string(),
        "kind = image\nsynthetic = blob\nevents = 100000\nreplicates = 8\n".to_string(),
        format!(
            "kind = logreg\ndataset = {}\nlabel = species\nevents = 100000\nreplicates = 2\n",
            iris.display()
        ),
        "kind = ising\nside = 3\nreference = exact\nevents = 1000000\n".to_string(),
        "kind = ising\nside = 28\nevents = 200000\nreplicates = 4\n".to_string(),
        "kind = denoise\nside = 64\nevents = 81920\nreplicates = 4\n".to_string(),
    ];
    let dir = tempfile::tempdir()?;
    let mut compared = 0;
    for (k, text) in configs.iter().enumerate() {
        let mut bytes = Vec::new();
        for pass in 0..2 {
            let out = dir.path().join(format!("run{k}-{pass}.csv"));
            let full = format!("{text}sampler = dgibbs\nout = {}\n", out.display());
            run_experiment(&ExperimentConfig::parse(&full, Path::new("."), None)?)?;
            bytes.push(std::fs::read(&out)?);
        }
        if bytes[0] != bytes[1] || bytes[0].is_empty() {
            return Ok((false, format!("config {k} produced different CSVs")));
        }
        compared += 1;
    }
    Ok((
        true,
        format!("{compared} configs produced byte-identical CSVs on repeat"),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("exact invariance", c1_invariance),
        ("convergence-rate separation", c2_rates),
        ("logistic regression oracle", c3_logreg),
        ("ergodicity dichotomy", c4_ergodicity),
        ("divergence-free fields", c5_divergence),
        ("scaling preserves phase curves", c6_scaling),
        ("1D exponential via CDF chart", c7_exponential),
        ("Ising means and hitting time", c8_ising),
        ("denoising", c9_denoise),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!("[{}] {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, k + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

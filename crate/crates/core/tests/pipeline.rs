use std::path::{Path, PathBuf};
use std::sync::Arc;

use dgibbs::continuous::{Exponential, Gaussian, IndependentModel, TorusChart, TorusFlow, Univariate};
use dgibbs::discrete::{run_events, weighted_expectation, Summation};
use dgibbs::field::sqrt_prime_coefficients;
use dgibbs::harness::{axis_values, ks_statistic, run_experiment, ExperimentConfig};
use dgibbs::targets::{encode_pgm, enumerate_exact, load_csv_dataset, load_pgm, Binarization, Floor, Pgm};
use dgibbs::CellState;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

#[test]
fn pgm_file_to_sampled_marginals() {
    let (w, h) = (7, 5);
    let pixels: Vec<u16> = (0..w * h).map(|k| ((k * 37) % 250 + 5) as u16).collect();
    let pgm = Pgm {
        width: w,
        height: h,
        maxval: 255,
        pixels,
    };
    let dir = tempfile::tempdir().unwrap();
    for binary in [false, true] {
        let path = dir.path().join(format!("img{binary}.pgm"));
        std::fs::write(&path, encode_pgm(&pgm, binary)).unwrap();
        let target = load_pgm(&path, Floor::default()).unwrap();
        let total: f64 = target.pixel_mass().iter().sum();
        let row_mean: f64 = target
            .row_sums()
            .iter()
            .enumerate()
            .map(|(r, s)| r as f64 * s)
            .sum::<f64>()
            / total;
        let col_mean: f64 = target
            .col_sums()
            .iter()
            .enumerate()
            .map(|(c, s)| c as f64 * s)
            .sum::<f64>()
            / total;

        let trace = run_events(
            &target,
            &sqrt_prime_coefficients(2).unwrap(),
            &CellState::centered(2),
            200_000,
        )
        .unwrap();
        let m = weighted_expectation(&trace, |s| axis_values(&target, s), Summation::Naive).unwrap();
        assert!((m[0] - row_mean).abs() < 1e-3, "{} vs {row_mean}", m[0]);
        assert!((m[1] - col_mean).abs() < 1e-3, "{} vs {col_mean}", m[1]);
    }
}

#[test]
fn wine_posterior_means_match_enumeration() {
    let t = load_csv_dataset(data("wine.csv"), "class", &Binarization::FirstClassVsRest).unwrap();
    let exact = enumerate_exact(&t).unwrap();
    let n = t.params();
    let trace = run_events(
        &t,
        &sqrt_prime_coefficients(n).unwrap(),
        &CellState::centered(n),
        200_000,
    )
    .unwrap();
    let m = weighted_expectation(&trace, |s| axis_values(&t, s), Summation::Compensated).unwrap();
    for (a, b) in m.iter().zip(&exact.means) {
        assert!((a - b).abs() < 0.02, "{a} vs {b}");
    }
}

#[test]
fn harness_logreg_reaches_exact_means() {
    let text = format!(
        "kind = logreg\ndataset = {}\nlabel = species\nevents = 50000\nreplicates = 4\nsampler = dgibbs, gibbs\n",
        data("iris.csv").display()
    );
    let out = run_experiment(&ExperimentConfig::parse(&text, Path::new("."), None).unwrap()).unwrap();
    for run in &out.runs {
        assert!(
            run.curve.last_mean() < 0.02,
            "{}: {}",
            run.sampler,
            run.curve.last_mean()
        );
    }
}

#[test]
fn product_flow_marginals_pass_ks() {
    let axes: Vec<Arc<dyn Univariate>> = vec![Arc::new(Exponential { rate: 1.0 }), Arc::new(Gaussian::standard())];
    let model = IndependentModel::new(axes.clone());
    let chart = TorusChart::for_model(&model);
    let c = sqrt_prime_coefficients(2).unwrap();
    let mut flow = TorusFlow::new(&model, &chart, &c, &[0.5, 0.0], 1e-3).unwrap();
    let traj = flow.record(100_000, 7).unwrap();
    assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
    for (j, dist) in axes.iter().enumerate() {
        let xs: Vec<f64> = traj.points.iter().map(|p| p[j]).collect();
        let ks = ks_statistic(&xs, |x| dist.cdf(x)).unwrap();
        assert!(ks < 0.01, "axis {j}: {ks}");
    }
}

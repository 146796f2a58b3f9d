//! Fixtures shared by the criterion benches.

use std::path::Path;

use dgibbs::baselines::RandomStream;
use dgibbs::harness::{add_flip_noise, synthetic_binary_image};
use dgibbs::targets::{load_csv_dataset, Binarization, IsingTarget, LogRegTarget, TableTarget};

/// Random positive table of the given shape; the same for every call.
pub fn table(dims: Vec<usize>) -> TableTarget {
    let mut rng = RandomStream::new(1);
    TableTarget::random_positive(dims, 0.1, 1.0, &mut rng).expect("valid dims")
}

pub fn antiferromagnet(side: usize) -> IsingTarget {
    IsingTarget::antiferromagnet(side).expect("side is positive")
}

/// Denoising model of the synthetic binary image with 10% flipped pixels,
/// plus the noisy start state as spin indices.
pub fn denoising(side: usize) -> (IsingTarget, Vec<usize>) {
    let noisy = add_flip_noise(&synthetic_binary_image(side), 0.1, 1);
    let start = noisy.iter().map(|&v| usize::from(v > 0)).collect();
    (
        IsingTarget::denoising(side, 1.0, 2.1, &noisy).expect("square image"),
        start,
    )
}

/// Iris, first class against the rest.
pub fn iris() -> LogRegTarget {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/iris.csv");
    load_csv_dataset(path, "species", &Binarization::FirstClassVsRest).expect("bundled dataset")
}

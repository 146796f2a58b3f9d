use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use dgibbs::baselines::{gibbs_update, RandomStream};
use dgibbs::continuous::{BivariateGaussian, TorusChart, TorusFlow};
use dgibbs::discrete::EventSampler;
use dgibbs::field::sqrt_prime_coefficients;
use dgibbs::targets::enumerate_exact;
use dgibbs::{CellState, DiscreteTarget};
use dgibbs_bench::{antiferromagnet, denoising, iris, table};

fn events<T: DiscreteTarget>(c: &mut Criterion, name: &str, target: &T, start: Vec<usize>) {
    let n = target.dims().len();
    let coeffs = sqrt_prime_coefficients(n).unwrap();
    let mut sampler = EventSampler::new(target, coeffs, CellState::new(start, vec![0.5; n])).unwrap();
    c.bench_function(name, |b| b.iter(|| black_box(sampler.step().unwrap())));
}

fn event_stepping(c: &mut Criterion) {
    events(c, "event/table_32x32", &table(vec![32, 32]), vec![0, 0]);
    let ising = antiferromagnet(28);
    events(c, "event/ising_28x28", &ising, vec![0; ising.sites()]);
    let (denoise, start) = denoising(64);
    events(c, "event/denoise_64x64", &denoise, start);
    events(c, "event/logreg_iris", &iris(), vec![1; 5]);
}

fn gibbs_updates(c: &mut Criterion) {
    let ising = antiferromagnet(28);
    let mut state = vec![0; ising.sites()];
    let mut rng = RandomStream::new(0);
    let mut buf = Vec::new();
    let mut axis = 0;
    c.bench_function("gibbs/ising_28x28", |b| {
        b.iter(|| {
            gibbs_update(&ising, &mut state, axis, &mut buf, &mut rng).unwrap();
            axis = (axis + 1) % state.len();
        })
    });
}

fn continuous_flow(c: &mut Criterion) {
    let model = BivariateGaussian::new(0.8).unwrap();
    let chart = TorusChart::for_model(&model);
    let coeffs = sqrt_prime_coefficients(2).unwrap();
    let mut flow = TorusFlow::new(&model, &chart, &coeffs, &[0.1, -0.2], 1e-3).unwrap();
    c.bench_function("flow/gaussian_rk4_step", |b| b.iter(|| flow.step().unwrap()));
}

fn enumeration(c: &mut Criterion) {
    let ising = antiferromagnet(4);
    c.bench_function("exact/ising_4x4", |b| {
        b.iter_batched(
            || &ising,
            |t| black_box(enumerate_exact(t).unwrap()),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, event_stepping, gibbs_updates, continuous_flow, enumeration);
criterion_main!(benches);

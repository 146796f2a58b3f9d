use std::borrow::Cow;

use super::config::{CoefficientMode, SamplerKind};
use crate::baselines::{gibbs_update, IndependentSampler, RandomStream, ScanOrder};
use crate::discrete::{CellState, DiscreteTarget, EventSampler};
use crate::error::{Error, Result};
use crate::field::Coefficients;

/// What one iteration did.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Advance {
    /// The dynamical sampler left its cell through `axis` after `dwell`;
    /// the dwell belongs to the state before the crossing.
    Crossing { axis: usize, dwell: f64 },
    /// Gibbs resampled `axis`; the new state counts with weight one.
    Update { axis: usize, changed: bool },
    /// A fresh independent draw with weight one.
    Draw,
}

/// Sampler settings shared by all replicates.
#[derive(Clone, Debug)]
pub struct ChainSpec {
    pub sampler: SamplerKind,
    pub coefficients: CoefficientMode,
    pub scan: ScanOrder,
    pub seed: u64,
}

impl ChainSpec {
    pub fn new(sampler: SamplerKind) -> Self {
        Self {
            sampler,
            coefficients: CoefficientMode::SqrtPrimes,
            scan: ScanOrder::Systematic,
            seed: 0,
        }
    }

    pub fn coefficients_for(&self, n: usize) -> Result<Coefficients> {
        match self.sampler {
            SamplerKind::Suzuki => Coefficients::ones(n),
            _ => self.coefficients.build(n),
        }
    }
}

/// Root of `x^(n+1) = x + 1`.
fn generalized_golden_ratio(n: usize) -> f64 {
    let mut x = 2.0f64;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (n as f64 + 1.0));
    }
    x
}

/// Start offsets of deterministic replicate `r`: one half on every axis for
/// `r = 0`, then a Kronecker low-discrepancy sequence shifted by one half.
pub fn start_offsets(n: usize, replicate: usize) -> Vec<f64> {
    let g = generalized_golden_ratio(n);
    (0..n)
        .map(|j| {
            let alpha = (1.0 / g.powi(j as i32 + 1)).fract();
            let o = (0.5 + replicate as f64 * alpha).fract();
            o.min(1.0 - f64::EPSILON)
        })
        .collect()
}

enum Inner<'a, T: ?Sized> {
    Dynamic(EventSampler<'a, T>),
    Gibbs {
        target: &'a T,
        state: Vec<usize>,
        rng: RandomStream,
        scan: ScanOrder,
        next_axis: usize,
        buf: Vec<f64>,
    },
    Independent {
        sampler: Cow<'a, IndependentSampler>,
        state: Vec<usize>,
        rng: RandomStream,
    },
}

/// One replicate of any configured sampler, advanced one iteration at a time.
pub struct Chain<'a, T: ?Sized> {
    inner: Inner<'a, T>,
}

impl<'a, T: DiscreteTarget + ?Sized> Chain<'a, T> {
    /// Deterministic samplers start from `start` with replicate-dependent
    /// offsets; stochastic ones use stream `replicate` of the seed.
    /// `independent` avoids re-enumerating the target for every replicate.
    pub fn new(
        target: &'a T,
        spec: &ChainSpec,
        start: &[usize],
        replicate: usize,
        independent: Option<&'a IndependentSampler>,
    ) -> Result<Self> {
        let n = target.dims().len();
        if start.len() != n {
            return Err(Error::Argument(format!("start has {} axes, target {n}", start.len())));
        }
        let rng = RandomStream::with_stream(spec.seed, replicate as u64);
        let inner = match spec.sampler {
            SamplerKind::DGibbs | SamplerKind::Suzuki => {
                let s = CellState::new(start.to_vec(), start_offsets(n, replicate));
                Inner::Dynamic(EventSampler::new(target, spec.coefficients_for(n)?, s)?)
            }
            SamplerKind::Gibbs => Inner::Gibbs {
                target,
                state: start.to_vec(),
                rng,
                scan: spec.scan,
                next_axis: 0,
                buf: Vec::new(),
            },
            SamplerKind::Independent => Inner::Independent {
                sampler: match independent {
                    Some(s) => Cow::Borrowed(s),
                    None => Cow::Owned(IndependentSampler::new(target)?),
                },
                state: start.to_vec(),
                rng,
            },
        };
        Ok(Self { inner })
    }

    /// Current discrete state.
    pub fn state(&self) -> &[usize] {
        match &self.inner {
            Inner::Dynamic(s) => &s.state().cell,
            Inner::Gibbs { state, .. } | Inner::Independent { state, .. } => state,
        }
    }

    pub fn advance(&mut self) -> Result<Advance> {
        match &mut self.inner {
            Inner::Dynamic(s) => {
                let e = s.step()?;
                Ok(Advance::Crossing {
                    axis: e.axis,
                    dwell: e.dwell,
                })
            }
            Inner::Gibbs {
                target,
                state,
                rng,
                scan,
                next_axis,
                buf,
            } => {
                let n = state.len();
                let axis = match scan {
                    ScanOrder::Systematic => {
                        let a = *next_axis;
                        *next_axis = (a + 1) % n;
                        a
                    }
                    ScanOrder::Random => rng.next_index(n),
                };
                let old = state[axis];
                gibbs_update(*target, state, axis, buf, rng)?;
                Ok(Advance::Update {
                    axis,
                    changed: state[axis] != old,
                })
            }
            Inner::Independent { sampler, state, rng } => {
                sampler.draw_into(rng, state);
                Ok(Advance::Draw)
            }
        }
    }
}

/// Dwell-weighted running mean of per-axis values, updated in O(1) per
/// single-axis change.
#[derive(Clone, Debug)]
pub struct RunningMean {
    values: Vec<f64>,
    /// Weighted sum up to the last change of each axis.
    partial: Vec<f64>,
    /// Total weight at the last change of each axis.
    since: Vec<f64>,
    total: f64,
}

impl RunningMean {
    pub fn new(values: Vec<f64>) -> Self {
        let n = values.len();
        Self {
            values,
            partial: vec![0.0; n],
            since: vec![0.0; n],
            total: 0.0,
        }
    }

    pub fn accumulate(&mut self, weight: f64) {
        self.total += weight;
    }

    pub fn set(&mut self, axis: usize, value: f64) {
        self.partial[axis] += self.values[axis] * (self.total - self.since[axis]);
        self.since[axis] = self.total;
        self.values[axis] = value;
    }

    pub fn total_weight(&self) -> f64 {
        self.total
    }

    /// Current estimate; the current values while no weight has accrued.
    pub fn means(&self) -> Vec<f64> {
        if self.total <= 0.0 {
            return self.values.clone();
        }
        (0..self.values.len())
            .map(|j| (self.partial[j] + self.values[j] * (self.total - self.since[j])) / self.total)
            .collect()
    }

    /// Folds one iteration of `chain` into the estimate.
    pub fn record<T: DiscreteTarget + ?Sized>(&mut self, target: &T, state: &[usize], step: Advance) {
        match step {
            Advance::Crossing { axis, dwell } => {
                self.accumulate(dwell);
                self.set(axis, target.axis_value(axis, state[axis]));
            }
            Advance::Update { axis, changed } => {
                if changed {
                    self.set(axis, target.axis_value(axis, state[axis]));
                }
                self.accumulate(1.0);
            }
            Advance::Draw => {
                for (j, &s) in state.iter().enumerate() {
                    self.set(j, target.axis_value(j, s));
                }
                self.accumulate(1.0);
            }
        }
    }
}

pub fn axis_values<T: DiscreteTarget + ?Sized>(target: &T, state: &[usize]) -> Vec<f64> {
    state
        .iter()
        .enumerate()
        .map(|(j, &s)| target.axis_value(j, s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{run_events, weighted_expectation, Summation};
    use crate::targets::TableTarget;

    #[test]
    fn offsets() {
        assert_eq!(start_offsets(3, 0), vec![0.5; 3]);
        let a = start_offsets(2, 1);
        let b = start_offsets(2, 2);
        assert!(a.iter().chain(&b).all(|o| (0.0..1.0).contains(o)));
        assert_ne!(a, b);
        let g = generalized_golden_ratio(1);
        assert!((g - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn running_mean_matches_trace_estimate() {
        let mut rng = RandomStream::new(4);
        let t = TableTarget::random_positive(vec![3, 4], 0.2, 1.0, &mut rng).unwrap();
        let spec = ChainSpec::new(SamplerKind::DGibbs);
        let mut chain = Chain::new(&t, &spec, &[0, 0], 0, None).unwrap();
        let mut rm = RunningMean::new(axis_values(&t, chain.state()));
        for _ in 0..5000 {
            let step = chain.advance().unwrap();
            rm.record(&t, chain.state(), step);
        }
        let c = sqrt_primes(2);
        let trace = run_events(&t, &c, &CellState::centered(2), 5000).unwrap();
        let direct = weighted_expectation(&trace, |s| vec![s[0] as f64, s[1] as f64], Summation::Naive).unwrap();
        let m = rm.means();
        for j in 0..2 {
            assert!((m[j] - direct[j]).abs() < 1e-12);
        }
    }

    fn sqrt_primes(n: usize) -> Coefficients {
        crate::field::sqrt_prime_coefficients(n).unwrap()
    }

    #[test]
    fn gibbs_mean_counts_every_update() {
        let t = TableTarget::new(vec![2], vec![1.0, 3.0]).unwrap();
        let spec = ChainSpec::new(SamplerKind::Gibbs);
        let mut chain = Chain::new(&t, &spec, &[0], 0, None).unwrap();
        let mut rm = RunningMean::new(axis_values(&t, chain.state()));
        let mut ones = 0;
        for _ in 0..1000 {
            let step = chain.advance().unwrap();
            ones += chain.state()[0];
            rm.record(&t, chain.state(), step);
        }
        assert!((rm.means()[0] - ones as f64 / 1000.0).abs() < 1e-12);
        assert_eq!(rm.total_weight(), 1000.0);
    }

    #[test]
    fn suzuki_uses_unit_coefficients() {
        let spec = ChainSpec::new(SamplerKind::Suzuki);
        assert_eq!(spec.coefficients_for(3).unwrap().values(), &[1.0; 3]);
    }
}

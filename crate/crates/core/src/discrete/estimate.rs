use super::{flat_index, state_count, EventTrace};
use crate::error::{Error, Result};

/// Accumulation order for weighted sums.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Summation {
    /// Plain left-to-right double precision.
    #[default]
    Naive,
    /// Neumaier-compensated, still left to right.
    Compensated,
}

#[derive(Clone, Copy, Default)]
struct Acc {
    sum: f64,
    carry: f64,
}

impl Acc {
    fn add(&mut self, x: f64, mode: Summation) {
        match mode {
            Summation::Naive => self.sum += x,
            Summation::Compensated => {
                let t = self.sum + x;
                if self.sum.abs() >= x.abs() {
                    self.carry += (self.sum - t) + x;
                } else {
                    self.carry += (x - t) + self.sum;
                }
                self.sum = t;
            }
        }
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `sum_k t_k f(x[k]) / sum_k t_k` over the samples of `trace`.
pub fn weighted_expectation<F>(trace: &EventTrace, mut f: F, mode: Summation) -> Result<Vec<f64>>
where
    F: FnMut(&[usize]) -> Vec<f64>,
{
    let mut num: Vec<Acc> = Vec::new();
    let mut den = Acc::default();
    trace.for_each_sample(|state, dwell| {
        den.add(dwell, mode);
        if dwell == 0.0 && !num.is_empty() {
            return;
        }
        let value = f(state);
        if num.is_empty() {
            num = vec![Acc::default(); value.len()];
        }
        for (acc, v) in num.iter_mut().zip(value) {
            acc.add(dwell * v, mode);
        }
    });
    let total = den.value();
    if !(total > 0.0) {
        return Err(Error::DegenerateTrace);
    }
    Ok(num.iter().map(|a| a.value() / total).collect())
}

/// Dwell fraction of every state, flattened row-major over `dims`.
pub fn weighted_histogram(trace: &EventTrace, dims: &[usize]) -> Result<Vec<f64>> {
    if dims != trace.dims() {
        return Err(Error::Argument(format!(
            "histogram dims {dims:?} differ from trace dims {:?}",
            trace.dims()
        )));
    }
    let n = state_count(dims, 1 << 28)?;
    let mut hist = vec![0.0; n];
    let mut total = 0.0;
    trace.for_each_sample(|state, dwell| {
        hist[flat_index(dims, state)] += dwell;
        total += dwell;
    });
    if !(total > 0.0) {
        return Err(Error::DegenerateTrace);
    }
    for h in &mut hist {
        *h /= total;
    }
    Ok(hist)
}

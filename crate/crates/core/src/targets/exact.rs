use crate::discrete::{log_sum_exp, state_count, unflatten, DiscreteTarget};
use crate::error::Result;

/// Largest state space `enumerate_exact` accepts.
pub const ENUMERATION_LIMIT: u128 = 1 << 20;

/// Exact moments of a small discrete target.
#[derive(Clone, Debug)]
pub struct ExactMoments {
    /// `ln Z`; `Z` itself can overflow for energy-based targets.
    pub log_z: f64,
    /// Per-axis mean of `axis_value`.
    pub means: Vec<f64>,
    /// Normalized probabilities, row-major.
    pub table: Vec<f64>,
}

impl ExactMoments {
    pub fn z(&self) -> f64 {
        self.log_z.exp()
    }
}

pub fn enumerate_exact<T: DiscreteTarget + ?Sized>(target: &T) -> Result<ExactMoments> {
    let dims = target.dims();
    let n = state_count(dims, ENUMERATION_LIMIT)?;
    let mut state = vec![0; dims.len()];
    let log_mass: Vec<f64> = (0..n)
        .map(|k| {
            unflatten(dims, k, &mut state);
            target.log_mass(&state)
        })
        .collect();
    let log_z = log_sum_exp(log_mass.iter().copied());
    let table: Vec<f64> = log_mass.iter().map(|l| (l - log_z).exp()).collect();
    let mut means = vec![0.0; dims.len()];
    for (k, &p) in table.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        unflatten(dims, k, &mut state);
        for (j, m) in means.iter_mut().enumerate() {
            *m += p * target.axis_value(j, state[j]);
        }
    }
    Ok(ExactMoments { log_z, means, table })
}

use crate::error::{Error, Result};

/// `ln sum_k exp(x_k)`, `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    max + xs.into_iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Number of states, or an error past `limit`.
pub fn state_count(dims: &[usize], limit: u128) -> Result<usize> {
    let mut n: u128 = 1;
    for &d in dims {
        n = n.saturating_mul(d as u128);
        if n > limit {
            return Err(Error::Capacity { states: n, limit });
        }
    }
    Ok(n as usize)
}

/// Row-major flat index; the last axis varies fastest.
pub fn flat_index(dims: &[usize], state: &[usize]) -> usize {
    state.iter().zip(dims).fold(0, |acc, (&s, &d)| acc * d + s)
}

pub fn unflatten(dims: &[usize], mut index: usize, out: &mut [usize]) {
    for j in (0..dims.len()).rev() {
        out[j] = index % dims[j];
        index /= dims[j];
    }
}

/// A distribution over integer vectors `0 <= i_j < d_j`, given by unnormalized
/// masses.
///
/// Only `dims` and `log_mass` are required. Targets with local structure
/// should override the conditional hooks so a sampler never touches more than
/// a handful of masses per axis.
pub trait DiscreteTarget: Sync {
    fn dims(&self) -> &[usize];

    /// `ln p(state)` up to a constant; `-inf` for zero-mass states.
    fn log_mass(&self, state: &[usize]) -> f64;

    /// `ln S_j(state)` with `S_j = sum over i_j of p(.., i_j, ..)`; does not
    /// depend on `state[axis]`.
    fn log_axis_sum(&self, axis: usize, state: &[usize]) -> f64 {
        let mut probe = state.to_vec();
        let masses: Vec<f64> = (0..self.dims()[axis])
            .map(|v| {
                probe[axis] = v;
                self.log_mass(&probe)
            })
            .collect();
        log_sum_exp(masses.iter().copied())
    }

    /// `p(state_j | state_\j) = p(state) / S_j(state)`, zero for zero-mass
    /// states.
    fn conditional(&self, axis: usize, state: &[usize]) -> f64 {
        let lm = self.log_mass(state);
        if lm == f64::NEG_INFINITY {
            return 0.0;
        }
        (lm - self.log_axis_sum(axis, state)).exp()
    }

    fn conditionals_into(&self, state: &[usize], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.conditional(j, state);
        }
    }

    /// Full conditional distribution of `axis` given the other coordinates,
    /// written into `out` (length `dims()[axis]`). All zeros when the whole
    /// line has zero mass.
    fn axis_conditionals(&self, axis: usize, state: &[usize], out: &mut [f64]) {
        let mut probe = state.to_vec();
        for (v, o) in out.iter_mut().enumerate() {
            probe[axis] = v;
            *o = self.log_mass(&probe);
        }
        let norm = log_sum_exp(out.iter().copied());
        for o in out.iter_mut() {
            *o = if norm == f64::NEG_INFINITY {
                0.0
            } else {
                (*o - norm).exp()
            };
        }
    }

    /// Axes whose conditional may change when `axis` changes value, `axis`
    /// included. `None` means every axis.
    fn dependents(&self, _axis: usize) -> Option<&[usize]> {
        None
    }

    /// Numeric value of index `index` on `axis`, used by mean estimates.
    fn axis_value(&self, _axis: usize, index: usize) -> f64 {
        index as f64
    }
}

impl<T: DiscreteTarget + ?Sized> DiscreteTarget for &T {
    fn dims(&self) -> &[usize] {
        (**self).dims()
    }

    fn log_mass(&self, state: &[usize]) -> f64 {
        (**self).log_mass(state)
    }

    fn log_axis_sum(&self, axis: usize, state: &[usize]) -> f64 {
        (**self).log_axis_sum(axis, state)
    }

    fn conditional(&self, axis: usize, state: &[usize]) -> f64 {
        (**self).conditional(axis, state)
    }

    fn conditionals_into(&self, state: &[usize], out: &mut [f64]) {
        (**self).conditionals_into(state, out)
    }

    fn axis_conditionals(&self, axis: usize, state: &[usize], out: &mut [f64]) {
        (**self).axis_conditionals(axis, state, out)
    }

    fn dependents(&self, axis: usize) -> Option<&[usize]> {
        (**self).dependents(axis)
    }

    fn axis_value(&self, axis: usize, index: usize) -> f64 {
        (**self).axis_value(axis, index)
    }
}

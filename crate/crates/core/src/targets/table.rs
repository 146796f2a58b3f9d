use crate::baselines::RandomStream;
use crate::discrete::{state_count, unflatten, DiscreteTarget};
use crate::error::{Error, Result};

/// A dense table of unnormalized masses, row-major over `dims`, with every
/// axis sum precomputed.
#[derive(Clone, Debug)]
pub struct TableTarget {
    dims: Vec<usize>,
    masses: Vec<f64>,
    strides: Vec<usize>,
    /// `axis_sums[j][k]` is `S_j` of flat state `k`.
    axis_sums: Vec<Vec<f64>>,
}

impl TableTarget {
    pub fn new(dims: Vec<usize>, masses: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Argument(format!(
                "dims must be non-empty and positive, got {dims:?}"
            )));
        }
        let n = state_count(&dims, 1 << 28)?;
        if masses.len() != n {
            return Err(Error::Argument(format!("{} masses for {n} states", masses.len())));
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::Argument(format!(
                "masses must be finite and non-negative, got {m}"
            )));
        }
        if !masses.iter().any(|&m| m > 0.0) {
            return Err(Error::Argument("at least one state needs positive mass".into()));
        }

        let mut strides = vec![1; dims.len()];
        for j in (0..dims.len() - 1).rev() {
            strides[j] = strides[j + 1] * dims[j + 1];
        }
        let mut state = vec![0; dims.len()];
        let axis_sums = (0..dims.len())
            .map(|j| {
                // accumulate into the slot of the line's first state
                let mut line = vec![0.0; n];
                for (k, &m) in masses.iter().enumerate() {
                    unflatten(&dims, k, &mut state);
                    line[k - state[j] * strides[j]] += m;
                }
                (0..n)
                    .map(|k| {
                        unflatten(&dims, k, &mut state);
                        line[k - state[j] * strides[j]]
                    })
                    .collect()
            })
            .collect();

        Ok(Self {
            dims,
            masses,
            strides,
            axis_sums,
        })
    }

    /// Masses drawn uniformly from `[low, high)`.
    pub fn random_positive(dims: Vec<usize>, low: f64, high: f64, rng: &mut RandomStream) -> Result<Self> {
        if !(low > 0.0 && high > low) {
            return Err(Error::Argument(format!("need 0 < low < high, got [{low}, {high})")));
        }
        let n = state_count(&dims, 1 << 28)?;
        let masses = (0..n).map(|_| low + (high - low) * rng.next_uniform()).collect();
        Self::new(dims, masses)
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, state: &[usize]) -> f64 {
        self.masses[self.flat(state)]
    }

    /// `S_j(state)` from the precomputed table.
    pub fn axis_sum(&self, axis: usize, state: &[usize]) -> f64 {
        self.axis_sums[axis][self.flat(state)]
    }

    fn flat(&self, state: &[usize]) -> usize {
        state.iter().zip(&self.strides).map(|(s, st)| s * st).sum()
    }
}

impl DiscreteTarget for TableTarget {
    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn log_mass(&self, state: &[usize]) -> f64 {
        self.mass(state).ln()
    }

    fn log_axis_sum(&self, axis: usize, state: &[usize]) -> f64 {
        self.axis_sum(axis, state).ln()
    }

    fn conditional(&self, axis: usize, state: &[usize]) -> f64 {
        let k = self.flat(state);
        let m = self.masses[k];
        if m == 0.0 {
            0.0
        } else {
            m / self.axis_sums[axis][k]
        }
    }

    fn axis_conditionals(&self, axis: usize, state: &[usize], out: &mut [f64]) {
        let base = self.flat(state) - state[axis] * self.strides[axis];
        let sum = self.axis_sums[axis][base];
        for (v, o) in out.iter_mut().enumerate() {
            let m = self.masses[base + v * self.strides[axis]];
            *o = if sum > 0.0 { m / sum } else { 0.0 };
        }
    }
}

use crate::discrete::DiscreteTarget;
use crate::error::{Error, Result};

/// `ln(1 + e^x)` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `1 / (1 + e^-x)`.
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Spin model on an `L x L` square lattice with open boundaries and energy
///
/// `E(s) = J sum_{i~j} s_i s_j - eta sum_i s_i xi_i`,  `p(s) ∝ exp(-E(s))`.
///
/// Site `i = row * L + col` is axis `i`; index 0 is spin -1 and index 1 is
/// spin +1. `J = 1` gives the antiferromagnet whose ground states are the
/// checkerboards; `J = -beta` with an external image `xi` gives the
/// denoising model.
#[derive(Clone, Debug)]
pub struct IsingTarget {
    side: usize,
    coupling: f64,
    eta: f64,
    xi: Vec<f64>,
    dims: Vec<usize>,
    /// Neighbours of each site.
    neighbors: Vec<Vec<usize>>,
    /// Each site followed by its neighbours.
    dependents: Vec<Vec<usize>>,
}

pub fn spin(index: usize) -> f64 {
    if index == 0 {
        -1.0
    } else {
        1.0
    }
}

pub fn spin_index(spin: f64) -> usize {
    (spin > 0.0) as usize
}

impl IsingTarget {
    /// Zero-field model with `E = sum s_i s_j`.
    pub fn antiferromagnet(side: usize) -> Result<Self> {
        Self::new(side, 1.0, 0.0, vec![0.0; side * side])
    }

    /// `E = -beta sum s_i s_j - eta sum s_i xi_i` for an observed image `xi`
    /// of +-1 pixels.
    pub fn denoising(side: usize, beta: f64, eta: f64, xi: &[i8]) -> Result<Self> {
        if let Some(v) = xi.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::Argument(format!("image pixels must be +-1, got {v}")));
        }
        Self::new(side, -beta, eta, xi.iter().map(|&v| v as f64).collect())
    }

    fn new(side: usize, coupling: f64, eta: f64, xi: Vec<f64>) -> Result<Self> {
        if side == 0 {
            return Err(Error::Argument("lattice side must be positive".into()));
        }
        if !(coupling.is_finite() && eta.is_finite()) {
            return Err(Error::Argument(format!("non-finite parameters J={coupling} eta={eta}")));
        }
        let n = side * side;
        if xi.len() != n {
            return Err(Error::Argument(format!("{} image pixels for {n} sites", xi.len())));
        }
        let neighbors: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let (r, c) = (i / side, i % side);
                let mut nb = Vec::with_capacity(4);
                if r > 0 {
                    nb.push(i - side);
                }
                if c > 0 {
                    nb.push(i - 1);
                }
                if c + 1 < side {
                    nb.push(i + 1);
                }
                if r + 1 < side {
                    nb.push(i + side);
                }
                nb
            })
            .collect();
        let dependents = neighbors
            .iter()
            .enumerate()
            .map(|(i, nb)| std::iter::once(i).chain(nb.iter().copied()).collect())
            .collect();
        Ok(Self {
            side,
            coupling,
            eta,
            xi,
            dims: vec![2; n],
            neighbors,
            dependents,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn sites(&self) -> usize {
        self.side * self.side
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Number of lattice edges, `2L(L-1)`.
    pub fn edge_count(&self) -> usize {
        2 * self.side * (self.side - 1)
    }

    pub fn neighbors(&self, site: usize) -> &[usize] {
        &self.neighbors[site]
    }

    /// `a_i` such that the energy terms involving site `i` are `s_i a_i`.
    pub fn local_field(&self, state: &[usize], site: usize) -> f64 {
        let s: f64 = self.neighbors[site].iter().map(|&j| spin(state[j])).sum();
        self.coupling * s - self.eta * self.xi[site]
    }

    pub fn energy(&self, state: &[usize]) -> f64 {
        let mut pair = 0.0;
        let mut field = 0.0;
        for i in 0..self.sites() {
            let si = spin(state[i]);
            for &j in &self.neighbors[i] {
                if j > i {
                    pair += si * spin(state[j]);
                }
            }
            field += si * self.xi[i];
        }
        self.coupling * pair - self.eta * field
    }

    /// `E(s with site flipped) - E(s)`.
    pub fn flip_energy_delta(&self, state: &[usize], site: usize) -> f64 {
        -2.0 * spin(state[site]) * self.local_field(state, site)
    }

    /// `(p(s_i=-1, rest) + p(s_i=+1, rest)) / p(s)`; the Boltzmann factor of
    /// the rest of the lattice cancels.
    pub fn axis_sum_ratio(&self, site: usize, state: &[usize]) -> Result<f64> {
        if site >= self.sites() {
            return Err(Error::Argument(format!(
                "site {site} outside a lattice of {} sites",
                self.sites()
            )));
        }
        if state.len() != self.sites() || state.iter().any(|&s| s > 1) {
            return Err(Error::Argument("state is not a spin configuration".into()));
        }
        Ok(1.0 + (2.0 * spin(state[site]) * self.local_field(state, site)).exp())
    }

    /// Checkerboard with spin +1 where `(row + col) % 2 == parity`.
    pub fn checkerboard(&self, parity: usize) -> Vec<usize> {
        (0..self.sites())
            .map(|i| ((i / self.side + i % self.side) % 2 == parity % 2) as usize)
            .collect()
    }

    /// Mean of `s_i` times the checkerboard sign `(-1)^(row+col)`.
    pub fn staggered_magnetization(&self, spins: &[f64]) -> f64 {
        let total: f64 = spins
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if (i / self.side + i % self.side).is_multiple_of(2) {
                    *s
                } else {
                    -*s
                }
            })
            .sum();
        total / self.sites() as f64
    }
}

impl DiscreteTarget for IsingTarget {
    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn log_mass(&self, state: &[usize]) -> f64 {
        -self.energy(state)
    }

    fn log_axis_sum(&self, axis: usize, state: &[usize]) -> f64 {
        -self.energy(state) + softplus(2.0 * spin(state[axis]) * self.local_field(state, axis))
    }

    fn conditional(&self, axis: usize, state: &[usize]) -> f64 {
        sigmoid(-2.0 * spin(state[axis]) * self.local_field(state, axis))
    }

    fn axis_conditionals(&self, axis: usize, state: &[usize], out: &mut [f64]) {
        let up = sigmoid(-2.0 * self.local_field(state, axis));
        out[0] = 1.0 - up;
        out[1] = up;
    }

    fn dependents(&self, axis: usize) -> Option<&[usize]> {
        Some(&self.dependents[axis])
    }

    fn axis_value(&self, _axis: usize, index: usize) -> f64 {
        spin(index)
    }
}

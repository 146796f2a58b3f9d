use super::{DensityModel, VectorField};
use crate::error::{Error, Result};

/// A scalar function `H(x, y)` over position and auxiliary coordinates.
pub trait Hamiltonian {
    fn dim_x(&self) -> usize;
    fn dim_y(&self) -> usize;
    fn value(&self, x: &[f64], y: &[f64]) -> f64;
}

pub struct FnHamiltonian<F> {
    dim_x: usize,
    dim_y: usize,
    f: F,
}

impl<F: Fn(&[f64], &[f64]) -> f64> FnHamiltonian<F> {
    pub fn new(dim_x: usize, dim_y: usize, f: F) -> Self {
        Self { dim_x, dim_y, f }
    }
}

impl<F: Fn(&[f64], &[f64]) -> f64> Hamiltonian for FnHamiltonian<F> {
    fn dim_x(&self) -> usize {
        self.dim_x
    }

    fn dim_y(&self) -> usize {
        self.dim_y
    }

    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.f)(x, y)
    }
}

/// `v(s) = (grad_y H, -grad_x H) / p(s)` over `s = (x, y)`.
///
/// `p v` is a symplectic gradient, hence divergence-free, for any `H`.
pub struct HamiltonianField<H, D> {
    ham: H,
    density: D,
}

/// Builds the Hamiltonian field of `ham` normalized by `density`, which is a
/// density over the concatenated state `(x, y)`.
pub fn hamiltonian_field<H, D>(ham: H, density: D) -> Result<HamiltonianField<H, D>>
where
    H: Hamiltonian,
    D: DensityModel,
{
    if ham.dim_x() == 0 || ham.dim_x() != ham.dim_y() {
        return Err(Error::Argument(format!(
            "Hamiltonian needs matching position and auxiliary dimensions, got {} and {}",
            ham.dim_x(),
            ham.dim_y()
        )));
    }
    if density.dim() != ham.dim_x() + ham.dim_y() {
        return Err(Error::Argument(format!(
            "density dimension {} does not match state dimension {}",
            density.dim(),
            ham.dim_x() + ham.dim_y()
        )));
    }
    Ok(HamiltonianField { ham, density })
}

/// Central-difference step for coordinate value `v`.
fn fd_step(v: f64) -> f64 {
    1e-5 * v.abs().max(1.0)
}

impl<H: Hamiltonian, D: DensityModel> HamiltonianField<H, D> {
    fn partial(&self, s: &mut [f64], i: usize) -> f64 {
        let k = self.ham.dim_x();
        let orig = s[i];
        let h = fd_step(orig);
        s[i] = orig + h;
        let plus = self.ham.value(&s[..k], &s[k..]);
        s[i] = orig - h;
        let minus = self.ham.value(&s[..k], &s[k..]);
        s[i] = orig;
        (plus - minus) / (2.0 * h)
    }

    pub fn hamiltonian(&self) -> &H {
        &self.ham
    }
}

impl<H: Hamiltonian, D: DensityModel> VectorField for HamiltonianField<H, D> {
    fn dim(&self) -> usize {
        self.ham.dim_x() * 2
    }

    fn velocity_into(&self, s: &[f64], out: &mut [f64]) -> Result<()> {
        let k = self.ham.dim_x();
        let p = self.density.unnorm_density(s);
        if !(p > 0.0) {
            return Err(Error::Domain(format!("density is {p} at {s:?}")));
        }
        let mut probe = s.to_vec();
        for i in 0..k {
            let dh_dy = self.partial(&mut probe, k + i);
            let dh_dx = self.partial(&mut probe, i);
            out[i] = dh_dy / p;
            out[k + i] = -dh_dx / p;
        }
        Ok(())
    }
}

//! Vector fields over `R^n`, the densities they are meant to preserve, and the
//! numerical machinery shared by every flow-based sampler: fixed-step RK4,
//! a central-difference check of `div(p v) = 0`, Hamiltonian fields and the
//! square-root-of-primes coefficient generator.
//!
//! A flow `dx/dt = v(x)` leaves `p` invariant when `div(p v) = 0`, so any
//! divergence-free `w` yields a `p`-preserving field `v = w / p`.

mod coefficients;
mod hamiltonian;
mod phase;

pub use coefficients::{first_primes, sqrt_prime_coefficients, Coefficients};
pub use hamiltonian::{hamiltonian_field, FnHamiltonian, Hamiltonian, HamiltonianField};
pub use phase::{arc_length, phase_curve_distance, point_polyline_distance, truncate_arc_length};

use crate::error::{Error, Result};

/// A velocity evaluator `x -> v(x)`.
pub trait VectorField {
    fn dim(&self) -> usize;

    /// Writes `v(x)` into `out`, which has length `dim()`.
    fn velocity_into(&self, x: &[f64], out: &mut [f64]) -> Result<()>;

    fn velocity(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.velocity_into(x, &mut out)?;
        Ok(out)
    }
}

impl<F: VectorField + ?Sized> VectorField for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn velocity_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        (**self).velocity_into(x, out)
    }
}

/// Where a continuous density lives.
#[derive(Clone, Debug, PartialEq)]
pub enum Support {
    Unbounded,
    /// Axis-aligned box `[lower_i, upper_i]`.
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
}

impl Support {
    pub fn unit_box(dim: usize) -> Self {
        Support::Box {
            lower: vec![0.0; dim],
            upper: vec![1.0; dim],
        }
    }

    /// Strict interior test.
    pub fn contains_interior(&self, x: &[f64]) -> bool {
        match self {
            Support::Unbounded => x.iter().all(|v| v.is_finite()),
            Support::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(&v, (&lo, &hi))| v > lo && v < hi),
        }
    }
}

/// An unnormalized density over `R^dim`.
pub trait DensityModel {
    fn dim(&self) -> usize;
    fn unnorm_density(&self, x: &[f64]) -> f64;

    fn support(&self) -> Support {
        Support::Unbounded
    }
}

impl<D: DensityModel + ?Sized> DensityModel for &D {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn unnorm_density(&self, x: &[f64]) -> f64 {
        (**self).unnorm_density(x)
    }

    fn support(&self) -> Support {
        (**self).support()
    }
}

/// A field backed by a closure.
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&[f64], &mut [f64]),
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(&[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn velocity_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        (self.f)(x, out);
        Ok(())
    }
}

/// A density backed by a closure.
pub struct FnDensity<F> {
    dim: usize,
    support: Support,
    f: F,
}

impl<F> FnDensity<F>
where
    F: Fn(&[f64]) -> f64,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self {
            dim,
            support: Support::Unbounded,
            f,
        }
    }

    pub fn with_support(mut self, support: Support) -> Self {
        self.support = support;
        self
    }
}

impl<F> DensityModel for FnDensity<F>
where
    F: Fn(&[f64]) -> f64,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn unnorm_density(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn support(&self) -> Support {
        self.support.clone()
    }
}

/// Central-difference estimate of `sum_i d/dx_i (p v_i)` at `point`.
///
/// The product `p v` is differenced directly so no density gradient is needed.
pub fn finite_diff_divergence<V, D>(field: &V, density: &D, point: &[f64], h: f64) -> Result<f64>
where
    V: VectorField + ?Sized,
    D: DensityModel + ?Sized,
{
    let n = field.dim();
    if point.len() != n || density.dim() != n {
        return Err(Error::Argument(format!(
            "dimension mismatch: point {}, field {}, density {}",
            point.len(),
            n,
            density.dim()
        )));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Argument(format!("step must be positive, got {h}")));
    }
    let support = density.support();
    if !support.contains_interior(point) {
        return Err(Error::Domain(format!("{point:?} is outside the support interior")));
    }

    let mut probe = point.to_vec();
    let mut v = vec![0.0; n];
    let mut div = 0.0;
    for i in 0..n {
        probe[i] = point[i] + h;
        if !support.contains_interior(&probe) {
            return Err(Error::Domain(format!("{probe:?} is outside the support interior")));
        }
        field.velocity_into(&probe, &mut v)?;
        let plus = density.unnorm_density(&probe) * v[i];

        probe[i] = point[i] - h;
        if !support.contains_interior(&probe) {
            return Err(Error::Domain(format!("{probe:?} is outside the support interior")));
        }
        field.velocity_into(&probe, &mut v)?;
        let minus = density.unnorm_density(&probe) * v[i];

        probe[i] = point[i];
        div += (plus - minus) / (2.0 * h);
    }
    Ok(div)
}

/// One classical fourth-order Runge-Kutta step.
pub fn rk4_step<V: VectorField + ?Sized>(field: &V, point: &[f64], dt: f64) -> Result<Vec<f64>> {
    let mut out = point.to_vec();
    let mut scratch = Rk4Scratch::new(point.len());
    rk4_step_in_place(field, &mut out, dt, &mut scratch, |_| {})?;
    Ok(out)
}

/// Stage buffers reused across RK4 steps.
pub(crate) struct Rk4Scratch {
    k: [Vec<f64>; 4],
    stage: Vec<f64>,
}

impl Rk4Scratch {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            k: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            stage: vec![0.0; n],
        }
    }
}

/// RK4 update of `x` in place. `project` maps every stage point back onto the
/// state manifold (identity in `R^n`, wrap modulo 1 on the torus).
pub(crate) fn rk4_step_in_place<V, P>(
    field: &V,
    x: &mut [f64],
    dt: f64,
    scratch: &mut Rk4Scratch,
    project: P,
) -> Result<()>
where
    V: VectorField + ?Sized,
    P: Fn(&mut [f64]),
{
    if !dt.is_finite() {
        return Err(Error::Argument(format!("time step must be finite, got {dt}")));
    }
    let n = x.len();
    let Rk4Scratch { k, stage } = scratch;
    let weights = [0.0, 0.5, 0.5, 1.0];
    for s in 0..4 {
        for i in 0..n {
            stage[i] = if s == 0 {
                x[i]
            } else {
                x[i] + weights[s] * dt * k[s - 1][i]
            };
        }
        project(stage);
        field.velocity_into(stage, &mut k[s])?;
        if k[s].iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration {
                step: s,
                point: stage.clone(),
            });
        }
    }
    for i in 0..n {
        x[i] += dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
    }
    project(x);
    Ok(())
}

/// Integrates `n_steps` RK4 steps from `x0`, returning every visited point
/// including the start.
pub fn integrate<V: VectorField + ?Sized>(field: &V, x0: &[f64], dt: f64, n_steps: usize) -> Result<Vec<Vec<f64>>> {
    let mut x = x0.to_vec();
    let mut scratch = Rk4Scratch::new(x.len());
    let mut path = Vec::with_capacity(n_steps + 1);
    path.push(x.clone());
    for step in 0..n_steps {
        rk4_step_in_place(field, &mut x, dt, &mut scratch, |_| {}).map_err(|e| match e {
            Error::Integration { point, .. } => Error::Integration { step, point },
            other => other,
        })?;
        path.push(x.clone());
    }
    Ok(path)
}

//! Dynamical Gibbs sampling on continuous state spaces.
//!
//! The field `v_i(x) = c_i / p(x_i | x_\i)` has `p v_i = c_i p(x_\i)`, which
//! does not depend on `x_i`, so `div(p v) = 0` and `p` is invariant. Each axis
//! always moves forward; per-axis charts glue `+inf` to `-inf` so the flow
//! lives on a torus and keeps returning.

mod chart;
mod dist;
mod models;

use std::sync::Arc;

pub use chart::{AxisChart, TorusChart};
pub use dist::{CdfOnly, Exponential, Gaussian, Uniform, Univariate};
pub use models::{BivariateGaussian, IndependentModel};

use crate::error::{Error, Result};
use crate::field::{rk4_step_in_place, Coefficients, DensityModel, Rk4Scratch, VectorField};
use chart::{wrap_unit, GLUE_MARGIN};

/// A joint density with tractable full conditionals.
pub trait ConditionalModel: DensityModel + Sync {
    /// Normalized `p(x_i | x_\i)` at the full point `x`.
    fn conditional_density(&self, axis: usize, x: &[f64]) -> f64;

    /// The marginal of `axis`, when it is known in closed form. Used to build
    /// CDF charts.
    fn marginal(&self, _axis: usize) -> Option<Arc<dyn Univariate>> {
        None
    }
}

impl TorusChart {
    /// CDF charts for axes with a known invertible marginal, tanh (scale 1)
    /// for the rest.
    pub fn for_model<M: ConditionalModel + ?Sized>(model: &M) -> Self {
        Self::new(
            (0..model.dim())
                .map(|i| match model.marginal(i) {
                    Some(m) if m.inverse_cdf(0.5).is_some() => AxisChart::Cdf(m),
                    _ => AxisChart::Tanh { scale: 1.0 },
                })
                .collect(),
        )
    }
}

/// Closed-form 1D flow `F^{-1}((c t + F(x0)) mod 1)`.
pub fn exact_1d_step(dist: &dyn Univariate, x0: f64, c: f64, t: f64) -> Result<f64> {
    if c == 0.0 || !c.is_finite() {
        return Err(Error::Argument(format!("speed must be non-zero and finite, got {c}")));
    }
    if !(t >= 0.0) {
        return Err(Error::Argument(format!("time must be non-negative, got {t}")));
    }
    let u = (c * t + dist.cdf(x0)).rem_euclid(1.0);
    dist.inverse_cdf(u)
        .ok_or_else(|| Error::UnsupportedModel("distribution has no inverse CDF".into()))
}

/// `v_i(x) = c_i / p(x_i | x_\i)` in native coordinates.
pub struct GibbsField<'a, M: ?Sized> {
    model: &'a M,
    coefficients: &'a Coefficients,
}

pub fn gibbs_field<'a, M>(model: &'a M, coefficients: &'a Coefficients) -> Result<GibbsField<'a, M>>
where
    M: ConditionalModel + ?Sized,
{
    if coefficients.len() != model.dim() {
        return Err(Error::Argument(format!(
            "{} coefficients for a {}-dimensional model",
            coefficients.len(),
            model.dim()
        )));
    }
    Ok(GibbsField { model, coefficients })
}

impl<M: ConditionalModel + ?Sized> VectorField for GibbsField<'_, M> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn velocity_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        for (i, o) in out.iter_mut().enumerate() {
            let q = self.model.conditional_density(i, x);
            if !(q > 0.0) {
                return Err(Error::Domain(format!(
                    "conditional density of axis {i} is {q} at {x:?}"
                )));
            }
            *o = self.coefficients[i] / q;
        }
        Ok(())
    }
}

/// The Gibbs field pushed forward to chart coordinates:
/// `w_i(u) = chart_i'(x_i) v_i(x)` with `x = chart^{-1}(u)`.
struct ChartField<'a, M: ?Sized> {
    native: GibbsField<'a, M>,
    chart: &'a TorusChart,
}

impl<M: ConditionalModel + ?Sized> VectorField for ChartField<'_, M> {
    fn dim(&self) -> usize {
        self.chart.dim()
    }

    fn velocity_into(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        let x = self.chart.inverse(u);
        self.native.velocity_into(&x, out)?;
        for (i, o) in out.iter_mut().enumerate() {
            *o *= self.chart.axis(i).derivative(x[i]);
        }
        Ok(())
    }
}

/// A recorded path: strictly increasing times and native-coordinate points.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn push(&mut self, t: f64, x: Vec<f64>) {
        self.times.push(t);
        self.points.push(x);
    }
}

/// Fixed-step RK4 integration of the Gibbs flow on the chart torus.
pub struct TorusFlow<'a, M: ?Sized> {
    field: ChartField<'a, M>,
    chart: &'a TorusChart,
    u: Vec<f64>,
    time: f64,
    steps: usize,
    dt: f64,
    scratch: Rk4Scratch,
    glue_hits: usize,
}

impl<'a, M: ConditionalModel + ?Sized> TorusFlow<'a, M> {
    pub fn new(
        model: &'a M,
        chart: &'a TorusChart,
        coefficients: &'a Coefficients,
        x0: &[f64],
        dt: f64,
    ) -> Result<Self> {
        if chart.dim() != model.dim() || x0.len() != model.dim() {
            return Err(Error::Argument("chart, start point and model dimensions differ".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Argument(format!("time step must be positive, got {dt}")));
        }
        if !(model.unnorm_density(x0) > 0.0) {
            return Err(Error::Domain(format!("start point {x0:?} is outside the support")));
        }
        let native = gibbs_field(model, coefficients)?;
        let mut u = chart.forward(x0);
        wrap_unit(&mut u);
        Ok(Self {
            field: ChartField { native, chart },
            chart,
            scratch: Rk4Scratch::new(u.len()),
            u,
            time: 0.0,
            steps: 0,
            dt,
            glue_hits: 0,
        })
    }

    pub fn step(&mut self) -> Result<()> {
        let step = self.steps;
        rk4_step_in_place(&self.field, &mut self.u, self.dt, &mut self.scratch, wrap_unit).map_err(|e| match e {
            Error::Integration { point, .. } => Error::Integration {
                step,
                point: self.chart.inverse(&point),
            },
            other => other,
        })?;
        self.steps += 1;
        self.time = self.steps as f64 * self.dt;
        let near_glue = self.u.iter().any(|v| !(GLUE_MARGIN..=1.0 - GLUE_MARGIN).contains(v));
        if near_glue {
            self.glue_hits += 1;
            log::debug!("step {step}: chart point {:?} clamped near the glue point", self.u);
        }
        Ok(())
    }

    /// Current point in chart coordinates, each in `[0, 1)`.
    pub fn chart_point(&self) -> &[f64] {
        &self.u
    }

    pub fn native_point(&self) -> Vec<f64> {
        self.chart.inverse(&self.u)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Number of steps that landed within machine precision of the glue point.
    pub fn glue_hits(&self) -> usize {
        self.glue_hits
    }

    /// Records `n_records` native points spaced `record_every` steps apart,
    /// starting with the current point. Uniform spacing in time keeps the
    /// plain average of the records a time average.
    pub fn record(&mut self, n_records: usize, record_every: usize) -> Result<Trajectory> {
        if record_every == 0 {
            return Err(Error::Argument("record_every must be at least 1".into()));
        }
        let mut traj = Trajectory::default();
        for r in 0..n_records {
            if r > 0 {
                for _ in 0..record_every {
                    self.step()?;
                }
            }
            traj.push(self.time, self.native_point());
        }
        Ok(traj)
    }
}

/// Integrates `n_steps` RK4 steps of the chart-space Gibbs flow and records
/// every visited point, start included, in native coordinates.
pub fn flow_on_torus<M: ConditionalModel + ?Sized>(
    model: &M,
    chart: &TorusChart,
    coefficients: &Coefficients,
    x0: &[f64],
    dt: f64,
    n_steps: usize,
) -> Result<Trajectory> {
    TorusFlow::new(model, chart, coefficients, x0, dt)?.record(n_steps + 1, 1)
}

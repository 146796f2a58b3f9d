use std::f64::consts::PI;
use std::sync::Arc;

use super::dist::{Gaussian, Univariate};
use super::ConditionalModel;
use crate::error::{Error, Result};
use crate::field::{DensityModel, Support};

/// Product of independent one-dimensional distributions.
#[derive(Clone)]
pub struct IndependentModel {
    axes: Vec<Arc<dyn Univariate>>,
}

impl IndependentModel {
    pub fn new(axes: Vec<Arc<dyn Univariate>>) -> Self {
        Self { axes }
    }
}

impl DensityModel for IndependentModel {
    fn dim(&self) -> usize {
        self.axes.len()
    }

    fn unnorm_density(&self, x: &[f64]) -> f64 {
        self.axes.iter().zip(x).map(|(d, &v)| d.pdf(v)).product()
    }

    fn support(&self) -> Support {
        let (lower, upper) = self.axes.iter().map(|d| d.bounds()).unzip();
        Support::Box { lower, upper }
    }
}

impl ConditionalModel for IndependentModel {
    fn conditional_density(&self, axis: usize, x: &[f64]) -> f64 {
        self.axes[axis].pdf(x[axis])
    }

    fn marginal(&self, axis: usize) -> Option<Arc<dyn Univariate>> {
        Some(self.axes[axis].clone())
    }
}

/// Standard bivariate normal with correlation `rho`.
#[derive(Clone, Debug)]
pub struct BivariateGaussian {
    rho: f64,
    expose_marginals: bool,
}

impl BivariateGaussian {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::Argument(format!("correlation must lie in (-1, 1), got {rho}")));
        }
        Ok(Self {
            rho,
            expose_marginals: true,
        })
    }

    /// Hides the closed-form marginals so charts fall back to tanh.
    pub fn without_marginals(mut self) -> Self {
        self.expose_marginals = false;
        self
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

impl DensityModel for BivariateGaussian {
    fn dim(&self) -> usize {
        2
    }

    fn unnorm_density(&self, x: &[f64]) -> f64 {
        let det = 1.0 - self.rho * self.rho;
        let q = (x[0] * x[0] - 2.0 * self.rho * x[0] * x[1] + x[1] * x[1]) / det;
        (-0.5 * q).exp() / (2.0 * PI * det.sqrt())
    }
}

impl ConditionalModel for BivariateGaussian {
    fn conditional_density(&self, axis: usize, x: &[f64]) -> f64 {
        let var = 1.0 - self.rho * self.rho;
        let d = x[axis] - self.rho * x[1 - axis];
        (-0.5 * d * d / var).exp() / (2.0 * PI * var).sqrt()
    }

    fn marginal(&self, _axis: usize) -> Option<Arc<dyn Univariate>> {
        self.expose_marginals
            .then(|| Arc::new(Gaussian::standard()) as Arc<dyn Univariate>)
    }
}

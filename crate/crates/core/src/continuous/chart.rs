use std::sync::Arc;

use super::dist::Univariate;

/// Keeps chart coordinates off the glue point, where the native coordinate is
/// infinite and the density vanishes.
pub(crate) const GLUE_MARGIN: f64 = 4.0 * f64::EPSILON;

/// Bijection of one axis onto `[0, 1)`.
#[derive(Clone)]
pub enum AxisChart {
    /// `u = F(x)` for a CDF `F`.
    Cdf(Arc<dyn Univariate>),
    /// `u = (tanh(x / scale) + 1) / 2`.
    Tanh { scale: f64 },
}

impl std::fmt::Debug for AxisChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AxisChart::Cdf(_) => write!(f, "Cdf"),
            AxisChart::Tanh { scale } => write!(f, "Tanh {{ scale: {scale} }}"),
        }
    }
}

impl AxisChart {
    pub fn forward(&self, x: f64) -> f64 {
        let u = match self {
            AxisChart::Cdf(d) => d.cdf(x),
            AxisChart::Tanh { scale } => 0.5 * ((x / scale).tanh() + 1.0),
        };
        if u >= 1.0 {
            0.0
        } else {
            u
        }
    }

    /// Inverse map; `u` is nudged into the open interval first.
    pub fn inverse(&self, u: f64) -> f64 {
        let u = u.clamp(GLUE_MARGIN, 1.0 - GLUE_MARGIN);
        match self {
            AxisChart::Cdf(d) => d
                .inverse_cdf(u)
                .expect("CDF charts are only built from invertible distributions"),
            AxisChart::Tanh { scale } => scale * (2.0 * u - 1.0).atanh(),
        }
    }

    /// `du/dx` at native coordinate `x`.
    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            AxisChart::Cdf(d) => d.pdf(x),
            AxisChart::Tanh { scale } => {
                let t = (x / scale).tanh();
                0.5 * (1.0 - t * t) / scale
            }
        }
    }

    pub fn is_cdf(&self) -> bool {
        matches!(self, AxisChart::Cdf(_))
    }
}

/// Per-axis charts mapping the native support onto the unit torus.
#[derive(Clone, Debug)]
pub struct TorusChart {
    axes: Vec<AxisChart>,
}

impl TorusChart {
    pub fn new(axes: Vec<AxisChart>) -> Self {
        Self { axes }
    }

    pub fn tanh(dim: usize, scale: f64) -> Self {
        Self::new(vec![AxisChart::Tanh { scale }; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, i: usize) -> &AxisChart {
        &self.axes[i]
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.axes.iter().zip(x).map(|(a, &v)| a.forward(v)).collect()
    }

    pub fn inverse(&self, u: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; u.len()];
        self.inverse_into(u, &mut x);
        x
    }

    pub fn inverse_into(&self, u: &[f64], x: &mut [f64]) {
        for ((a, &ui), xi) in self.axes.iter().zip(u).zip(x.iter_mut()) {
            *xi = a.inverse(ui);
        }
    }
}

/// Wraps every coordinate into `[0, 1)`.
pub(crate) fn wrap_unit(u: &mut [f64]) {
    for v in u.iter_mut() {
        let w = v.rem_euclid(1.0);
        // rem_euclid can round up to exactly 1.0 for tiny negative inputs
        *v = if w >= 1.0 { 0.0 } else { w };
    }
}

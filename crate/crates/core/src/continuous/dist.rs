use statrs::distribution::{Continuous, ContinuousCDF, Normal};

/// A one-dimensional distribution with a strictly increasing CDF on its support.
pub trait Univariate: Send + Sync {
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;

    /// `F^{-1}(u)` for `u` in `[0, 1]`, when available in closed form.
    fn inverse_cdf(&self, _u: f64) -> Option<f64> {
        None
    }

    /// Closed support interval; infinite ends for unbounded supports.
    fn bounds(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Uniform {
    pub low: f64,
    pub high: f64,
}

impl Uniform {
    pub fn unit() -> Self {
        Self { low: 0.0, high: 1.0 }
    }
}

impl Univariate for Uniform {
    fn pdf(&self, x: f64) -> f64 {
        if x >= self.low && x <= self.high {
            1.0 / (self.high - self.low)
        } else {
            0.0
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        ((x - self.low) / (self.high - self.low)).clamp(0.0, 1.0)
    }

    fn inverse_cdf(&self, u: f64) -> Option<f64> {
        Some(self.low + u * (self.high - self.low))
    }

    fn bounds(&self) -> (f64, f64) {
        (self.low, self.high)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Exponential {
    pub rate: f64,
}

impl Univariate for Exponential {
    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.rate * (-self.rate * x).exp()
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.rate * x).exp_m1()
        }
    }

    fn inverse_cdf(&self, u: f64) -> Option<f64> {
        Some(-(-u).ln_1p() / self.rate)
    }

    fn bounds(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

#[derive(Clone, Debug)]
pub struct Gaussian {
    inner: Normal,
}

impl Gaussian {
    pub fn new(mean: f64, sd: f64) -> Self {
        Self {
            inner: Normal::new(mean, sd).expect("standard deviation must be positive"),
        }
    }

    pub fn standard() -> Self {
        Self::new(0.0, 1.0)
    }
}

impl Univariate for Gaussian {
    fn pdf(&self, x: f64) -> f64 {
        self.inner.pdf(x)
    }

    fn cdf(&self, x: f64) -> f64 {
        self.inner.cdf(x)
    }

    fn inverse_cdf(&self, u: f64) -> Option<f64> {
        Some(self.inner.inverse_cdf(u))
    }
}

/// A distribution that only knows its CDF; used to exercise the
/// unsupported-model path of the exact 1D update.
pub struct CdfOnly<D>(pub D);

impl<D: Univariate> Univariate for CdfOnly<D> {
    fn pdf(&self, x: f64) -> f64 {
        self.0.pdf(x)
    }

    fn cdf(&self, x: f64) -> f64 {
        self.0.cdf(x)
    }

    fn bounds(&self) -> (f64, f64) {
        self.0.bounds()
    }
}

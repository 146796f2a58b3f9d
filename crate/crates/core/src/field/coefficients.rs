use crate::error::{Error, Result};

/// Per-axis speeds `c_1..c_n` of a dynamical Gibbs flow. All strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients(Vec<f64>);

impl Coefficients {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("coefficients must be non-empty".into()));
        }
        if let Some((i, c)) = values.iter().enumerate().find(|(_, c)| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::Argument(format!(
                "coefficient {i} must be positive and finite, got {c}"
            )));
        }
        Ok(Self(values))
    }

    /// All ones: the unit-speed special case, which is not ergodic in 2D.
    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for Coefficients {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// The first `n` primes, by trial division against the primes found so far.
pub fn first_primes(n: usize) -> Vec<u64> {
    let mut primes: Vec<u64> = Vec::with_capacity(n);
    let mut candidate = 2u64;
    while primes.len() < n {
        if primes
            .iter()
            .take_while(|&&p| p * p <= candidate)
            .all(|&p| !candidate.is_multiple_of(p))
        {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// `(sqrt 2, sqrt 3, sqrt 5, ...)`: square roots of distinct primes are
/// linearly independent over the rationals, so the torus rotation they drive
/// is dense.
pub fn sqrt_prime_coefficients(n: usize) -> Result<Coefficients> {
    if n == 0 {
        return Err(Error::Argument("need at least one coefficient".into()));
    }
    Coefficients::new(first_primes(n).into_iter().map(|p| (p as f64).sqrt()).collect())
}

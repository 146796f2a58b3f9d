//! Deterministic samplers built from measure-preserving flows.
//!
//! * [`field`]: vector fields, numerical divergence checks, RK4, Hamiltonian
//!   fields and rationally independent coefficients.
//! * [`continuous`]: the dynamical Gibbs flow on a torus chart of a
//!   continuous density, including the exact 1D CDF flow.
//! * [`discrete`]: the exact event-driven sampler on dequantized discrete
//!   targets and its dwell-weighted estimator.
//! * [`targets`]: images, Ising lattices, binary logistic regression and an
//!   enumeration oracle.
//! * [`baselines`]: seeded stochastic Gibbs and independent sampling.
//! * [`harness`]: configuration-driven experiments and error curves.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod continuous;
pub mod discrete;
pub mod error;
pub mod field;
pub mod harness;
pub mod targets;

pub use discrete::{CellState, DiscreteTarget, EventTrace, WeightedSample};
pub use error::{Error, Result};
pub use field::{Coefficients, DensityModel, VectorField};

//! Blind deconvolution of a finite-alphabet complex signal observed through a
//! linear channel with additive complex Gaussian noise.
//!
//! The observation model is `Y_t = (u * X)_t + sigma0 * W_t` with `X_t` i.i.d.
//! on finitely many complex points and `W_t` standard complex Gaussian. From a
//! single record `Y_1..Y_n` the crate estimates, in order:
//!
//! 1. the noise level `sigma0` and an inverse filter `theta` of the channel,
//!    by locating the smallest root in `sigma` of a moment-matrix determinant
//!    and minimizing that root over filter coefficients ([`estimator`]);
//! 2. the signal alphabet, as eigenstructure of the noise-corrected moment
//!    matrix at the estimated parameters ([`recovery`]);
//! 3. the alphabet probabilities, from a moment-matching linear system
//!    ([`recovery`]);
//! 4. optionally, plug-in asymptotic standard errors ([`asymptotics`]).
//!
//! Module map: [`model`] simulates observations, [`moments`] forms empirical
//! conjugate moments of filtered observations, [`deconv`] holds the Gaussian
//! moment transfer matrix and the determinant criterion, [`estimator`] runs
//! the nested root search, [`recovery`] extracts the alphabet and weights,
//! [`asymptotics`] computes covariance reports, and [`bench`] drives parallel
//! Monte Carlo replications with deterministic per-replication seeding.

pub mod asymptotics;
pub mod bench;
pub mod deconv;
pub mod dist;
pub mod error;
pub mod estimator;
pub mod model;
pub mod moments;
pub mod optim;
pub mod poly;
pub mod recovery;
pub mod rng;
pub mod series;
pub mod svg;

pub use dist::DiscreteComplexDist;
pub use error::{Error, Result};
pub use series::ComplexSeries;

/// Double-precision complex scalar used throughout.
pub type Complex64 = num_complex::Complex<f64>;

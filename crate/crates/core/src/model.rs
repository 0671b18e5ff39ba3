//! Observation-model simulation.
//!
//! Observations are `Y_t = (u * X)_t + sigma0 * W_t` where `X` is i.i.d. from a
//! finite complex alphabet, `u` is a linear channel, and `W` is standard
//! complex Gaussian noise with `E|W|^2 = 1` (independent real and imaginary
//! parts, each of variance 1/2).

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dist::DiscreteComplexDist;
use crate::error::{Error, Result};
use crate::series::{apply_filter, ComplexSeries, Fir};
use crate::Complex64;

/// Number of warm-up samples discarded when starting an autoregressive channel
/// from zero initial conditions.
pub const AR_BURN_IN: usize = 200;

/// The linear channel connecting the signal to the observations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Channel {
    /// Direct finite impulse response: `Y = u * X` (before noise).
    Fir { coeffs: Vec<Complex64>, origin: i64 },
    /// Channel whose *inverse* is the finite filter `theta`: observations
    /// follow the recursion `theta_0 Y_t + theta_1 Y_{t-1} + ... = X_t`.
    ArInverse { theta: Vec<Complex64> },
}

impl Channel {
    pub fn identity() -> Self {
        Channel::Fir { coeffs: vec![Complex64::new(1.0, 0.0)], origin: 0 }
    }
}

/// Full description of one simulated experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelConfig {
    pub dist: DiscreteComplexDist,
    pub channel: Channel,
    pub sigma0: f64,
    pub n: usize,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sigma0 < 0.0 {
            return Err(Error::invalid("sigma0 must be non-negative"));
        }
        if self.n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        match &self.channel {
            Channel::Fir { coeffs, .. } => {
                if coeffs.is_empty() || coeffs.iter().all(|c| c.norm() == 0.0) {
                    return Err(Error::ZeroFilter);
                }
            }
            Channel::ArInverse { theta } => {
                if theta.is_empty() || theta[0].norm() < 1e-12 {
                    return Err(Error::invalid(
                        "autoregressive channel needs a nonzero leading inverse coefficient",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Draws `n` i.i.d. signal samples starting at time index `origin`.
pub fn simulate_signal<R: Rng + ?Sized>(
    dist: &DiscreteComplexDist,
    n: usize,
    origin: i64,
    rng: &mut R,
) -> Result<ComplexSeries> {
    let samples: Vec<Complex64> = (0..n).map(|_| dist.sample(rng)).collect();
    ComplexSeries::new(samples, origin)
}

/// Adds `sigma0 * W_t` in place-free form: returns a fresh series.
pub fn add_noise<R: Rng + ?Sized>(
    x: &ComplexSeries,
    sigma0: f64,
    rng: &mut R,
) -> Result<ComplexSeries> {
    if sigma0 == 0.0 {
        return Ok(x.clone());
    }
    let comp = Normal::new(0.0, (0.5f64).sqrt()).expect("valid normal");
    let samples: Vec<Complex64> = x
        .samples()
        .iter()
        .map(|&z| z + sigma0 * Complex64::new(comp.sample(rng), comp.sample(rng)))
        .collect();
    ComplexSeries::new(samples, x.origin())
}

/// Passes the signal through the channel.
pub fn apply_channel(channel: &Channel, x: &ComplexSeries) -> Result<ComplexSeries> {
    match channel {
        Channel::Fir { coeffs, origin } => {
            let fir = Fir::new(coeffs.clone(), *origin)?;
            apply_filter(&fir, x)
        }
        Channel::ArInverse { theta } => {
            // theta_0 Y_t = X_t - sum_{i>=1} theta_i Y_{t-i}; start from zeros
            // and discard a warm-up prefix so initialization is forgotten.
            let t0 = theta[0];
            if t0.norm() < 1e-12 {
                return Err(Error::invalid("leading inverse coefficient must be nonzero"));
            }
            let order = theta.len() - 1;
            let xs = x.samples();
            let mut y: Vec<Complex64> = Vec::with_capacity(xs.len());
            for (t, &xt) in xs.iter().enumerate() {
                let mut acc = xt;
                for i in 1..=order {
                    if t >= i {
                        acc -= theta[i] * y[t - i];
                    }
                }
                y.push(acc / t0);
            }
            if y.len() <= AR_BURN_IN {
                return Err(Error::SeriesTooShort { needed: AR_BURN_IN + 1, got: y.len() });
            }
            let kept = y.split_off(AR_BURN_IN);
            ComplexSeries::new(kept, x.origin() + AR_BURN_IN as i64)
        }
    }
}

/// Simulates one observation record. For autoregressive channels, enough extra
/// signal is drawn to cover the discarded warm-up so the output still has
/// `config.n` samples.
pub fn simulate_model<R: Rng + ?Sized>(
    config: &ModelConfig,
    rng: &mut R,
) -> Result<ComplexSeries> {
    config.validate()?;
    let extra = match &config.channel {
        Channel::Fir { coeffs, .. } => coeffs.len() - 1,
        Channel::ArInverse { .. } => AR_BURN_IN,
    };
    let x = simulate_signal(&config.dist, config.n + extra, 0, rng)?;
    let filtered = apply_channel(&config.channel, &x)?;
    debug_assert_eq!(filtered.len(), config.n);
    add_noise(&filtered, config.sigma0, rng)
}

/// Three-point alphabet observed through the identity channel.
pub fn mixture_config(sigma0: f64, n: usize) -> ModelConfig {
    let dist = DiscreteComplexDist::new(
        vec![
            Complex64::new(4.0, 1.0),
            Complex64::new(-1.0, 3.0),
            Complex64::new(-2.0, -1.0),
        ],
        vec![0.6, 0.25, 0.15],
    )
    .expect("valid alphabet");
    ModelConfig { dist, channel: Channel::identity(), sigma0, n }
}

/// The unit-norm inverse filter (6/7, -2/7, 3/7) used by the autoregressive
/// benchmark channel.
pub fn ar2_theta() -> Vec<Complex64> {
    vec![
        Complex64::new(6.0 / 7.0, 0.0),
        Complex64::new(-2.0 / 7.0, 0.0),
        Complex64::new(3.0 / 7.0, 0.0),
    ]
}

/// Same three-point alphabet observed through the order-2 autoregressive
/// channel whose inverse filter is `ar2_theta()`.
pub fn ar2_config(sigma0: f64, n: usize) -> ModelConfig {
    let dist = mixture_config(0.0, 1).dist;
    ModelConfig { dist, channel: Channel::ArInverse { theta: ar2_theta() }, sigma0, n }
}

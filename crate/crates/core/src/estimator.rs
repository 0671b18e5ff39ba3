//! Joint estimation of the noise level and the inverse filter.
//!
//! For each candidate filter `xi`, the criterion `J_n(sigma, xi)` starts
//! positive at `sigma = 0` and first crosses zero at some level
//! `sigma*(xi)`. The noise-level estimate is the smallest such crossing over
//! all filters, attained at the inverse-filter estimate:
//! an inner one-dimensional root search in `sigma` nested inside an outer
//! derivative-free minimization over filter coefficients.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deconv::CriterionSlice;
use crate::error::{Error, Result};
use crate::moments::FilterSpec;
use crate::optim::NelderMead;
use crate::series::ComplexSeries;

/// Hyperparameters of the nested search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootSearchConfig {
    /// Ceiling of the sigma scan; `None` derives it from the data as three
    /// times the sample standard deviation of `|Y_t|`.
    pub sigma_max: Option<f64>,
    /// Points in the coarse sigma grid on `(0, sigma_max]`.
    pub grid_steps: usize,
    /// Absolute sigma tolerance of the bisection refinement.
    pub bisect_tol: f64,
    /// Number of random unit-sphere starts for the outer search.
    pub n_starts: usize,
    /// Convergence tolerance of the simplex optimizer.
    pub simplex_tol: f64,
    /// Half-width of the coordinate box constraining filter coefficients.
    pub xi_box: f64,
    /// Iteration cap of the simplex optimizer.
    pub max_iters: usize,
}

impl Default for RootSearchConfig {
    fn default() -> Self {
        Self {
            sigma_max: None,
            grid_steps: 200,
            bisect_tol: 1e-6,
            n_starts: 6,
            simplex_tol: 1e-7,
            xi_box: 2.0,
            max_iters: 400,
        }
    }
}

impl RootSearchConfig {
    /// Concrete sigma ceiling for a given record.
    pub fn resolved_sigma_max(&self, y: &ComplexSeries) -> f64 {
        if let Some(s) = self.sigma_max {
            return s;
        }
        let n = y.len() as f64;
        let mean: f64 = y.samples().iter().map(|z| z.norm()).sum::<f64>() / n;
        let var: f64 = y
            .samples()
            .iter()
            .map(|z| (z.norm() - mean).powi(2))
            .sum::<f64>()
            / n;
        (3.0 * var.sqrt()).max(1e-3)
    }
}

/// Smallest `sigma >= 0` at which the criterion crosses zero: returns 0
/// immediately when `J(0) <= 0`, otherwise scans a linear grid for the first
/// sign change and refines it by bisection. The grid is extended once to
/// `2 * sigma_max` before giving up.
pub fn sigma_root(
    slice: &CriterionSlice,
    sigma_max: f64,
    grid_steps: usize,
    bisect_tol: f64,
) -> Result<f64> {
    debug_assert!(sigma_max > 0.0 && grid_steps > 0 && bisect_tol > 0.0);
    let j0 = slice.j(0.0);
    if j0 <= 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0f64;
    let scan = |from: f64, to: f64, lo_start: f64| -> Option<(f64, f64)> {
        let mut lo = lo_start;
        for i in 1..=grid_steps {
            let s = from + (to - from) * i as f64 / grid_steps as f64;
            if slice.j(s) <= 0.0 {
                return Some((lo, s));
            }
            lo = s;
        }
        None
    };
    let bracket = match scan(0.0, sigma_max, lo) {
        Some(b) => Some(b),
        None => {
            lo = sigma_max;
            scan(sigma_max, 2.0 * sigma_max, lo)
        }
    };
    let (mut a, mut b) = bracket.ok_or(Error::NoRoot { sigma_max: 2.0 * sigma_max })?;
    // Invariant: J(a) > 0 >= J(b).
    while b - a > bisect_tol {
        let mid = 0.5 * (a + b);
        if slice.j(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// A filter scaled to unit Euclidean norm with its dominant tap made
/// positive. `delay` is the window index of that dominant tap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalizedFilter {
    pub coeffs: Vec<f64>,
    pub delay: usize,
}

/// Scale and sign normalization: unit norm, largest-magnitude coefficient
/// positive. No shift is applied; the dominant position is only recorded.
pub fn normalize_filter(theta_raw: &[f64]) -> Result<NormalizedFilter> {
    let norm: f64 = theta_raw.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::ZeroFilter);
    }
    let mut delay = 0usize;
    for (i, c) in theta_raw.iter().enumerate() {
        if c.abs() > theta_raw[delay].abs() {
            delay = i;
        }
    }
    let sign = if theta_raw[delay] < 0.0 { -1.0 } else { 1.0 };
    let coeffs = theta_raw.iter().map(|c| c * sign / norm).collect();
    Ok(NormalizedFilter { coeffs, delay })
}

/// Cyclically shifts a coefficient vector so its dominant tap leads, zero
/// filling the vacated tail. Used when aggregating runs whose deconvolution
/// delays differ.
pub fn align_dominant_first(coeffs: &[f64]) -> Vec<f64> {
    let mut dom = 0usize;
    for (i, c) in coeffs.iter().enumerate() {
        if c.abs() > coeffs[dom].abs() {
            dom = i;
        }
    }
    let mut out = vec![0.0; coeffs.len()];
    for i in dom..coeffs.len() {
        out[i - dom] = coeffs[i];
    }
    out
}

/// Result of the joint noise/filter estimation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimationResult {
    pub sigma_hat: f64,
    /// Raw coefficients at the optimum (before normalization).
    pub xi_hat: Vec<f64>,
    /// Unit-norm, sign-fixed filter estimate.
    pub theta_hat: Vec<f64>,
    /// Window index of the dominant tap of `theta_hat`.
    pub delay: usize,
    /// `|J_n(sigma_hat, xi_hat)|`.
    pub j_residual: f64,
    /// Which random start produced the winner.
    pub start_used: usize,
    pub converged: bool,
    /// Number of filtered samples entering the moments.
    pub n_used: usize,
    pub p: usize,
    pub half_width: usize,
}

struct StartOutcome {
    sigma: f64,
    j_residual: f64,
    xi: Vec<f64>,
    converged: bool,
}

/// Minimizes `sigma*(xi)` over the coefficient box from `n_starts` random
/// unit-sphere starts. A soft pin `(|xi| - 1)^2` is added to the objective:
/// the crossing level is exactly invariant under positive rescaling of `xi`,
/// so the pin removes only the flat scale direction, not the minimizer.
pub fn estimate<R: Rng + ?Sized>(
    y: &ComplexSeries,
    half_width: usize,
    p: usize,
    cfg: &RootSearchConfig,
    rng: &mut R,
) -> Result<EstimationResult> {
    let dim = 2 * half_width + 1;
    if cfg.n_starts == 0 {
        return Err(Error::invalid("need at least one start"));
    }
    let sigma_max = cfg.resolved_sigma_max(y);
    let starts: Vec<Vec<f64>> = (0..cfg.n_starts)
        .map(|_| {
            let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let norm: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm > 0.0 {
                for c in v.iter_mut() {
                    *c /= norm;
                }
            } else {
                v[0] = 1.0;
            }
            v
        })
        .collect();

    let root_of = |xi: &[f64]| -> Option<f64> {
        let spec = FilterSpec::fir(half_width, xi.to_vec()).ok()?;
        let slice = CriterionSlice::from_observations(&spec, y, p).ok()?;
        sigma_root(&slice, sigma_max, cfg.grid_steps, cfg.bisect_tol).ok()
    };
    let objective = |xi: &[f64]| -> f64 {
        match root_of(xi) {
            Some(s) => {
                let norm: f64 = xi.iter().map(|c| c * c).sum::<f64>().sqrt();
                s + (norm - 1.0).powi(2)
            }
            None => f64::INFINITY,
        }
    };

    let nm = NelderMead {
        bound: cfg.xi_box,
        init_step: 0.25,
        tol: cfg.simplex_tol,
        max_iters: cfg.max_iters,
    };
    let outcomes: Vec<Option<StartOutcome>> = starts
        .par_iter()
        .map(|x0| {
            let out = nm.minimize(&objective, x0);
            let xi = out.x;
            let sigma = root_of(&xi)?;
            let spec = FilterSpec::fir(half_width, xi.clone()).ok()?;
            let slice = CriterionSlice::from_observations(&spec, y, p).ok()?;
            let j_residual = slice.j(sigma).abs();
            Some(StartOutcome { sigma, j_residual, xi, converged: out.converged })
        })
        .collect();

    let mut best: Option<(usize, &StartOutcome)> = None;
    for (idx, oc) in outcomes.iter().enumerate() {
        let Some(oc) = oc else { continue };
        best = match best {
            None => Some((idx, oc)),
            Some((bi, b)) => {
                if (oc.sigma, oc.j_residual) < (b.sigma, b.j_residual) {
                    Some((idx, oc))
                } else {
                    Some((bi, b))
                }
            }
        };
    }
    let (start_used, winner) =
        best.ok_or(Error::AllStartsFailed { starts: cfg.n_starts })?;
    let normalized = normalize_filter(&winner.xi)?;
    Ok(EstimationResult {
        sigma_hat: winner.sigma,
        xi_hat: winner.xi.clone(),
        theta_hat: normalized.coeffs,
        delay: normalized.delay,
        j_residual: winner.j_residual,
        start_used,
        converged: winner.converged,
        n_used: y.len() - 2 * half_width,
        p,
        half_width,
    })
}

//! Plug-in asymptotic covariance for the noise-level and filter estimates.
//!
//! The estimation error of `(xi_hat, sigma_hat)` is asymptotically normal
//! with a sandwich covariance: an outer factor from the criterion's
//! derivatives at the optimum, an inner long-run variance of the empirical
//! moment vector. All criterion derivatives are taken by central finite
//! differences; the long-run variance uses a Bartlett-kernel estimator on the
//! per-sample moment contributions, with real and imaginary parts interleaved
//! into a real vector.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::deconv::{
    build_a_inverse, det_lu_in_place, hankel_matrix, pseudo_moments, CriterionSlice,
    PseudoMomentMatrix,
};
use crate::error::{Error, Result};
use crate::estimator::EstimationResult;
use crate::moments::{z_series, FilterSpec};
use crate::series::ComplexSeries;
use crate::Complex64;

/// Finite-difference step sizes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FdSteps {
    pub h_sigma: f64,
    pub h_xi: Vec<f64>,
}

impl FdSteps {
    /// Default relative steps `1e-4 * max(1, |coordinate|)`.
    pub fn for_point(sigma: f64, xi: &[f64]) -> Self {
        Self {
            h_sigma: 1e-4 * sigma.abs().max(1.0),
            h_xi: xi.iter().map(|v| 1e-4 * v.abs().max(1.0)).collect(),
        }
    }

    /// Uniform step everywhere (for convergence-rate studies).
    pub fn uniform(h: f64, dim: usize) -> Self {
        Self { h_sigma: h, h_xi: vec![h; dim] }
    }
}

/// Central finite-difference derivatives of a criterion `f(sigma, xi)`.
#[derive(Debug, Clone)]
pub struct CriterionDerivatives {
    /// First derivative in sigma.
    pub d1: f64,
    /// Gradient in xi.
    pub d2: DVector<f64>,
    /// Hessian in xi (symmetrized).
    pub d22: DMatrix<f64>,
    /// Mixed sigma-xi second derivatives.
    pub d12: DVector<f64>,
    pub steps: FdSteps,
}

/// Computes all derivatives needed by the covariance sandwich from function
/// evaluations alone. The closure seam keeps this testable against analytic
/// derivatives of arbitrary smooth functions.
pub fn criterion_derivatives<F>(
    f: &F,
    sigma: f64,
    xi: &[f64],
    steps: FdSteps,
) -> CriterionDerivatives
where
    F: Fn(f64, &[f64]) -> f64,
{
    let d = xi.len();
    let hs = steps.h_sigma;
    let at = |s: f64, x: &[f64]| f(s, x);
    let shift = |x: &[f64], i: usize, h: f64| {
        let mut v = x.to_vec();
        v[i] += h;
        v
    };

    let f0 = at(sigma, xi);
    let d1 = (at(sigma + hs, xi) - at(sigma - hs, xi)) / (2.0 * hs);

    let mut d2 = DVector::zeros(d);
    let mut d22 = DMatrix::zeros(d, d);
    let mut d12 = DVector::zeros(d);
    for i in 0..d {
        let hi = steps.h_xi[i];
        let fp = at(sigma, &shift(xi, i, hi));
        let fm = at(sigma, &shift(xi, i, -hi));
        d2[i] = (fp - fm) / (2.0 * hi);
        d22[(i, i)] = (fp - 2.0 * f0 + fm) / (hi * hi);
        d12[i] = (at(sigma + hs, &shift(xi, i, hi)) - at(sigma + hs, &shift(xi, i, -hi))
            - at(sigma - hs, &shift(xi, i, hi))
            + at(sigma - hs, &shift(xi, i, -hi)))
            / (4.0 * hs * hi);
    }
    for i in 0..d {
        for j in i + 1..d {
            let hi = steps.h_xi[i];
            let hj = steps.h_xi[j];
            let pp = at(sigma, &shift(&shift(xi, i, hi), j, hj));
            let pm = at(sigma, &shift(&shift(xi, i, hi), j, -hj));
            let mp = at(sigma, &shift(&shift(xi, i, -hi), j, hj));
            let mm = at(sigma, &shift(&shift(xi, i, -hi), j, -hj));
            let v = (pp - pm - mp + mm) / (4.0 * hi * hj);
            d22[(i, j)] = v;
            d22[(j, i)] = v;
        }
    }
    CriterionDerivatives { d1, d2, d22, d12, steps }
}

/// Gradient of the determinant with respect to each flat moment entry
/// `(j,k)`: the cofactor at matrix position `(row k, col j)`, computed from
/// minors so it stays valid on singular matrices.
pub fn det_gradient(d: &PseudoMomentMatrix) -> Vec<Complex64> {
    let m = d.dim();
    let mut minor = vec![Complex64::new(0.0, 0.0); (m - 1) * (m - 1)];
    let mut cof = vec![Complex64::new(0.0, 0.0); m * m];
    for r in 0..m {
        for c in 0..m {
            if m == 1 {
                cof[r * m + c] = Complex64::new(1.0, 0.0);
                continue;
            }
            let mut idx = 0;
            for rr in 0..m {
                if rr == r {
                    continue;
                }
                for cc in 0..m {
                    if cc == c {
                        continue;
                    }
                    minor[idx] = d.entry(rr, cc);
                    idx += 1;
                }
            }
            let sign = if (r + c) % 2 == 0 { 1.0 } else { -1.0 };
            cof[r * m + c] = sign * det_lu_in_place(&mut minor, m - 1);
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    for j in 0..m {
        for k in 0..m {
            out[j * m + k] = cof[k * m + j];
        }
    }
    out
}

/// Gradient of the *real* determinant of the symmetrized matrix with respect
/// to the real-interleaved moment entries: for entry `(j,k) = x + iy`,
/// `dh/dx = Re(cofactor)`, `dh/dy = -Im(cofactor)` (cofactor taken at
/// `(row k, col j)` of the Hermitian matrix).
pub fn h_gradient_interleaved(d: &PseudoMomentMatrix) -> Vec<f64> {
    let grad = det_gradient(d);
    let mut out = Vec::with_capacity(2 * grad.len());
    for g in grad {
        out.push(g.re);
        out.push(-g.im);
    }
    out
}

/// Per-sample moment contribution vectors in real-interleaved layout:
/// row `t` holds `re/im` of `Z_t^k conj(Z_t)^j` for all `(j,k)`.
pub fn moment_contributions(z: &ComplexSeries, p: usize) -> Vec<Vec<f64>> {
    let m = p + 1;
    let mut rows = Vec::with_capacity(z.len());
    let mut zp = vec![Complex64::new(0.0, 0.0); m];
    let mut zcp = vec![Complex64::new(0.0, 0.0); m];
    for &zt in z.samples() {
        zp[0] = Complex64::new(1.0, 0.0);
        zcp[0] = Complex64::new(1.0, 0.0);
        let zc = zt.conj();
        for i in 1..m {
            zp[i] = zp[i - 1] * zt;
            zcp[i] = zcp[i - 1] * zc;
        }
        let mut row = Vec::with_capacity(2 * m * m);
        for j in 0..m {
            for k in 0..m {
                let v = zp[k] * zcp[j];
                row.push(v.re);
                row.push(v.im);
            }
        }
        rows.push(row);
    }
    rows
}

/// Bartlett-kernel long-run variance of a vector sequence: the contributions
/// are centered, then `Gamma = Omega_0 + sum_l w_l (Omega_l + Omega_l')`
/// with `w_l = 1 - l/(B+1)` and `Omega_l = (1/T) sum_t c_t c_{t-l}'`.
pub fn hac_gamma1(contributions: &[Vec<f64>], bandwidth: usize) -> Result<DMatrix<f64>> {
    let t_len = contributions.len();
    if t_len <= 2 * bandwidth {
        return Err(Error::invalid(format!(
            "sequence of length {t_len} too short for bandwidth {bandwidth}"
        )));
    }
    let dim = contributions[0].len();
    let mut mean = vec![0.0f64; dim];
    for row in contributions {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= t_len as f64;
    }
    let centered: Vec<Vec<f64>> = contributions
        .iter()
        .map(|row| row.iter().zip(&mean).map(|(v, m)| v - m).collect())
        .collect();

    let mut gamma = DMatrix::zeros(dim, dim);
    for lag in 0..=bandwidth {
        let weight = 1.0 - lag as f64 / (bandwidth as f64 + 1.0);
        let mut omega = DMatrix::zeros(dim, dim);
        for t in lag..t_len {
            let a = &centered[t];
            let b = &centered[t - lag];
            for r in 0..dim {
                if a[r] == 0.0 {
                    continue;
                }
                for c in 0..dim {
                    omega[(r, c)] += a[r] * b[c];
                }
            }
        }
        omega /= t_len as f64;
        if lag == 0 {
            gamma += omega;
        } else {
            gamma += (&omega + omega.transpose()) * weight;
        }
    }
    // Scrub roundoff asymmetry.
    let sym = (&gamma + gamma.transpose()) * 0.5;
    Ok(sym)
}

/// Expands a real matrix acting on complex vectors to the interleaved real
/// layout: each entry becomes a 2x2 scalar block.
fn expand_interleaved(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (rows, cols) = a.shape();
    let mut out = DMatrix::zeros(2 * rows, 2 * cols);
    for r in 0..rows {
        for c in 0..cols {
            out[(2 * r, 2 * c)] = a[(r, c)];
            out[(2 * r + 1, 2 * c + 1)] = a[(r, c)];
        }
    }
    out
}

/// Complex Hermitian view of an interleaved real covariance.
fn complex_from_interleaved(g: &DMatrix<f64>) -> DMatrix<Complex64> {
    let dim = g.nrows() / 2;
    DMatrix::from_fn(dim, dim, |r, c| {
        Complex64::new(
            g[(2 * r, 2 * c)] + g[(2 * r + 1, 2 * c + 1)],
            g[(2 * r + 1, 2 * c)] - g[(2 * r, 2 * c + 1)],
        )
    })
}

/// Plug-in covariance report for one estimation result.
#[derive(Debug, Clone)]
pub struct CovarianceReport {
    /// Covariance of `(xi_hat_0 .. xi_hat_{d-1}, sigma_hat)`, already divided
    /// by the effective sample size.
    pub cov: DMatrix<f64>,
    /// `-dJ/dsigma` at the estimate; positive when the criterion crosses
    /// zero downward as it should.
    pub alpha_hat: f64,
    /// Set when `alpha_hat <= 0` (crossing direction violated).
    pub negative_alpha: bool,
    /// Long-run variance of the moment vector, as a complex Hermitian matrix.
    pub gamma1_hat: DMatrix<Complex64>,
    /// Scalar inner sandwich: gradient' * expanded-denoise * Gamma * ... .
    pub s_squared: f64,
    pub fd_steps: FdSteps,
    pub bandwidth: usize,
    /// Condition number of the xi-Hessian.
    pub hessian_cond: f64,
}

impl CovarianceReport {
    /// Plug-in standard error of `sigma_hat`.
    pub fn sigma_std(&self) -> f64 {
        let d = self.cov.nrows() - 1;
        self.cov[(d, d)].max(0.0).sqrt()
    }

    /// Plug-in standard error of `xi_hat[i]`.
    pub fn xi_std(&self, i: usize) -> f64 {
        self.cov[(i, i)].max(0.0).sqrt()
    }

    /// Largest asymmetry of the stored covariance (diagnostic).
    pub fn symmetry_residual(&self) -> f64 {
        let t = self.cov.transpose();
        (&self.cov - t).iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}

/// Assembles the sandwich covariance at an estimation result.
pub fn plug_in_covariance(y: &ComplexSeries, est: &EstimationResult) -> Result<CovarianceReport> {
    let xi = &est.xi_hat;
    let sigma = est.sigma_hat;
    let p = est.p;
    let hw = est.half_width;
    let dim = xi.len();

    let criterion = |s: f64, x: &[f64]| -> f64 {
        let spec = match FilterSpec::fir(hw, x.to_vec()) {
            Ok(sp) => sp,
            Err(_) => return f64::NAN,
        };
        match CriterionSlice::from_observations(&spec, y, p) {
            Ok(slice) => slice.j(s),
            Err(_) => f64::NAN,
        }
    };
    let steps = FdSteps::for_point(sigma, xi);
    let derivs = criterion_derivatives(&criterion, sigma, xi, steps.clone());
    let alpha_hat = -derivs.d1;
    let negative_alpha = !(alpha_hat > 0.0);

    // Hessian conditioning.
    let eig = derivs.d22.clone().symmetric_eigen();
    let mut abs_min = f64::INFINITY;
    let mut abs_max: f64 = 0.0;
    for &l in eig.eigenvalues.iter() {
        abs_min = abs_min.min(l.abs());
        abs_max = abs_max.max(l.abs());
    }
    let hessian_cond = if abs_min > 0.0 { abs_max / abs_min } else { f64::INFINITY };
    if hessian_cond > 1e12 {
        return Err(Error::SingularHessian { cond: hessian_cond });
    }

    // Criterion gradient with respect to the denoised moment entries.
    let spec = FilterSpec::fir(hw, xi.clone())?;
    let slice = CriterionSlice::from_observations(&spec, y, p)?;
    let norm = slice.norm;
    let d_tilde = pseudo_moments(&slice.d_n, sigma, norm)?;
    let matrix = hankel_matrix(&d_tilde);
    let g = DVector::from_vec(h_gradient_interleaved(&matrix));

    // Long-run variance of the raw moments, pushed through the denoising map.
    let z = z_series(&spec, y)?;
    let contribs = moment_contributions(&z, p);
    let n_eff = contribs.len();
    let bandwidth = (n_eff as f64).powf(1.0 / 3.0).floor() as usize;
    let gamma_real = hac_gamma1(&contribs, bandwidth)?;
    let a_inv = expand_interleaved(&build_a_inverse(sigma * norm, p)?);
    let m_tilde = &a_inv * &gamma_real * a_inv.transpose();
    let s_squared = (g.transpose() * &m_tilde * &g)[(0, 0)];

    // Direction vector coupling filter and noise errors.
    let lu = derivs.d22.clone().lu();
    let hb = lu
        .solve(&derivs.d12)
        .ok_or(Error::SingularHessian { cond: hessian_cond })?;
    let mut n_vec = DVector::zeros(dim + 1);
    for i in 0..dim {
        n_vec[i] = hb[i] / alpha_hat;
    }
    n_vec[dim] = 1.0 / alpha_hat;

    let cov = &n_vec * n_vec.transpose() * (s_squared / n_eff as f64);
    Ok(CovarianceReport {
        cov,
        alpha_hat,
        negative_alpha,
        gamma1_hat: complex_from_interleaved(&gamma_real),
        s_squared,
        fd_steps: derivs.steps,
        bandwidth,
        hessian_cond,
    })
}

//! Noise deconvolution of conjugate moments and the determinant criterion.
//!
//! Adding independent complex Gaussian noise of level `beta` to a variable `V`
//! mixes the conjugate moments `E[V^k conj(V)^j]` linearly: the observed
//! moment vector is `A(beta)` times the noise-free one, where `A` couples
//! `(j,k)` only to `(j-r, k-r)` down the diagonal. The closed-form inverse
//! `A^{-1}(beta)` therefore *removes* a hypothesised noise level from
//! empirical moments, producing pseudo-moments. Arranged as a
//! `(p+1) x (p+1)` Hermitian matrix, the pseudo-moments are singular exactly
//! when the hypothesised level and filter are right (a p-point variable gives
//! a rank-p moment matrix), which is what the determinant criterion detects.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::moments::{empirical_moments, z_series, FilterSpec, MomentVector};
use crate::series::ComplexSeries;
use crate::Complex64;

/// Largest alphabet size with exact integer combinatorics in `f64`.
pub const MAX_P: usize = 12;

/// Exact `n!` for `n <= 12`.
fn factorial(n: usize) -> f64 {
    debug_assert!(n <= MAX_P);
    let mut f = 1.0f64;
    for i in 2..=n {
        f *= i as f64;
    }
    f
}

/// Exact binomial coefficient for `n <= 12`.
fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut num = 1.0f64;
    for i in 0..k {
        num = num * (n - i) as f64 / (i + 1) as f64;
    }
    num.round()
}

fn check_p(p: usize) -> Result<()> {
    if p == 0 || p > MAX_P {
        return Err(Error::invalid(format!("alphabet size must be in 1..={MAX_P}, got {p}")));
    }
    Ok(())
}

/// Coefficient multiplying moment `(j-r, k-r)` when forming the noisy moment
/// `(j,k)`: `C(k,r) C(j,r) r! beta^{2r}`.
#[inline]
fn transfer_coeff(j: usize, k: usize, r: usize, beta_sq_pow_r: f64) -> f64 {
    binomial(k, r) * binomial(j, r) * factorial(r) * beta_sq_pow_r
}

/// Dense realization of the noise moment-transfer matrix `A(beta)` in the
/// flat `(j,k)` index order. Lower-triangular with unit diagonal.
pub fn build_a(beta: f64, p: usize) -> Result<DMatrix<f64>> {
    check_p(p)?;
    let m = p + 1;
    let dim = m * m;
    let mut a = DMatrix::zeros(dim, dim);
    for j in 0..m {
        for k in 0..m {
            let row = j * m + k;
            let mut bpow = 1.0;
            for r in 0..=j.min(k) {
                let col = (j - r) * m + (k - r);
                a[(row, col)] = transfer_coeff(j, k, r, bpow);
                bpow *= beta * beta;
            }
        }
    }
    Ok(a)
}

/// Dense realization of the closed-form inverse `A^{-1}(beta)`: the same
/// coefficients with alternating sign `(-1)^r`.
pub fn build_a_inverse(beta: f64, p: usize) -> Result<DMatrix<f64>> {
    check_p(p)?;
    let m = p + 1;
    let dim = m * m;
    let mut a = DMatrix::zeros(dim, dim);
    for j in 0..m {
        for k in 0..m {
            let row = j * m + k;
            let mut bpow = 1.0;
            for r in 0..=j.min(k) {
                let col = (j - r) * m + (k - r);
                let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                a[(row, col)] = sign * transfer_coeff(j, k, r, bpow);
                bpow *= beta * beta;
            }
        }
    }
    Ok(a)
}

/// Both transfer matrices for a fixed noise scale, kept together for callers
/// that want to inspect them.
#[derive(Debug, Clone)]
pub struct ATransform {
    pub beta: f64,
    pub p: usize,
    pub forward: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
}

impl ATransform {
    pub fn new(beta: f64, p: usize) -> Result<Self> {
        if beta < 0.0 {
            return Err(Error::invalid("noise scale must be non-negative"));
        }
        Ok(Self { beta, p, forward: build_a(beta, p)?, inverse: build_a_inverse(beta, p)? })
    }

    /// Largest absolute deviation of `forward * inverse` from the identity.
    pub fn product_residual(&self) -> f64 {
        let prod = &self.forward * &self.inverse;
        let dim = prod.nrows();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in 0..dim {
                let want = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((prod[(r, c)] - want).abs());
            }
        }
        worst
    }
}

/// Applies `A^{-1}(beta)` to a flat moment vector without materializing the
/// matrix: `out[(j,k)] = sum_r (-1)^r C(k,r) C(j,r) r! beta^{2r} d[(j-r,k-r)]`.
pub fn apply_a_inverse(d: &[Complex64], p: usize, beta: f64, out: &mut [Complex64]) {
    let m = p + 1;
    debug_assert_eq!(d.len(), m * m);
    debug_assert_eq!(out.len(), m * m);
    let beta_sq = beta * beta;
    for j in 0..m {
        for k in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut bpow = 1.0;
            for r in 0..=j.min(k) {
                let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                let coeff = sign * transfer_coeff(j, k, r, bpow);
                acc += coeff * d[(j - r) * m + (k - r)];
                bpow *= beta_sq;
            }
            out[j * m + k] = acc;
        }
    }
}

/// Removes a hypothesised noise contribution of level `sigma` (filter norm
/// `norm`) from empirical moments, giving pseudo-moments of the denoised
/// filtered signal.
pub fn pseudo_moments(d_n: &MomentVector, sigma: f64, norm: f64) -> Result<MomentVector> {
    if sigma < 0.0 {
        return Err(Error::invalid("sigma must be non-negative"));
    }
    if !(norm > 0.0) {
        return Err(Error::ZeroFilter);
    }
    check_p(d_n.p)?;
    let mut out = vec![Complex64::new(0.0, 0.0); d_n.entries.len()];
    apply_a_inverse(&d_n.entries, d_n.p, sigma * norm, &mut out);
    Ok(MomentVector { p: d_n.p, entries: out })
}

/// The `(p+1) x (p+1)` pseudo-moment matrix, stored after Hermitian
/// symmetrization. `raw_asymmetry` is the largest modulus of `M - M^H` before
/// symmetrization; values materially above roundoff indicate a bug upstream.
#[derive(Debug, Clone)]
pub struct PseudoMomentMatrix {
    pub p: usize,
    entries: Vec<Complex64>,
    pub raw_asymmetry: f64,
}

impl PseudoMomentMatrix {
    /// Entry at `(row k, col j)`, equal to the symmetrized `d~[(j,k)]`.
    #[inline]
    pub fn entry(&self, row_k: usize, col_j: usize) -> Complex64 {
        self.entries[row_k * (self.p + 1) + col_j]
    }

    pub fn dim(&self) -> usize {
        self.p + 1
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        let m = self.p + 1;
        DMatrix::from_fn(m, m, |r, c| self.entry(r, c))
    }

    /// Determinant via pivoted LU on a scratch copy.
    pub fn determinant(&self) -> Complex64 {
        let mut scratch = self.entries.clone();
        det_lu_in_place(&mut scratch, self.p + 1)
    }
}

/// Reshapes a flat pseudo-moment vector into the matrix with
/// `entry[row k][col j] = d~[(j,k)]` and symmetrizes it.
pub fn hankel_matrix(d_tilde: &MomentVector) -> PseudoMomentMatrix {
    let m = d_tilde.p + 1;
    let mut raw = vec![Complex64::new(0.0, 0.0); m * m];
    for k in 0..m {
        for j in 0..m {
            raw[k * m + j] = d_tilde.entries[j * m + k];
        }
    }
    let mut raw_asymmetry = 0.0f64;
    let mut entries = vec![Complex64::new(0.0, 0.0); m * m];
    for r in 0..m {
        for c in 0..m {
            let a = raw[r * m + c];
            let b = raw[c * m + r].conj();
            raw_asymmetry = raw_asymmetry.max((a - b).norm());
            entries[r * m + c] = 0.5 * (a + b);
        }
    }
    PseudoMomentMatrix { p: d_tilde.p, entries, raw_asymmetry }
}

/// In-place determinant of a row-major `dim x dim` complex matrix by LU with
/// partial pivoting. Destroys the buffer. Hot path: no allocation.
pub fn det_lu_in_place(a: &mut [Complex64], dim: usize) -> Complex64 {
    debug_assert_eq!(a.len(), dim * dim);
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..dim {
        // Pivot on the largest modulus in this column.
        let mut pivot_row = col;
        let mut pivot_mag = a[col * dim + col].norm_sqr();
        for r in col + 1..dim {
            let mag = a[r * dim + col].norm_sqr();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot_row != col {
            for c in 0..dim {
                a.swap(col * dim + c, pivot_row * dim + c);
            }
            det = -det;
        }
        let pivot = a[col * dim + col];
        det *= pivot;
        let inv_pivot = pivot.inv();
        for r in col + 1..dim {
            let factor = a[r * dim + col] * inv_pivot;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for c in col + 1..dim {
                let t = factor * a[col * dim + c];
                a[r * dim + c] -= t;
            }
        }
    }
    det
}

/// Re-usable evaluator of the determinant criterion over `sigma` for a fixed
/// filter: the empirical moments are computed once, each evaluation is then
/// one fast denoising pass plus a small LU determinant.
#[derive(Debug, Clone)]
pub struct CriterionSlice {
    pub d_n: MomentVector,
    pub norm: f64,
}

impl CriterionSlice {
    pub fn from_observations(spec: &FilterSpec, y: &ComplexSeries, p: usize) -> Result<Self> {
        check_p(p)?;
        let norm = spec.l2_norm();
        if !(norm > 0.0) {
            return Err(Error::ZeroFilter);
        }
        let z = z_series(spec, y)?;
        let d_n = empirical_moments(&z, p)?;
        Ok(Self { d_n, norm })
    }

    pub fn from_moments(d_n: MomentVector, norm: f64) -> Result<Self> {
        if !(norm > 0.0) {
            return Err(Error::ZeroFilter);
        }
        check_p(d_n.p)?;
        Ok(Self { d_n, norm })
    }

    /// Determinant of the symmetrized pseudo-moment matrix at noise level
    /// `sigma`; the real part is the criterion value.
    pub fn det_at(&self, sigma: f64) -> Complex64 {
        let p = self.d_n.p;
        let m = p + 1;
        let mut tilde = vec![Complex64::new(0.0, 0.0); m * m];
        apply_a_inverse(&self.d_n.entries, p, sigma * self.norm, &mut tilde);
        // Build the symmetrized matrix directly into a scratch buffer:
        // matrix[(k,j)] = (tilde[(j,k)] + conj(tilde[(k,j)])) / 2.
        let mut mat = vec![Complex64::new(0.0, 0.0); m * m];
        for k in 0..m {
            for j in 0..m {
                mat[k * m + j] = 0.5 * (tilde[j * m + k] + tilde[k * m + j].conj());
            }
        }
        det_lu_in_place(&mut mat, m)
    }

    /// The criterion value `J_n(sigma)` (real part of the determinant).
    #[inline]
    pub fn j(&self, sigma: f64) -> f64 {
        self.det_at(sigma).re
    }
}

/// The determinant criterion at a hypothesised noise level and filter.
pub fn criterion_j(sigma: f64, spec: &FilterSpec, y: &ComplexSeries, p: usize) -> Result<f64> {
    Ok(CriterionSlice::from_observations(spec, y, p)?.j(sigma))
}

/// Sign-preserving log compression `sign(j) * log(|j| + 1)`: same roots and
/// monotonicity as the raw criterion, readable over many orders of magnitude.
pub fn g_transform(j_value: f64) -> f64 {
    j_value.signum() * (j_value.abs() + 1.0).ln()
}

//! Filtered observations and their empirical conjugate moments.
//!
//! Given observations `Y` and a candidate inverse filter with coefficients
//! `s_{-K} .. s_K`, the filtered process is `Z_t = sum_k s_k Y_{t-k}`,
//! defined for the `n - 2K` interior times. Its empirical conjugate moments
//! `mean_t Z_t^k conj(Z_t)^j` for `0 <= j,k <= p` are collected in a flat
//! vector indexed by `j*(p+1) + k`.

use std::io::Write as IoWrite;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{apply_filter, ComplexSeries, Fir};
use crate::Complex64;

/// Parametric family of the candidate inverse filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterFamily {
    /// The parameter vector is the coefficient vector itself.
    FirDirect,
}

/// A real-coefficient symmetric-window filter: `xi[i]` is the coefficient at
/// lag `i - half_width`, so `xi` has length `2*half_width + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub family: FilterFamily,
    pub half_width: usize,
    pub xi: Vec<f64>,
}

impl FilterSpec {
    pub fn fir(half_width: usize, xi: Vec<f64>) -> Result<Self> {
        let spec = Self { family: FilterFamily::FirDirect, half_width, xi };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.xi.len() != 2 * self.half_width + 1 {
            return Err(Error::invalid(format!(
                "filter with half width {} needs {} coefficients, got {}",
                self.half_width,
                2 * self.half_width + 1,
                self.xi.len()
            )));
        }
        if self.xi.iter().all(|&c| c == 0.0) {
            return Err(Error::ZeroFilter);
        }
        Ok(())
    }

    /// Euclidean norm of the coefficient vector.
    pub fn l2_norm(&self) -> f64 {
        self.xi.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Same window, different coefficients.
    pub fn with_xi(&self, xi: Vec<f64>) -> Result<Self> {
        Self::fir(self.half_width, xi)
    }
}

/// Applies the filter: `Z_t = sum_{k=-K}^{K} s_k Y_{t-k}` for the interior
/// times, yielding `n - 2K` samples.
pub fn z_series(spec: &FilterSpec, y: &ComplexSeries) -> Result<ComplexSeries> {
    spec.validate()?;
    let window = 2 * spec.half_width + 1;
    if y.len() < window {
        return Err(Error::SeriesTooShort { needed: window, got: y.len() });
    }
    let coeffs: Vec<Complex64> = spec.xi.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let fir = Fir::new(coeffs, -(spec.half_width as i64))?;
    apply_filter(&fir, y)
}

/// Compensated complex accumulator (one Kahan stream per component).
#[derive(Debug, Clone, Copy, Default)]
struct KahanC {
    sum_re: f64,
    c_re: f64,
    sum_im: f64,
    c_im: f64,
}

impl KahanC {
    #[inline]
    fn add(&mut self, z: Complex64) {
        let y = z.re - self.c_re;
        let t = self.sum_re + y;
        self.c_re = (t - self.sum_re) - y;
        self.sum_re = t;
        let y = z.im - self.c_im;
        let t = self.sum_im + y;
        self.c_im = (t - self.sum_im) - y;
        self.sum_im = t;
    }

    #[inline]
    fn value(&self) -> Complex64 {
        Complex64::new(self.sum_re, self.sum_im)
    }
}

/// The empirical conjugate moments of a filtered record, flat-indexed by
/// `j*(p+1) + k` with `entries[j*(p+1)+k] = mean_t Z_t^k conj(Z_t)^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    pub p: usize,
    pub entries: Vec<Complex64>,
}

impl MomentVector {
    /// Moment of order `(j, k)`: `mean_t Z_t^k conj(Z_t)^j`.
    #[inline]
    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.entries[j * (self.p + 1) + k]
    }

    /// Largest deviation from the conjugate symmetry
    /// `entry(j,k) = conj(entry(k,j))`.
    pub fn conj_symmetry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..=self.p {
            for k in 0..=self.p {
                worst = worst.max((self.entry(j, k) - self.entry(k, j).conj()).norm());
            }
        }
        worst
    }

    /// Debug CSV with columns `j,k,re,im`.
    pub fn write_csv<W: IoWrite>(&self, mut w: W) -> Result<()> {
        writeln!(w, "j,k,re,im")?;
        for j in 0..=self.p {
            for k in 0..=self.p {
                let z = self.entry(j, k);
                writeln!(w, "{j},{k},{},{}", z.re, z.im)?;
            }
        }
        Ok(())
    }
}

/// Computes all conjugate moments up to order `p` in one pass over the data,
/// using running powers and compensated summation.
pub fn empirical_moments(z: &ComplexSeries, p: usize) -> Result<MomentVector> {
    if p == 0 {
        return Err(Error::invalid("alphabet size must be at least 1"));
    }
    if z.is_empty() {
        return Err(Error::invalid("empty filtered series"));
    }
    let m = p + 1;
    let mut acc = vec![KahanC::default(); m * m];
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
        for j in 0..m {
            for k in 0..m {
                acc[j * m + k].add(zp[k] * zcp[j]);
            }
        }
    }
    let inv_n = 1.0 / z.len() as f64;
    let entries: Vec<Complex64> = acc.iter().map(|a| a.value() * inv_n).collect();
    Ok(MomentVector { p, entries })
}

/// Per-sample standard error of each moment entry (for oracle comparisons):
/// `std_t(Z_t^k conj(Z_t)^j) / sqrt(n)` component-wise on the modulus.
pub fn moment_standard_errors(z: &ComplexSeries, p: usize) -> Result<Vec<f64>> {
    let mv = empirical_moments(z, p)?;
    let m = p + 1;
    let n = z.len() as f64;
    let mut var = vec![0.0f64; m * m];
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
        for j in 0..m {
            for k in 0..m {
                let dev = zp[k] * zcp[j] - mv.entries[j * m + k];
                var[j * m + k] += dev.norm_sqr();
            }
        }
    }
    Ok(var.iter().map(|v| (v / n).sqrt() / n.sqrt()).collect())
}

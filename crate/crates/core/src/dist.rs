//! Discrete distributions on finite sets of complex points.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Complex64;

/// A probability distribution on finitely many complex support points.
/// Points must be pairwise distinct and weights strictly positive, summing to 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscreteComplexDist {
    points: Vec<Complex64>,
    weights: Vec<f64>,
    #[serde(skip)]
    cdf: Vec<f64>,
}

impl DiscreteComplexDist {
    pub fn new(points: Vec<Complex64>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("distribution needs at least one point"));
        }
        if points.len() != weights.len() {
            return Err(Error::invalid(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        for (i, p) in points.iter().enumerate() {
            for q in &points[i + 1..] {
                if (p - q).norm() < 1e-12 {
                    return Err(Error::invalid(format!("duplicate support point {p}")));
                }
            }
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::invalid("weights must be strictly positive"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("weights sum to {total}, expected 1")));
        }
        let mut cdf = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for &w in &weights {
            acc += w;
            cdf.push(acc);
        }
        // Guard the last bin against rounding so sampling can never fall off the end.
        *cdf.last_mut().unwrap() = 1.0;
        Ok(Self { points, weights, cdf })
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Draws one point by CDF inversion.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let u: f64 = rng.gen();
        let idx = match self.cdf.iter().position(|&c| u < c) {
            Some(i) => i,
            None => self.cdf.len() - 1,
        };
        self.points[idx]
    }

    /// Exact mixed conjugate moment `E[X^k conj(X)^j]`.
    pub fn conj_moment(&self, j: u32, k: u32) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&a, &w) in self.points.iter().zip(&self.weights) {
            acc += w * a.powu(k) * a.conj().powu(j);
        }
        acc
    }
}

/// Rebuilds the sampling CDF after deserialization (serde skips it).
impl DiscreteComplexDist {
    pub fn revalidate(self) -> Result<Self> {
        Self::new(self.points, self.weights)
    }
}

//! Alphabet and weight recovery from the denoised moment matrix.
//!
//! At the estimated noise level and filter, the pseudo-moment matrix of the
//! denoised signal is (nearly) singular: its smallest-eigenvalue eigenvector
//! gives the coefficients of a degree-p polynomial whose roots are the
//! alphabet points, and the leading pure pseudo-moments then determine the
//! point probabilities through a Vandermonde system.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::deconv::PseudoMomentMatrix;
use crate::error::{Error, Result};
use crate::moments::MomentVector;
use crate::poly;
use crate::Complex64;

/// Recovered alphabet: `points` are sorted canonically, `eigvec` is the unit
/// eigenvector whose entries are the polynomial coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlphabetEstimate {
    pub points: Vec<Complex64>,
    pub eigvec: Vec<Complex64>,
    pub min_eigenvalue: f64,
}

/// Recovered point probabilities. `imag_residual` is the largest imaginary
/// magnitude discarded when realizing the weights; `negative_flag` marks
/// solutions with a negative component (reported, never clipped).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightEstimate {
    pub weights: Vec<f64>,
    pub imag_residual: f64,
    pub negative_flag: bool,
}

/// Sorts complex points by descending real part, breaking ties by descending
/// imaginary part.
pub fn canonical_sort(mut points: Vec<Complex64>) -> Vec<Complex64> {
    points.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    points
}

/// Extracts the alphabet from the (Hermitian, symmetrized) pseudo-moment
/// matrix: unit eigenvector of the smallest eigenvalue, then the roots of the
/// polynomial it encodes.
pub fn support_points(d_tilde: &PseudoMomentMatrix) -> Result<AlphabetEstimate> {
    let mat = d_tilde.to_dmatrix();
    let eig = nalgebra::SymmetricEigen::new(mat);
    let mut min_idx = 0usize;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[min_idx] {
            min_idx = i;
        }
    }
    let min_eigenvalue = eig.eigenvalues[min_idx];
    let col = eig.eigenvectors.column(min_idx);
    let norm: f64 = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    // With rows indexed by the plain power k and columns by the conjugated
    // power j, the Hermitian form reads sum d~[(j,k)] v_k conj(v_j): the
    // coefficient vector annihilating the form is the *conjugate* of the
    // matrix eigenvector, and its polynomial vanishes on the alphabet itself
    // rather than on its mirror image.
    let eigvec: Vec<Complex64> = col.iter().map(|z| (z / norm).conj()).collect();
    let p = d_tilde.p;
    let lead = eigvec[p].norm();
    if lead < 1e-10 {
        return Err(Error::DegenerateLeadingCoeff { magnitude: lead });
    }
    let points = canonical_sort(poly::roots(&eigvec)?);
    Ok(AlphabetEstimate { points, eigvec, min_eigenvalue })
}

/// Solves for the point probabilities from the pure pseudo-moments
/// `d~[(j=0, k)]`, `k = 0..p-1`: `sum_i q_i a_i^k = d~[k]`.
pub fn weights(d_tilde: &MomentVector, points: &[Complex64]) -> Result<WeightEstimate> {
    let p = points.len();
    if p == 0 {
        return Err(Error::invalid("no support points"));
    }
    if d_tilde.p != p {
        return Err(Error::invalid(format!(
            "moment vector for alphabet size {} but {} points",
            d_tilde.p, p
        )));
    }
    for i in 0..p {
        for j in i + 1..p {
            if (points[i] - points[j]).norm() < 1e-10 {
                return Err(Error::SingularVandermonde { a: i, b: j });
            }
        }
    }
    let v = DMatrix::from_fn(p, p, |k, i| points[i].powu(k as u32));
    let rhs = DVector::from_fn(p, |k, _| d_tilde.entries[k]);
    let solution = v
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularVandermonde { a: 0, b: 0 })?;
    let mut imag_residual = 0.0f64;
    let mut weights = Vec::with_capacity(p);
    for q in solution.iter() {
        imag_residual = imag_residual.max(q.im.abs());
        weights.push(q.re);
    }
    let negative_flag = weights.iter().any(|&w| w < 0.0);
    Ok(WeightEstimate { weights, imag_residual, negative_flag })
}

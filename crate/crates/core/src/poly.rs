//! Roots of complex polynomials via the companion matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::Complex64;

/// Evaluates `sum_i coeffs[i] x^i` by Horner's rule.
pub fn eval(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Derivative evaluation by Horner's rule.
pub fn eval_deriv(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * x + c * i as f64;
    }
    acc
}

/// All roots of the degree `len-1` polynomial with coefficient `coeffs[i]` on
/// `x^i`, as eigenvalues of the monic companion matrix, each tightened by a
/// guarded Newton step.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    if coeffs.len() < 2 {
        return Err(Error::invalid("polynomial must have degree at least 1"));
    }
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    if lead.norm() < 1e-300 {
        return Err(Error::DegenerateLeadingCoeff { magnitude: lead.norm() });
    }
    let monic: Vec<Complex64> = coeffs[..n].iter().map(|&c| c / lead).collect();
    let mut comp = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        comp[(i, n - 1)] = -monic[i];
        if i + 1 < n {
            comp[(i + 1, i)] = Complex64::new(1.0, 0.0);
        }
    }
    let schur = nalgebra::Schur::new(comp);
    let t = schur.unpack().1;
    let mut rts: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    // One or two guarded Newton steps sharpen the backward error.
    for r in rts.iter_mut() {
        for _ in 0..2 {
            let f = eval(coeffs, *r);
            let df = eval_deriv(coeffs, *r);
            if df.norm() < 1e-300 {
                break;
            }
            let cand = *r - f / df;
            if eval(coeffs, cand).norm() < f.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }
    Ok(rts)
}

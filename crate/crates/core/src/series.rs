//! Finite complex sample sequences with an index origin.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::Complex64;

/// A finite sequence of complex samples. `origin` is the time index of the
/// first sample, so `samples[i]` sits at time `origin + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeries {
    samples: Vec<Complex64>,
    origin: i64,
}

impl ComplexSeries {
    pub fn new(samples: Vec<Complex64>, origin: i64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("series must contain at least one sample"));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("series contains non-finite samples"));
        }
        Ok(Self { samples, origin })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Sample at absolute time `t`, if inside the support.
    pub fn at(&self, t: i64) -> Option<Complex64> {
        let i = t.checked_sub(self.origin)?;
        if i < 0 {
            return None;
        }
        self.samples.get(i as usize).copied()
    }

    /// Writes the series as CSV with columns `t,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,re,im")?;
        for (i, z) in self.samples.iter().enumerate() {
            writeln!(w, "{},{},{}", self.origin + i as i64, z.re, z.im)?;
        }
        Ok(())
    }

    /// Reads a series from `t,re,im` CSV (header optional). Rows must be in
    /// consecutive time order.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut samples = Vec::new();
        let mut origin: Option<i64> = None;
        let mut next_t: i64 = 0;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if lineno == 0 && fields[0].eq_ignore_ascii_case("t") {
                continue;
            }
            if fields.len() != 3 {
                return Err(Error::Parse(format!(
                    "line {}: expected 3 fields, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let t: i64 = fields[0]
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: bad t: {e}", lineno + 1)))?;
            let re: f64 = fields[1]
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: bad re: {e}", lineno + 1)))?;
            let im: f64 = fields[2]
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: bad im: {e}", lineno + 1)))?;
            match origin {
                None => {
                    origin = Some(t);
                    next_t = t + 1;
                }
                Some(_) => {
                    if t != next_t {
                        return Err(Error::Parse(format!(
                            "line {}: non-consecutive time index {t}",
                            lineno + 1
                        )));
                    }
                    next_t += 1;
                }
            }
            samples.push(Complex64::new(re, im));
        }
        let origin = origin.ok_or_else(|| Error::Parse("empty CSV".into()))?;
        ComplexSeries::new(samples, origin)
    }
}

/// A finite direct filter: coefficient `coeffs[i]` sits at lag `origin + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fir {
    pub coeffs: Vec<Complex64>,
    pub origin: i64,
}

impl Fir {
    pub fn new(coeffs: Vec<Complex64>, origin: i64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("filter must have at least one coefficient"));
        }
        Ok(Self { coeffs, origin })
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real(coeffs: &[f64], origin: i64) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(), origin)
    }

    /// The identity filter (a single 1 at lag 0).
    pub fn delta() -> Self {
        Self { coeffs: vec![Complex64::new(1.0, 0.0)], origin: 0 }
    }
}

/// Discrete convolution `(u * x)_t = sum_k u_k x_{t-k}`, restricted to output
/// times where every needed input sample exists. The output origin is adjusted
/// so absolute time indices stay consistent.
pub fn apply_filter(filter: &Fir, x: &ComplexSeries) -> Result<ComplexSeries> {
    let lu = filter.coeffs.len();
    let lx = x.len();
    if lx < lu {
        return Err(Error::EmptyOverlap { filter_len: lu, series_len: lx });
    }
    let out_len = lx - lu + 1;
    // First fully covered output time: x.origin + filter.origin + (lu - 1).
    let out_origin = x.origin() + filter.origin + (lu as i64 - 1);
    let xs = x.samples();
    let mut out = Vec::with_capacity(out_len);
    for i in 0..out_len {
        // y[i] = sum_j u[j] * x[i + lu - 1 - j]
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &c) in filter.coeffs.iter().enumerate() {
            acc += c * xs[i + lu - 1 - j];
        }
        out.push(acc);
    }
    ComplexSeries::new(out, out_origin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_filter_is_noop() {
        let x = ComplexSeries::new(vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)], 5).unwrap();
        let y = apply_filter(&Fir::delta(), &x).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn hand_convolution() {
        // coeffs (1, 1) at lags 0, 1 on x = [1, i, -1]: output [1+i, i-1] at t = 1, 2.
        let u = Fir::from_real(&[1.0, 1.0], 0).unwrap();
        let x = ComplexSeries::new(vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)], 0).unwrap();
        let y = apply_filter(&u, &x).unwrap();
        assert_eq!(y.origin(), 1);
        assert_eq!(y.samples(), &[c(1.0, 1.0), c(-1.0, 1.0)]);
    }

    #[test]
    fn empty_overlap_is_reported() {
        let u = Fir::from_real(&[1.0, 2.0, 3.0], 0).unwrap();
        let x = ComplexSeries::new(vec![c(1.0, 0.0), c(2.0, 0.0)], 0).unwrap();
        assert!(matches!(apply_filter(&u, &x), Err(Error::EmptyOverlap { .. })));
    }

    #[test]
    fn filter_is_linear() {
        let u = Fir::from_real(&[0.3, -1.2, 0.7], -1).unwrap();
        let xa: Vec<Complex64> = (0..12).map(|i| c((i as f64).sin(), (i as f64).cos())).collect();
        let xb: Vec<Complex64> = (0..12).map(|i| c(0.1 * i as f64, -0.2 * i as f64)).collect();
        let a = c(1.5, -0.5);
        let b = c(-0.25, 2.0);
        let combo: Vec<Complex64> =
            xa.iter().zip(&xb).map(|(&p, &q)| a * p + b * q).collect();
        let fa = apply_filter(&u, &ComplexSeries::new(xa, 0).unwrap()).unwrap();
        let fb = apply_filter(&u, &ComplexSeries::new(xb, 0).unwrap()).unwrap();
        let fc = apply_filter(&u, &ComplexSeries::new(combo, 0).unwrap()).unwrap();
        for i in 0..fc.len() {
            let want = a * fa.samples()[i] + b * fb.samples()[i];
            let got = fc.samples()[i];
            assert_abs_diff_eq!((want - got).norm(), 0.0, epsilon = 1e-13 * want.norm().max(1.0));
        }
    }

    #[test]
    fn csv_round_trip() {
        let x = ComplexSeries::new(vec![c(1.25, -3.5), c(0.125, 0.0)], -2).unwrap();
        let mut buf = Vec::new();
        x.write_csv(&mut buf).unwrap();
        let back = ComplexSeries::read_csv(&buf[..]).unwrap();
        assert_eq!(back, x);
    }
}

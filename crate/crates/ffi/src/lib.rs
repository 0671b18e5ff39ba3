//! C ABI around the estimation pipeline.
//!
//! Conventions:
//! - Handles (`BdSeries`, `BdResult`) are opaque; the C side only ever holds
//!   pointers obtained from constructors here and releases them with the
//!   matching `*_free` function. Passing null to a `*_free` is a no-op.
//! - Every fallible entry point returns a [`BdStatus`]; out-pointers are
//!   written only on `OK`. Array accessors copy into caller-provided buffers
//!   whose length must be queried first.
//! - Panics never unwind across the boundary; they surface as
//!   `INTERNAL_PANIC`.
//!
//! The C header is committed at `include/blindeconv.h` and regenerated with
//! `cargo build -p blindeconv-ffi --features cheader`.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use blindeconv::bench::recover_distribution;
use blindeconv::estimator::{estimate, EstimationResult, RootSearchConfig};
use blindeconv::model::{ar2_config, mixture_config, simulate_model};
use blindeconv::recovery::{AlphabetEstimate, WeightEstimate};
use blindeconv::rng::stream_rng;
use blindeconv::{Complex64, ComplexSeries, Error};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BdStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullArg = 1,
    /// Arguments were structurally invalid (empty series, bad sizes, ...).
    InvalidInput = 2,
    /// The criterion never crossed zero below the scan ceiling.
    NoRoot = 3,
    /// Every random search start failed.
    AllStartsFailed = 4,
    /// A recovery step hit a degenerate matrix or polynomial.
    Degenerate = 5,
    /// Operating-system I/O failure.
    Io = 6,
    /// A caller-provided buffer was shorter than the queried length.
    ShortBuffer = 7,
    /// An internal invariant was violated (a panic was caught).
    InternalPanic = 8,
}

fn status_of(e: &Error) -> BdStatus {
    match e {
        Error::NoRoot { .. } => BdStatus::NoRoot,
        Error::AllStartsFailed { .. } => BdStatus::AllStartsFailed,
        Error::DegenerateLeadingCoeff { .. }
        | Error::SingularVandermonde { .. }
        | Error::SingularHessian { .. } => BdStatus::Degenerate,
        Error::Io(_) => BdStatus::Io,
        _ => BdStatus::InvalidInput,
    }
}

/// Static description of a status code. Never null; the string is owned by
/// the library and must not be freed.
#[no_mangle]
pub extern "C" fn bd_status_message(status: BdStatus) -> *const c_char {
    let text: &'static [u8] = match status {
        BdStatus::Ok => b"ok\0",
        BdStatus::NullArg => b"null pointer argument\0",
        BdStatus::InvalidInput => b"invalid input\0",
        BdStatus::NoRoot => b"criterion has no root below the scan ceiling\0",
        BdStatus::AllStartsFailed => b"all search starts failed\0",
        BdStatus::Degenerate => b"degenerate matrix or polynomial in recovery\0",
        BdStatus::Io => b"i/o failure\0",
        BdStatus::ShortBuffer => b"destination buffer too short\0",
        BdStatus::InternalPanic => b"internal error\0",
    };
    text.as_ptr() as *const c_char
}

/// Opaque handle to an observation series.
pub struct BdSeries {
    inner: ComplexSeries,
}

/// Opaque handle to a completed estimation: noise level, normalized filter,
/// recovered support points, and weights.
pub struct BdResult {
    est: EstimationResult,
    alphabet: AlphabetEstimate,
    weights: WeightEstimate,
}

/// Runs `f`, converting a panic into `INTERNAL_PANIC` instead of unwinding
/// into the caller.
fn guarded(f: impl FnOnce() -> BdStatus) -> BdStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(BdStatus::InternalPanic)
}

/// Builds a series from parallel real/imaginary arrays of length `n`.
///
/// # Safety
/// `re` and `im` must point to `n` readable doubles; `out` must be a valid
/// destination for one pointer.
#[no_mangle]
pub unsafe extern "C" fn bd_series_new(
    re: *const f64,
    im: *const f64,
    n: usize,
    out: *mut *mut BdSeries,
) -> BdStatus {
    if re.is_null() || im.is_null() || out.is_null() {
        return BdStatus::NullArg;
    }
    guarded(|| {
        let res = std::slice::from_raw_parts(re, n);
        let ims = std::slice::from_raw_parts(im, n);
        let samples: Vec<Complex64> =
            res.iter().zip(ims).map(|(&r, &i)| Complex64::new(r, i)).collect();
        match ComplexSeries::new(samples, 0) {
            Ok(series) => {
                *out = Box::into_raw(Box::new(BdSeries { inner: series }));
                BdStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a series handle; null is ignored.
///
/// # Safety
/// `series` must be a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bd_series_free(series: *mut BdSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of samples; zero when the handle is null.
///
/// # Safety
/// `series` must be a live handle from this library, or null.
#[no_mangle]
pub unsafe extern "C" fn bd_series_len(series: *const BdSeries) -> usize {
    if series.is_null() {
        return 0;
    }
    (*series).inner.len()
}

/// Copies the samples into parallel `re`/`im` arrays of length `len`, which
/// must equal `bd_series_len`.
///
/// # Safety
/// `re` and `im` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bd_series_samples(
    series: *const BdSeries,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> BdStatus {
    if series.is_null() || re.is_null() || im.is_null() {
        return BdStatus::NullArg;
    }
    guarded(|| {
        let samples = (*series).inner.samples();
        if len < samples.len() {
            return BdStatus::ShortBuffer;
        }
        for (i, z) in samples.iter().enumerate() {
            *re.add(i) = z.re;
            *im.add(i) = z.im;
        }
        BdStatus::Ok
    })
}

unsafe fn simulate_preset(
    model: blindeconv::model::ModelConfig,
    seed: u64,
    out: *mut *mut BdSeries,
) -> BdStatus {
    let mut rng = stream_rng(seed, 0);
    match simulate_model(&model, &mut rng) {
        Ok(series) => {
            *out = Box::into_raw(Box::new(BdSeries { inner: series }));
            BdStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Simulates the three-point mixture preset (identity channel).
///
/// # Safety
/// `out` must be a valid destination for one pointer.
#[no_mangle]
pub unsafe extern "C" fn bd_simulate_mixture(
    sigma0: f64,
    n: usize,
    seed: u64,
    out: *mut *mut BdSeries,
) -> BdStatus {
    if out.is_null() {
        return BdStatus::NullArg;
    }
    guarded(|| simulate_preset(mixture_config(sigma0, n), seed, out))
}

/// Simulates the autoregressive preset (same alphabet, order-2 recursion).
///
/// # Safety
/// `out` must be a valid destination for one pointer.
#[no_mangle]
pub unsafe extern "C" fn bd_simulate_ar2(
    sigma0: f64,
    n: usize,
    seed: u64,
    out: *mut *mut BdSeries,
) -> BdStatus {
    if out.is_null() {
        return BdStatus::NullArg;
    }
    guarded(|| simulate_preset(ar2_config(sigma0, n), seed, out))
}

/// Runs the full pipeline: noise-level/filter search followed by support and
/// weight recovery. `half_width` is the filter window half-width, `p` the
/// assumed alphabet size, `n_starts` the number of random search starts
/// (0 selects the default).
///
/// # Safety
/// `y` must be a live series handle; `out` must be a valid destination for
/// one pointer.
#[no_mangle]
pub unsafe extern "C" fn bd_estimate(
    y: *const BdSeries,
    half_width: usize,
    p: usize,
    seed: u64,
    n_starts: usize,
    out: *mut *mut BdResult,
) -> BdStatus {
    if y.is_null() || out.is_null() {
        return BdStatus::NullArg;
    }
    guarded(|| {
        let mut cfg = RootSearchConfig::default();
        if n_starts > 0 {
            cfg.n_starts = n_starts;
        }
        let mut rng = stream_rng(seed, 0);
        let series = &(*y).inner;
        let est = match estimate(series, half_width, p, &cfg, &mut rng) {
            Ok(est) => est,
            Err(e) => return status_of(&e),
        };
        match recover_distribution(series, &est) {
            Ok((alphabet, weights)) => {
                *out = Box::into_raw(Box::new(BdResult { est, alphabet, weights }));
                BdStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a result handle; null is ignored.
///
/// # Safety
/// `result` must be a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bd_result_free(result: *mut BdResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Estimated noise scale; NaN when the handle is null.
///
/// # Safety
/// `result` must be a live handle from this library, or null.
#[no_mangle]
pub unsafe extern "C" fn bd_result_sigma(result: *const BdResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    (*result).est.sigma_hat
}

/// Criterion residual `|J|` at the fitted point; NaN when null.
///
/// # Safety
/// `result` must be a live handle from this library, or null.
#[no_mangle]
pub unsafe extern "C" fn bd_result_j_residual(result: *const BdResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    (*result).est.j_residual
}

/// Window index of the dominant filter tap.
///
/// # Safety
/// `result` must be a live handle from this library, or null.
#[no_mangle]
pub unsafe extern "C" fn bd_result_delay(result: *const BdResult) -> usize {
    if result.is_null() {
        return 0;
    }
    (*result).est.delay
}

/// Length of the normalized filter (the full window `2*half_width + 1`).
///
/// # Safety
/// `result` must be a live handle from this library, or null.
#[no_mangle]
pub unsafe extern "C" fn bd_result_filter_len(result: *const BdResult) -> usize {
    if result.is_null() {
        return 0;
    }
    (*result).est.theta_hat.len()
}

/// Copies the unit-norm, sign-fixed filter into `dst` (`len` doubles).
///
/// # Safety
/// `dst` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bd_result_filter(
    result: *const BdResult,
    dst: *mut f64,
    len: usize,
) -> BdStatus {
    if result.is_null() || dst.is_null() {
        return BdStatus::NullArg;
    }
    guarded(|| {
        let theta = &(*result).est.theta_hat;
        if len < theta.len() {
            return BdStatus::ShortBuffer;
        }
        for (i, &t) in theta.iter().enumerate() {
            *dst.add(i) = t;
        }
        BdStatus::Ok
    })
}

/// Number of recovered support points.
///
/// # Safety
/// `result` must be a live handle from this library, or null.
#[no_mangle]
pub unsafe extern "C" fn bd_result_alphabet_len(result: *const BdResult) -> usize {
    if result.is_null() {
        return 0;
    }
    (*result).alphabet.points.len()
}

/// Copies the support points (canonical order) into parallel `re`/`im`
/// arrays of `len` doubles each.
///
/// # Safety
/// `re` and `im` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bd_result_alphabet(
    result: *const BdResult,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> BdStatus {
    if result.is_null() || re.is_null() || im.is_null() {
        return BdStatus::NullArg;
    }
    guarded(|| {
        let points = &(*result).alphabet.points;
        if len < points.len() {
            return BdStatus::ShortBuffer;
        }
        for (i, z) in points.iter().enumerate() {
            *re.add(i) = z.re;
            *im.add(i) = z.im;
        }
        BdStatus::Ok
    })
}

/// Copies the recovered weights (matched to the support points) into `dst`.
///
/// # Safety
/// `dst` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bd_result_weights(
    result: *const BdResult,
    dst: *mut f64,
    len: usize,
) -> BdStatus {
    if result.is_null() || dst.is_null() {
        return BdStatus::NullArg;
    }
    guarded(|| {
        let weights = &(*result).weights.weights;
        if len < weights.len() {
            return BdStatus::ShortBuffer;
        }
        for (i, &w) in weights.iter().enumerate() {
            *dst.add(i) = w;
        }
        BdStatus::Ok
    })
}

/// 1 when a recovered weight was negative (the run would be eliminated from
/// benchmark averages), else 0.
///
/// # Safety
/// `result` must be a live handle from this library, or null.
#[no_mangle]
pub unsafe extern "C" fn bd_result_weights_negative(result: *const BdResult) -> i32 {
    if result.is_null() {
        return 0;
    }
    i32::from((*result).weights.negative_flag)
}

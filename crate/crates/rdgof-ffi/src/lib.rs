//! C ABI for the rdgof library.
//!
//! Every entry point returns an [`RdgofStatus`] code; results come back
//! through out-pointers and solver state through opaque handles. Errors
//! additionally store a message retrievable with `rdgof_last_error_message`.
//! All functions catch panics at the boundary, so no unwinding crosses into
//! foreign callers.

use std::cell::RefCell;
use std::ffi::{CString, c_char};
use std::panic::{AssertUnwindSafe, catch_unwind};

use rdgof::calibration::{NullModel, StatisticKind, calibrate};
use rdgof::rd_solver::{SolverConfig, blahut_arimoto, solve_for_distortion};
use rdgof::statistics::{
    QuadratureConfig, rd_statistic_circular, rd_statistic_gaussian, rd_statistic_hamming,
};
use rdgof::{
    DiscreteChannel, DiscreteDistribution, DistortionMatrix, DistortionSpec, EmpiricalSample,
    RdPoint, RdgofError, empirical_distribution,
};

/// Status codes returned by every API function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdgofStatus {
    Ok = 0,
    /// A pointer argument was null.
    NullPointer = 1,
    /// An argument failed validation; see the last error message.
    InvalidArgument = 2,
    /// The solver hit its iteration limit.
    NoConvergence = 3,
    /// A numeric failure inside an otherwise valid computation.
    Numeric = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &RdgofError) -> RdgofStatus {
    set_error(&err.to_string());
    match err {
        RdgofError::NoConvergence { .. } => RdgofStatus::NoConvergence,
        e if e.is_input_error() => RdgofStatus::InvalidArgument,
        _ => RdgofStatus::Numeric,
    }
}

/// Message describing the most recent error on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[unsafe(no_mangle)]
pub extern "C" fn rdgof_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |c| c.as_ptr())
    })
}

fn guard<F: FnOnce() -> RdgofStatus>(f: F) -> RdgofStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            RdgofStatus::Numeric
        }
    }
}

/// Reads a nonnull `(ptr, len)` pair into a slice, or fails.
unsafe fn slice_arg<'a, T>(ptr: *const T, len: usize) -> Option<&'a [T]> {
    if ptr.is_null() {
        None
    } else {
        Some(unsafe { std::slice::from_raw_parts(ptr, len) })
    }
}

macro_rules! try_ffi {
    ($expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(e) => return status_of(&e),
        }
    };
}

macro_rules! nonnull {
    ($ptr:expr) => {
        if $ptr.is_null() {
            set_error(concat!(stringify!($ptr), " is null"));
            return RdgofStatus::NullPointer;
        }
    };
}

/// Hamming-kernel statistic for categorical data against the uniform null.
///
/// `labels` holds `n` values in `[0, alphabet_size)`.
///
/// # Safety
/// `labels` must point to `n` readable elements and `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn rdgof_hamming_statistic(
    labels: *const usize,
    n: usize,
    alphabet_size: usize,
    alpha: f64,
    out: *mut f64,
) -> RdgofStatus {
    guard(|| {
        nonnull!(labels);
        nonnull!(out);
        let labels = unsafe { slice_arg(labels, n) }.unwrap();
        let sample = try_ffi!(EmpiricalSample::categorical(labels.to_vec()));
        let emp = try_ffi!(empirical_distribution(&sample, alphabet_size));
        let value = try_ffi!(rd_statistic_hamming(&emp, alpha));
        unsafe { *out = value };
        RdgofStatus::Ok
    })
}

/// Gaussian-kernel statistic for real data against the standard normal null.
///
/// Pass `grid_points = 0` for the default quadrature configuration.
///
/// # Safety
/// `values` must point to `n` readable elements and `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn rdgof_gaussian_statistic(
    values: *const f64,
    n: usize,
    alpha: f64,
    grid_points: usize,
    out: *mut f64,
) -> RdgofStatus {
    guard(|| {
        nonnull!(values);
        nonnull!(out);
        let values = unsafe { slice_arg(values, n) }.unwrap();
        let quad = if grid_points == 0 {
            QuadratureConfig::default()
        } else {
            try_ffi!(QuadratureConfig::new(grid_points, 10.0))
        };
        let value = try_ffi!(rd_statistic_gaussian(values, alpha, &quad));
        unsafe { *out = value };
        RdgofStatus::Ok
    })
}

/// Von Mises-kernel statistic for angles against the circular uniform null.
///
/// Pass `grid_points = 0` for the default quadrature configuration.
///
/// # Safety
/// `angles` must point to `n` readable elements and `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn rdgof_circular_statistic(
    angles: *const f64,
    n: usize,
    kappa: f64,
    grid_points: usize,
    out: *mut f64,
) -> RdgofStatus {
    guard(|| {
        nonnull!(angles);
        nonnull!(out);
        let angles = unsafe { slice_arg(angles, n) }.unwrap();
        let quad = if grid_points == 0 {
            QuadratureConfig::default()
        } else {
            try_ffi!(QuadratureConfig::new(grid_points, 10.0))
        };
        let value = try_ffi!(rd_statistic_circular(angles, kappa, &quad));
        unsafe { *out = value };
        RdgofStatus::Ok
    })
}

/// Solved rate-distortion problem: optimal channel plus its operating point.
pub struct RdgofChannel {
    channel: DiscreteChannel,
    point: RdPoint,
}

fn build_inputs(
    source: *const f64,
    alphabet_size: usize,
    distortion: *const f64,
) -> Result<(DiscreteDistribution, DistortionSpec), RdgofError> {
    let probs = unsafe { slice_arg(source, alphabet_size) }
        .ok_or_else(|| RdgofError::Empty("source"))?;
    let src = DiscreteDistribution::new(probs.to_vec())?;
    let spec = if distortion.is_null() {
        DistortionSpec::Hamming(alphabet_size)
    } else {
        let data = unsafe { slice_arg(distortion, alphabet_size * alphabet_size) }.unwrap();
        DistortionSpec::Matrix(DistortionMatrix::new(
            alphabet_size,
            alphabet_size,
            data.to_vec(),
        )?)
    };
    Ok((src, spec))
}

/// Solves at a fixed slope `beta`. `distortion` is a row-major
/// `alphabet_size`-square matrix, or null for Hamming distortion.
/// On success `*out` owns a handle that must be released with
/// [`rdgof_channel_free`].
///
/// # Safety
/// `source` must point to `alphabet_size` readable elements, `distortion` to
/// `alphabet_size`² elements or be null, and `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn rdgof_channel_solve_slope(
    source: *const f64,
    alphabet_size: usize,
    distortion: *const f64,
    beta: f64,
    out: *mut *mut RdgofChannel,
) -> RdgofStatus {
    guard(|| {
        nonnull!(source);
        nonnull!(out);
        let (src, spec) = try_ffi!(build_inputs(source, alphabet_size, distortion));
        let (channel, point) = try_ffi!(blahut_arimoto(&src, &spec, &SolverConfig::new(beta)));
        unsafe { *out = Box::into_raw(Box::new(RdgofChannel { channel, point })) };
        RdgofStatus::Ok
    })
}

/// Solves for a target distortion `d0`; otherwise as
/// [`rdgof_channel_solve_slope`].
///
/// # Safety
/// Same contract as [`rdgof_channel_solve_slope`].
#[unsafe(no_mangle)]
pub unsafe extern "C" fn rdgof_channel_solve_distortion(
    source: *const f64,
    alphabet_size: usize,
    distortion: *const f64,
    d0: f64,
    out: *mut *mut RdgofChannel,
) -> RdgofStatus {
    guard(|| {
        nonnull!(source);
        nonnull!(out);
        let (src, spec) = try_ffi!(build_inputs(source, alphabet_size, distortion));
        let (channel, point) =
            try_ffi!(solve_for_distortion(&src, &spec, d0, &SolverConfig::new(1.0)));
        unsafe { *out = Box::into_raw(Box::new(RdgofChannel { channel, point })) };
        RdgofStatus::Ok
    })
}

/// Rate (nats), distortion and slope of a solved channel.
///
/// # Safety
/// `handle` must come from a solve call and not have been freed; out-pointers
/// must be writable or null (null fields are skipped).
#[unsafe(no_mangle)]
pub unsafe extern "C" fn rdgof_channel_point(
    handle: *const RdgofChannel,
    rate: *mut f64,
    distortion: *mut f64,
    slope: *mut f64,
) -> RdgofStatus {
    guard(|| {
        nonnull!(handle);
        let h = unsafe { &*handle };
        unsafe {
            if !rate.is_null() {
                *rate = h.point.rate;
            }
            if !distortion.is_null() {
                *distortion = h.point.distortion;
            }
            if !slope.is_null() {
                *slope = h.point.slope;
            }
        }
        RdgofStatus::Ok
    })
}

/// Number of source symbols of a solved channel.
///
/// # Safety
/// `handle` must come from a solve call and not have been freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn rdgof_channel_rows(handle: *const RdgofChannel) -> usize {
    if handle.is_null() {
        return 0;
    }
    unsafe { &*handle }.channel.rows()
}

/// Number of reproduction symbols of a solved channel.
///
/// # Safety
/// `handle` must come from a solve call and not have been freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn rdgof_channel_cols(handle: *const RdgofChannel) -> usize {
    if handle.is_null() {
        return 0;
    }
    unsafe { &*handle }.channel.cols()
}

/// One transition probability of a solved channel.
///
/// # Safety
/// `handle` must come from a solve call and not have been freed; `out` must
/// be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn rdgof_channel_entry(
    handle: *const RdgofChannel,
    row: usize,
    col: usize,
    out: *mut f64,
) -> RdgofStatus {
    guard(|| {
        nonnull!(handle);
        nonnull!(out);
        let h = unsafe { &*handle };
        if row >= h.channel.rows() || col >= h.channel.cols() {
            set_error("row or column index out of range");
            return RdgofStatus::InvalidArgument;
        }
        unsafe { *out = h.channel.entry(row, col) };
        RdgofStatus::Ok
    })
}

/// Releases a channel handle. Null is a no-op.
///
/// # Safety
/// `handle` must come from a solve call and must not be used afterwards.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn rdgof_channel_free(handle: *mut RdgofChannel) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Null model selector for [`rdgof_calibrate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdgofModel {
    /// Uniform on a finite alphabet; `parameter` is the Hamming mixing
    /// weight and `alphabet_size` is required.
    UniformDiscrete = 0,
    /// Standard normal; `parameter` is the Gaussian shrinkage factor.
    StandardNormal = 1,
    /// Uniform on the circle; `parameter` is the von Mises concentration.
    UniformCircle = 2,
}

/// Monte Carlo critical value of the matching rate-distortion statistic under
/// the selected null, reproducible for a fixed `seed`.
///
/// # Safety
/// `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn rdgof_calibrate(
    model: RdgofModel,
    alphabet_size: usize,
    parameter: f64,
    sample_size: usize,
    replications: usize,
    seed: u64,
    significance: f64,
    out: *mut f64,
) -> RdgofStatus {
    guard(|| {
        nonnull!(out);
        let (null_model, statistic) = match model {
            RdgofModel::UniformDiscrete => (
                NullModel::UniformDiscrete { alphabet_size },
                StatisticKind::HammingRd {
                    alpha: parameter,
                    alphabet_size,
                },
            ),
            RdgofModel::StandardNormal => (
                NullModel::StandardNormal,
                StatisticKind::GaussianRd {
                    alpha: parameter,
                    quad: QuadratureConfig::default(),
                },
            ),
            RdgofModel::UniformCircle => (
                NullModel::UniformCircle,
                StatisticKind::CircularRd {
                    kappa: parameter,
                    quad: QuadratureConfig::default(),
                },
            ),
        };
        let cal = try_ffi!(calibrate(
            &null_model,
            &statistic,
            sample_size,
            replications,
            seed,
            significance,
        ));
        unsafe { *out = cal.critical_value };
        RdgofStatus::Ok
    })
}

//! C ABI for the sawfid toolkit: opaque handles, status codes, and a
//! black-box dimension estimator for externally produced signals.
//!
//! The generated header lives at `include/sawfid.h`. All entry points
//! are panic-safe: panics are caught and reported as
//! `SAWFID_STATUS_INTERNAL_ERROR`.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sawfid::fidelity::{compute_fidelity_series, detect_transient, FidelitySeries, InitialState};
use sawfid::fractal::{estimate_dimension, WindowSpec};
use sawfid::noise::sample_imperfections;
use sawfid::params::MapParams;
use sawfid::state::GaussianPacketSpec;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SawfidStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Arguments failed validation (range, finiteness, configuration).
    InvalidArgument = 2,
    /// The computation ran but produced no usable result (for example no
    /// saturation or a degenerate scaling window).
    NoResult = 3,
    /// A panic was caught at the boundary.
    InternalError = 4,
}

/// Opaque fidelity series handle.
pub struct SawfidSeries {
    inner: FidelitySeries,
}

/// Result of a box-counting dimension fit.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SawfidDimension {
    /// Estimated fractal dimension.
    pub dimension: f64,
    /// Standard error of the fitted log-log slope.
    pub std_error: f64,
    /// Goodness of fit of the log-log line.
    pub r_squared: f64,
    /// Fit window lower edge (strip width, samples).
    pub window_min: f64,
    /// Fit window upper edge (strip width, samples).
    pub window_max: f64,
    /// 1 when the fit is reliable (r² >= 0.9 and a plausible dimension).
    pub reliable: i32,
}

fn guard<F: FnOnce() -> SawfidStatus>(f: F) -> SawfidStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => SawfidStatus::InternalError,
    }
}

/// Computes a fidelity series for a Gaussian packet initial condition.
///
/// On success `*out` owns a new handle that must be released with
/// `sawfid_series_free`.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn sawfid_series_compute(
    n_qubits: u32,
    chaos: f64,
    epsilon: f64,
    seed: u64,
    theta0: f64,
    momentum0: f64,
    t_max: usize,
    out: *mut *mut SawfidSeries,
) -> SawfidStatus {
    if out.is_null() {
        return SawfidStatus::NullPointer;
    }
    guard(|| {
        let result = (|| {
            let params = MapParams::new(n_qubits, chaos)?;
            let config = sample_imperfections(n_qubits, epsilon, seed)?;
            let initial = InitialState::Gaussian(GaussianPacketSpec::minimal(theta0, momentum0));
            compute_fidelity_series(&params, &config, &initial, t_max)
        })();
        match result {
            Ok(series) => {
                let handle = Box::new(SawfidSeries { inner: series });
                unsafe { *out = Box::into_raw(handle) };
                SawfidStatus::Ok
            }
            Err(_) => {
                unsafe { *out = ptr::null_mut() };
                SawfidStatus::InvalidArgument
            }
        }
    })
}

/// Number of samples in the series (t_max + 1; index 0 holds F(0) = 1).
///
/// # Safety
/// `series` must be null or a live handle from `sawfid_series_compute`.
#[no_mangle]
pub unsafe extern "C" fn sawfid_series_len(series: *const SawfidSeries) -> usize {
    if series.is_null() {
        return 0;
    }
    unsafe { &*series }.inner.values.len()
}

/// Copies the fidelity values into `buf` (capacity `len` doubles).
///
/// # Safety
/// `series` must be a live handle; `buf` must hold at least `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sawfid_series_values(
    series: *const SawfidSeries,
    buf: *mut f64,
    len: usize,
) -> SawfidStatus {
    if series.is_null() || buf.is_null() {
        return SawfidStatus::NullPointer;
    }
    guard(|| {
        let values = &unsafe { &*series }.inner.values;
        if len < values.len() {
            return SawfidStatus::InvalidArgument;
        }
        unsafe { ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len()) };
        SawfidStatus::Ok
    })
}

/// Detects the transient cutoff t*; `SAWFID_STATUS_NO_RESULT` when the
/// series never saturates.
///
/// # Safety
/// `series` must be a live handle; `out` must point to a writable
/// size_t.
#[no_mangle]
pub unsafe extern "C" fn sawfid_series_transient(
    series: *const SawfidSeries,
    out: *mut usize,
) -> SawfidStatus {
    if series.is_null() || out.is_null() {
        return SawfidStatus::NullPointer;
    }
    guard(|| match detect_transient(&unsafe { &*series }.inner.values) {
        Ok(t) => {
            unsafe { *out = t };
            SawfidStatus::Ok
        }
        Err(sawfid::Error::NoSaturation) => SawfidStatus::NoResult,
        Err(_) => SawfidStatus::InvalidArgument,
    })
}

/// Releases a series handle. Null is ignored.
///
/// # Safety
/// `series` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn sawfid_series_free(series: *mut SawfidSeries) {
    if !series.is_null() {
        drop(unsafe { Box::from_raw(series) });
    }
}

/// Estimates the fractal dimension of an arbitrary sampled signal with
/// the modified box-counting estimator and an auto-detected scaling
/// window. `SAWFID_STATUS_NO_RESULT` marks signals with no scaling
/// region (flat or too short).
///
/// # Safety
/// `signal` must point to `len` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sawfid_box_dimension(
    signal: *const f64,
    len: usize,
    out: *mut SawfidDimension,
) -> SawfidStatus {
    if signal.is_null() || out.is_null() {
        return SawfidStatus::NullPointer;
    }
    guard(|| {
        let data = unsafe { std::slice::from_raw_parts(signal, len) };
        match estimate_dimension(data, WindowSpec::Auto) {
            Ok(result) => {
                unsafe {
                    *out = SawfidDimension {
                        dimension: result.dimension,
                        std_error: result.std_error,
                        r_squared: result.r_squared,
                        window_min: result.fit_window.0,
                        window_max: result.fit_window.1,
                        reliable: result.flags.is_empty() as i32,
                    };
                }
                SawfidStatus::Ok
            }
            Err(sawfid::Error::DegenerateWindow) => SawfidStatus::NoResult,
            Err(_) => SawfidStatus::InvalidArgument,
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sawfid_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    CStr::from_bytes_with_nul(VERSION.as_bytes())
        .expect("static version string")
        .as_ptr()
}

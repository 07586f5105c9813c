//! C ABI for the value-distribution laboratory.
//!
//! Conventions: objects are opaque handles created by `*_parse_json` and
//! released by the matching `*_free`; every fallible call returns a
//! `NevlabStatus` and leaves a human-readable message for
//! [`nevlab_last_error_message`]. Output buffers are caller-allocated
//! except for JSON strings, which are released with [`nevlab_string_free`].

use nevlab_core::cli::AppError;
use nevlab_core::curve::HoloCurve;
use nevlab_core::divisor::Hypersurface;
use nevlab_core::{brotbek, radial, smtdef};
use num::bigint::BigInt;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes mirroring the CLI exit codes: 0 success, 1 parse, 2
/// hypothesis violation, 3 numeric non-convergence.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NevlabStatus {
    Ok = 0,
    ParseError = 1,
    HypothesisViolation = 2,
    NumericError = 3,
    NullArgument = 4,
    InternalError = 5,
}

/// Opaque handle to a holomorphic curve.
#[repr(C)]
pub struct NevlabCurve {
    _opaque: [u8; 0],
}

/// Opaque handle to a hypersurface.
#[repr(C)]
pub struct NevlabHypersurface {
    _opaque: [u8; 0],
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: AppError) -> NevlabStatus {
    set_error(err.message());
    match err.code() {
        2 => NevlabStatus::HypothesisViolation,
        3 => NevlabStatus::NumericError,
        1 => NevlabStatus::ParseError,
        _ => NevlabStatus::InternalError,
    }
}

fn guard<F: FnOnce() -> NevlabStatus>(f: F) -> NevlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            NevlabStatus::InternalError
        }
    }
}

unsafe fn cstr_arg<'a>(ptr: *const c_char) -> Result<&'a str, NevlabStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(NevlabStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        NevlabStatus::ParseError
    })
}

unsafe fn curve_arg<'a>(ptr: *const NevlabCurve) -> Result<&'a HoloCurve, NevlabStatus> {
    (ptr as *const HoloCurve).as_ref().ok_or_else(|| {
        set_error("null curve handle");
        NevlabStatus::NullArgument
    })
}

unsafe fn hyp_arg<'a>(ptr: *const NevlabHypersurface) -> Result<&'a Hypersurface, NevlabStatus> {
    (ptr as *const Hypersurface).as_ref().ok_or_else(|| {
        set_error("null hypersurface handle");
        NevlabStatus::NullArgument
    })
}

/// Message for the most recent failing call on this thread. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nevlab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parse a curve description `{n, R0, coords}` into a handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nevlab_curve_parse_json(
    json: *const c_char,
    out: *mut *mut NevlabCurve,
) -> NevlabStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return NevlabStatus::NullArgument;
        }
        let text = match cstr_arg(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match HoloCurve::from_json(text) {
            Ok(curve) => {
                *out = Box::into_raw(Box::new(curve)) as *mut NevlabCurve;
                NevlabStatus::Ok
            }
            Err(e) => status_of(e.into()),
        }
    })
}

/// Release a curve handle. Passing NULL is a no-op.
///
/// # Safety
/// `ptr` must come from [`nevlab_curve_parse_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nevlab_curve_free(ptr: *mut NevlabCurve) {
    if !ptr.is_null() {
        drop(Box::from_raw(ptr as *mut HoloCurve));
    }
}

/// Parse a hypersurface description `{n, d, terms}` into a handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nevlab_hypersurface_parse_json(
    json: *const c_char,
    out: *mut *mut NevlabHypersurface,
) -> NevlabStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return NevlabStatus::NullArgument;
        }
        let text = match cstr_arg(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Hypersurface::from_json(text) {
            Ok(h) => {
                *out = Box::into_raw(Box::new(h)) as *mut NevlabHypersurface;
                NevlabStatus::Ok
            }
            Err(e) => status_of(e.into()),
        }
    })
}

/// Release a hypersurface handle. Passing NULL is a no-op.
///
/// # Safety
/// `ptr` must come from [`nevlab_hypersurface_parse_json`].
#[no_mangle]
pub unsafe extern "C" fn nevlab_hypersurface_free(ptr: *mut NevlabHypersurface) {
    if !ptr.is_null() {
        drop(Box::from_raw(ptr as *mut Hypersurface));
    }
}

fn linear_grid_args(rmin: f64, rmax: f64, points: usize) -> Result<Vec<f64>, NevlabStatus> {
    radial::linear_grid(rmin, rmax, points).map_err(|e| status_of(e.into()))
}

/// Characteristic profile T_{f, O(twist)} on a linear grid; `out_values`
/// must hold `points` doubles.
///
/// # Safety
/// `curve` must be a live handle and `out_values` writable for `points`.
#[no_mangle]
pub unsafe extern "C" fn nevlab_characteristic(
    curve: *const NevlabCurve,
    twist: i64,
    rmin: f64,
    rmax: f64,
    points: usize,
    out_values: *mut f64,
) -> NevlabStatus {
    guard(|| {
        let f = match curve_arg(curve) {
            Ok(f) => f,
            Err(s) => return s,
        };
        if out_values.is_null() {
            set_error("null output buffer");
            return NevlabStatus::NullArgument;
        }
        let grid = match linear_grid_args(rmin, rmax, points) {
            Ok(g) => g,
            Err(s) => return s,
        };
        match radial::characteristic_t(f, twist, &grid, radial::QUAD_TOL_DEFAULT) {
            Ok(profile) => {
                std::ptr::copy_nonoverlapping(profile.values.as_ptr(), out_values, points);
                NevlabStatus::Ok
            }
            Err(e) => status_of(e.into()),
        }
    })
}

/// First Main Theorem residual profile; `out_values` must hold `points`
/// doubles.
///
/// # Safety
/// Handles must be live and `out_values` writable for `points`.
#[no_mangle]
pub unsafe extern "C" fn nevlab_fmt_residual(
    curve: *const NevlabCurve,
    divisor: *const NevlabHypersurface,
    rmin: f64,
    rmax: f64,
    points: usize,
    out_values: *mut f64,
) -> NevlabStatus {
    guard(|| {
        let f = match curve_arg(curve) {
            Ok(f) => f,
            Err(s) => return s,
        };
        let q = match hyp_arg(divisor) {
            Ok(q) => q,
            Err(s) => return s,
        };
        if out_values.is_null() {
            set_error("null output buffer");
            return NevlabStatus::NullArgument;
        }
        let grid = match linear_grid_args(rmin, rmax, points) {
            Ok(g) => g,
            Err(s) => return s,
        };
        match radial::fmt_residual(f, q, &grid, radial::QUAD_TOL_DEFAULT) {
            Ok(profile) => {
                std::ptr::copy_nonoverlapping(profile.values.as_ptr(), out_values, points);
                NevlabStatus::Ok
            }
            Err(e) => status_of(e.into()),
        }
    })
}

/// Defect liminf estimate (tail minimum of the defect ratio profile).
///
/// # Safety
/// Handles must be live and `out_liminf` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nevlab_defect_estimate(
    curve: *const NevlabCurve,
    divisor: *const NevlabHypersurface,
    a_twist: i64,
    mu0: u32,
    rmin: f64,
    rmax: f64,
    points: usize,
    out_liminf: *mut f64,
) -> NevlabStatus {
    guard(|| {
        let f = match curve_arg(curve) {
            Ok(f) => f,
            Err(s) => return s,
        };
        let q = match hyp_arg(divisor) {
            Ok(q) => q,
            Err(s) => return s,
        };
        if out_liminf.is_null() {
            set_error("null output pointer");
            return NevlabStatus::NullArgument;
        }
        let grid = match linear_grid_args(rmin, rmax, points) {
            Ok(g) => g,
            Err(s) => return s,
        };
        match smtdef::defect_estimate(f, q, a_twist, mu0, &grid, radial::QUAD_TOL_DEFAULT) {
            Ok(est) => {
                *out_liminf = est.liminf_estimate;
                NevlabStatus::Ok
            }
            Err(e) => status_of(e.into()),
        }
    })
}

/// Full exact degree-arithmetic report as a JSON string; `d` may be NULL
/// to skip the decomposition. Free the string with [`nevlab_string_free`].
///
/// # Safety
/// `d` is either NULL or a NUL-terminated decimal string; `out_json` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nevlab_degree_report_json(
    n: u32,
    c: u32,
    d: *const c_char,
    out_json: *mut *mut c_char,
) -> NevlabStatus {
    guard(|| {
        if out_json.is_null() {
            set_error("null output pointer");
            return NevlabStatus::NullArgument;
        }
        let d_val: Option<BigInt> = if d.is_null() {
            None
        } else {
            let text = match cstr_arg(d) {
                Ok(t) => t,
                Err(s) => return s,
            };
            match text.parse() {
                Ok(v) => Some(v),
                Err(_) => {
                    set_error("d is not a decimal integer");
                    return NevlabStatus::ParseError;
                }
            }
        };
        let zero = BigInt::from(0);
        let report = match brotbek::full_report(n, c, d_val.as_ref(), &zero, &zero) {
            Ok(r) => r,
            Err(e) => return status_of(e.into()),
        };
        let rendered = match report.to_json() {
            Ok(r) => r,
            Err(msg) => {
                set_error(&msg);
                return NevlabStatus::InternalError;
            }
        };
        match CString::new(rendered) {
            Ok(cs) => {
                *out_json = cs.into_raw();
                NevlabStatus::Ok
            }
            Err(_) => {
                set_error("JSON contained an interior NUL");
                NevlabStatus::InternalError
            }
        }
    })
}

/// Release a string returned by this library. Passing NULL is a no-op.
///
/// # Safety
/// `ptr` must come from a nevlab function returning an owned string.
#[no_mangle]
pub unsafe extern "C" fn nevlab_string_free(ptr: *mut c_char) {
    if !ptr.is_null() {
        drop(CString::from_raw(ptr));
    }
}

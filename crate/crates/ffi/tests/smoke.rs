//! Exercise the C ABI end to end from Rust: handles, buffers, status
//! codes, error messages, and owned strings.

use nevlab_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn parse_curve(json: &str) -> *mut NevlabCurve {
    let cjson = CString::new(json).unwrap();
    let mut handle: *mut NevlabCurve = ptr::null_mut();
    let status = unsafe { nevlab_curve_parse_json(cjson.as_ptr(), &mut handle) };
    assert_eq!(status, NevlabStatus::Ok);
    assert!(!handle.is_null());
    handle
}

fn parse_hyp(json: &str) -> *mut NevlabHypersurface {
    let cjson = CString::new(json).unwrap();
    let mut handle: *mut NevlabHypersurface = ptr::null_mut();
    let status = unsafe { nevlab_hypersurface_parse_json(cjson.as_ptr(), &mut handle) };
    assert_eq!(status, NevlabStatus::Ok);
    assert!(!handle.is_null());
    handle
}

#[test]
fn characteristic_through_the_abi() {
    let curve = parse_curve(r#"{"n": 1, "R0": "inf", "coords": ["1", "z"]}"#);
    let points = 16usize;
    let mut values = vec![0.0f64; points];
    let status = unsafe {
        nevlab_characteristic(curve, 1, 1.0, 10.0, points, values.as_mut_ptr())
    };
    assert_eq!(status, NevlabStatus::Ok);
    for (i, v) in values.iter().enumerate() {
        let r = 1.0 + 9.0 * i as f64 / (points - 1) as f64;
        let expect = 0.5 * (1.0 + r * r).ln();
        assert!((v - expect).abs() < 1e-8, "r = {r}: {v} vs {expect}");
    }
    unsafe { nevlab_curve_free(curve) };
}

#[test]
fn fmt_residual_through_the_abi() {
    let curve = parse_curve(r#"{"n": 1, "R0": "inf", "coords": ["1", "z^2 - 1"]}"#);
    let hyp = parse_hyp(r#"{"n": 1, "d": 1, "terms": ["x1"]}"#);
    let points = 12usize;
    let mut values = vec![0.0f64; points];
    let status = unsafe {
        nevlab_fmt_residual(curve, hyp, 2.0, 10.0, points, values.as_mut_ptr())
    };
    assert_eq!(status, NevlabStatus::Ok);
    for v in &values {
        assert!(v.abs() < 1e-5);
    }
    unsafe {
        nevlab_curve_free(curve);
        nevlab_hypersurface_free(hyp);
    }
}

#[test]
fn defect_estimate_through_the_abi() {
    let curve = parse_curve(r#"{"n": 1, "R0": "inf", "coords": ["1", "exp(z)"]}"#);
    let hyp = parse_hyp(r#"{"n": 1, "d": 1, "terms": ["x1"]}"#);
    let mut liminf = 0.0f64;
    let status = unsafe {
        nevlab_defect_estimate(curve, hyp, 1, 1, 2.0, 30.0, 24, &mut liminf)
    };
    assert_eq!(status, NevlabStatus::Ok);
    assert!((liminf - 1.0).abs() < 0.01, "liminf = {liminf}");
    unsafe {
        nevlab_curve_free(curve);
        nevlab_hypersurface_free(hyp);
    }
}

#[test]
fn degree_report_round_trips_as_json() {
    let d = CString::new("250000").unwrap();
    let mut json: *mut std::ffi::c_char = ptr::null_mut();
    let status = unsafe { nevlab_degree_report_json(2, 3, d.as_ptr(), &mut json) };
    assert_eq!(status, NevlabStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { nevlab_string_free(json) };
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["params"]["r0"], "19602");
    assert_eq!(value["decomposition"]["r"], "22724");
    assert_eq!(value["alpha"]["alpha_min"], "1");
}

#[test]
fn error_paths_set_status_and_message() {
    // parse failure
    let bad = CString::new("{not json").unwrap();
    let mut handle: *mut NevlabCurve = ptr::null_mut();
    let status = unsafe { nevlab_curve_parse_json(bad.as_ptr(), &mut handle) };
    assert_eq!(status, NevlabStatus::ParseError);
    let msg = unsafe { CStr::from_ptr(nevlab_last_error_message()) };
    assert!(!msg.to_bytes().is_empty());

    // null argument
    let status = unsafe { nevlab_curve_parse_json(ptr::null(), &mut handle) };
    assert_eq!(status, NevlabStatus::NullArgument);

    // hypothesis violation through the degree report
    let mut json: *mut std::ffi::c_char = ptr::null_mut();
    let status = unsafe { nevlab_degree_report_json(1, 3, ptr::null(), &mut json) };
    assert_eq!(status, NevlabStatus::HypothesisViolation);

    // below-threshold degree is a hypothesis violation, not a crash
    let d = CString::new("100").unwrap();
    let status = unsafe { nevlab_degree_report_json(2, 3, d.as_ptr(), &mut json) };
    assert_eq!(status, NevlabStatus::HypothesisViolation);
}

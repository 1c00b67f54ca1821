//! Drives the C entry points from Rust, including the error paths, and
//! checks the committed header against the exported surface.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use invrob_ffi::*;

fn builtin_json() -> CString {
    let text = invrob::specfile::builtin("bicriteria-normal").unwrap().to_json();
    CString::new(text).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(invrob_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn full_round_trip_through_the_interface() {
    let json = builtin_json();
    let mut problem: *mut InvrobProblem = ptr::null_mut();
    let st = invrob_problem_from_json(json.as_ptr(), 0.0, &mut problem);
    assert_eq!(st, InvrobStatus::Ok, "{}", last_error());
    assert!(!problem.is_null());

    let eps = [0.0f64, 5.0];
    assert_eq!(invrob_problem_set_eps(problem, eps.as_ptr(), 2), InvrobStatus::Ok);

    let mut result: *mut InvrobResult = ptr::null_mut();
    assert_eq!(invrob_solve(problem, &mut result), InvrobStatus::Ok, "{}", last_error());

    // the interface must reproduce the in-process solve bit for bit
    let direct = invrob::solve(
        &invrob::bicriteria::coverage_problem(0.0, 5.0, invrob::geometry::AxisBox::DEFAULT_MARGIN)
            .unwrap(),
        &invrob::SolverConfig::default(),
    )
    .unwrap();

    let v = invrob_result_value(result);
    assert_eq!(v, direct.v_star);
    assert!((v - 0.7503926636).abs() <= 1e-6, "v = {v}");

    // length query, then the real reads
    let mut need = 0usize;
    assert_eq!(
        invrob_result_decision(result, ptr::null_mut(), 0, &mut need),
        InvrobStatus::Ok
    );
    assert_eq!(need, 1);
    let mut x = [0.0f64; 1];
    assert_eq!(
        invrob_result_decision(result, x.as_mut_ptr(), 1, &mut need),
        InvrobStatus::Ok
    );
    assert_eq!(x[0], direct.x_star[0]);

    let mut d = [0.0f64; 2];
    assert_eq!(invrob_result_design(result, d.as_mut_ptr(), 2, &mut need), InvrobStatus::Ok);
    assert_eq!(need, 2);
    assert_eq!(d.to_vec(), direct.d_star.0);

    let mut text: *mut c_char = ptr::null_mut();
    assert_eq!(invrob_result_json(result, &mut text), InvrobStatus::Ok);
    let parsed: serde_json::Value =
        serde_json::from_str(unsafe { CStr::from_ptr(text) }.to_str().unwrap()).unwrap();
    assert_eq!(parsed["x_star"][0].as_f64().unwrap(), x[0]);
    invrob_string_free(text);

    invrob_result_free(result);
    invrob_problem_free(problem);
}

#[test]
fn undersized_buffers_report_the_required_length() {
    let json = builtin_json();
    let mut problem: *mut InvrobProblem = ptr::null_mut();
    assert_eq!(invrob_problem_from_json(json.as_ptr(), 0.0, &mut problem), InvrobStatus::Ok);
    let mut result: *mut InvrobResult = ptr::null_mut();
    assert_eq!(invrob_solve(problem, &mut result), InvrobStatus::Ok);

    let mut tiny = [0.0f64; 1];
    let mut need = 0usize;
    let st = invrob_result_design(result, tiny.as_mut_ptr(), 1, &mut need);
    assert_eq!(st, InvrobStatus::ErrInput);
    assert_eq!(need, 2);
    assert!(last_error().contains("2"), "message: {}", last_error());

    invrob_result_free(result);
    invrob_problem_free(problem);
}

#[test]
fn null_and_malformed_inputs_are_rejected() {
    let mut problem: *mut InvrobProblem = ptr::null_mut();
    assert_eq!(
        invrob_problem_from_json(ptr::null(), 0.0, &mut problem),
        InvrobStatus::ErrNull
    );
    let bad = CString::new("{ not json").unwrap();
    assert_eq!(
        invrob_problem_from_json(bad.as_ptr(), 0.0, &mut problem),
        InvrobStatus::ErrInput
    );
    assert!(!last_error().is_empty());
    assert!(problem.is_null(), "no handle on failure");

    assert_eq!(invrob_solve(ptr::null(), ptr::null_mut()), InvrobStatus::ErrNull);
    assert!(invrob_result_value(ptr::null()).is_nan());
    invrob_problem_free(ptr::null_mut());
    invrob_result_free(ptr::null_mut());
    invrob_string_free(ptr::null_mut());
}

#[test]
fn infeasible_instances_come_back_as_their_own_status() {
    let spec = serde_json::json!({
        "schema": 1,
        "decision": {"bounds": [[-3.0, 3.0]]},
        "scenario": {"bounds": [[-1.0, 1.0]], "nominal": [[0.0]]},
        "objectives": [{"expr": "x[0]^2", "curvature": "convex"}],
        "budget": {"f_star": [-1.0], "eps": [0.0]},
        "coverage": {"family": "interval"},
        "measure": {"kind": "volume"}
    });
    let json = CString::new(spec.to_string()).unwrap();
    let mut problem: *mut InvrobProblem = ptr::null_mut();
    assert_eq!(invrob_problem_from_json(json.as_ptr(), 0.0, &mut problem), InvrobStatus::Ok);
    let mut result: *mut InvrobResult = ptr::null_mut();
    assert_eq!(invrob_solve(problem, &mut result), InvrobStatus::ErrInfeasible);
    assert!(result.is_null());
    invrob_problem_free(problem);
}

#[test]
fn committed_header_covers_the_exported_surface() {
    let header = std::fs::read_to_string(
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/invrob.h"),
    )
    .expect("include/invrob.h is generated by the build");
    for symbol in [
        "InvrobStatus",
        "InvrobProblem",
        "InvrobResult",
        "invrob_last_error",
        "invrob_problem_from_json",
        "invrob_problem_set_eps",
        "invrob_solve",
        "invrob_result_value",
        "invrob_result_decision",
        "invrob_result_design",
        "invrob_result_json",
        "invrob_problem_free",
        "invrob_result_free",
        "invrob_string_free",
    ] {
        assert!(header.contains(symbol), "header is missing {symbol}");
    }
    assert!(header.contains("INVROB_H"), "include guard missing");
}

//! C interface for the invrob solver.
//!
//! Problems arrive as JSON in the library's file format, results leave as
//! JSON or through typed accessors. Handles are opaque; every entry point
//! catches panics and reports through integer statuses, with a per-thread
//! message behind invrob_last_error().

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use invrob::geometry::AxisBox;
use invrob::{solve, CoverageProblem, Error, SolveResult, SolverConfig, SpecFile};

/// Status of an interface call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InvrobStatus {
    /// The call succeeded.
    Ok = 0,
    /// The solver ran and failed to converge or to evaluate the model.
    ErrSolver = 1,
    /// The instance admits no feasible decision, or a checked point is
    /// infeasible.
    ErrInfeasible = 2,
    /// Malformed input: JSON, dimensions, budgets, or an undersized buffer.
    ErrInput = 3,
    /// A panic was caught at the boundary; state may be stale but memory is
    /// intact.
    ErrPanic = 4,
    /// A required pointer was null.
    ErrNull = 5,
}

/// Opaque handle for a loaded problem instance.
pub struct InvrobProblem {
    cp: CoverageProblem,
}

/// Opaque handle for a solve outcome.
pub struct InvrobResult {
    r: SolveResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(clean).unwrap_or_default();
    });
}

fn status_of(e: &Error) -> InvrobStatus {
    set_error(&e.to_string());
    match e.exit_code() {
        2 => InvrobStatus::ErrInfeasible,
        3 => InvrobStatus::ErrInput,
        _ => InvrobStatus::ErrSolver,
    }
}

fn guard(f: impl FnOnce() -> InvrobStatus) -> InvrobStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic caught at the interface boundary");
            InvrobStatus::ErrPanic
        }
    }
}

/// Message for the most recent failing call on this thread. The pointer
/// stays valid until the next failing call on the same thread. Never null;
/// empty before any failure.
#[no_mangle]
pub extern "C" fn invrob_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parses a problem file (JSON) into a solver instance. `margin` bounds any
/// unbounded scenario or decision coordinate; pass 0 or a negative value
/// for the built-in default. On success `*out` owns the instance; release
/// it with invrob_problem_free().
#[no_mangle]
pub extern "C" fn invrob_problem_from_json(
    json: *const c_char,
    margin: f64,
    out: *mut *mut InvrobProblem,
) -> InvrobStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            set_error("json and out must not be null");
            return InvrobStatus::ErrNull;
        }
        let text = match unsafe { CStr::from_ptr(json) }.to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("json is not valid utf-8");
                return InvrobStatus::ErrInput;
            }
        };
        let m = if margin > 0.0 { margin } else { AxisBox::DEFAULT_MARGIN };
        let spec = match SpecFile::from_str(text) {
            Ok(s) => s,
            Err(e) => return status_of(&e),
        };
        match spec.coverage_problem(m) {
            Ok(cp) => {
                unsafe { *out = Box::into_raw(Box::new(InvrobProblem { cp })) };
                InvrobStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Replaces the instance's budget vector with `eps[0..len]`.
#[no_mangle]
pub extern "C" fn invrob_problem_set_eps(
    problem: *mut InvrobProblem,
    eps: *const f64,
    len: usize,
) -> InvrobStatus {
    guard(|| {
        if problem.is_null() || (eps.is_null() && len > 0) {
            set_error("problem and eps must not be null");
            return InvrobStatus::ErrNull;
        }
        let slice = unsafe { std::slice::from_raw_parts(eps, len) };
        let p = unsafe { &mut *problem };
        match p.cp.with_eps(slice) {
            Ok(cp) => {
                p.cp = cp;
                InvrobStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Solves the instance with default settings. On success `*out` owns the
/// result; release it with invrob_result_free().
#[no_mangle]
pub extern "C" fn invrob_solve(
    problem: *const InvrobProblem,
    out: *mut *mut InvrobResult,
) -> InvrobStatus {
    guard(|| {
        if problem.is_null() || out.is_null() {
            set_error("problem and out must not be null");
            return InvrobStatus::ErrNull;
        }
        let p = unsafe { &*problem };
        match solve(&p.cp, &SolverConfig::default()) {
            Ok(r) => {
                unsafe { *out = Box::into_raw(Box::new(InvrobResult { r })) };
                InvrobStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Optimal coverage value of a result, or NaN for a null handle.
#[no_mangle]
pub extern "C" fn invrob_result_value(result: *const InvrobResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    unsafe { &*result }.r.v_star
}

fn copy_out(
    src: &[f64],
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> InvrobStatus {
    if !written.is_null() {
        unsafe { *written = src.len() };
    }
    if buf.is_null() {
        // length query
        return InvrobStatus::Ok;
    }
    if cap < src.len() {
        set_error(&format!("buffer holds {cap} values, {} required", src.len()));
        return InvrobStatus::ErrInput;
    }
    unsafe { std::ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len()) };
    InvrobStatus::Ok
}

/// Copies the optimal decision vector into `buf` (capacity `cap`). The
/// required length lands in `*written` when non-null; pass a null `buf` to
/// query the length alone.
#[no_mangle]
pub extern "C" fn invrob_result_decision(
    result: *const InvrobResult,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> InvrobStatus {
    guard(|| {
        if result.is_null() {
            set_error("result must not be null");
            return InvrobStatus::ErrNull;
        }
        copy_out(&unsafe { &*result }.r.x_star, buf, cap, written)
    })
}

/// Copies the optimal coverage-set coordinates into `buf`; same contract as
/// invrob_result_decision().
#[no_mangle]
pub extern "C" fn invrob_result_design(
    result: *const InvrobResult,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> InvrobStatus {
    guard(|| {
        if result.is_null() {
            set_error("result must not be null");
            return InvrobStatus::ErrNull;
        }
        copy_out(&unsafe { &*result }.r.d_star.0, buf, cap, written)
    })
}

/// Serializes the full result as JSON. On success `*out` owns the string;
/// release it with invrob_string_free().
#[no_mangle]
pub extern "C" fn invrob_result_json(
    result: *const InvrobResult,
    out: *mut *mut c_char,
) -> InvrobStatus {
    guard(|| {
        if result.is_null() || out.is_null() {
            set_error("result and out must not be null");
            return InvrobStatus::ErrNull;
        }
        let text = match serde_json::to_string(&unsafe { &*result }.r) {
            Ok(t) => t,
            Err(e) => {
                set_error(&e.to_string());
                return InvrobStatus::ErrSolver;
            }
        };
        match CString::new(text) {
            Ok(c) => {
                unsafe { *out = c.into_raw() };
                InvrobStatus::Ok
            }
            Err(_) => {
                set_error("result serialization produced an interior nul");
                InvrobStatus::ErrSolver
            }
        }
    })
}

/// Releases a problem handle. Null is a no-op.
#[no_mangle]
pub extern "C" fn invrob_problem_free(problem: *mut InvrobProblem) {
    if !problem.is_null() {
        drop(unsafe { Box::from_raw(problem) });
    }
}

/// Releases a result handle. Null is a no-op.
#[no_mangle]
pub extern "C" fn invrob_result_free(result: *mut InvrobResult) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}

/// Releases a string returned by invrob_result_json(). Null is a no-op.
#[no_mangle]
pub extern "C" fn invrob_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

//! C ABI over `mga-core`.
//!
//! Handles are opaque and owned by the caller, who must release them with the
//! matching `*_free` function. Every fallible call returns an [`MgaStatus`];
//! on failure [`mga_last_error_message`] describes the error. Panics never
//! cross the boundary and are reported as `MGA_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mga_core::config::{ConfigError, LoadedConfig};
use mga_core::ephem::solve_kepler;
use mga_core::legs::{evaluate_plan, PlanOutcome};
use mga_core::planner::coding::validate;
use mga_core::planner::{decode, search, SearchResult};
use mga_core::problem::Problem;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Config = 4,
    /// The plan or search produced no feasible trajectory.
    Infeasible = 5,
    OutOfRange = 6,
    Numerical = 7,
    Panic = 8,
}

/// A loaded case study.
pub struct MgaProblem {
    config: LoadedConfig,
    problem: Problem,
}

/// Outcome of one plan evaluation.
pub struct MgaEvaluation {
    outcome: PlanOutcome,
}

/// Result of one seeded search.
pub struct MgaSearchResult {
    result: SearchResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn fail(status: MgaStatus, msg: impl Into<String>) -> MgaStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning a panic into `MGA_STATUS_PANIC`.
fn guard(f: impl FnOnce() -> MgaStatus) -> MgaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == MgaStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => fail(MgaStatus::Panic, "internal panic"),
    }
}

fn config_status(e: &ConfigError) -> MgaStatus {
    if e.is_io() {
        MgaStatus::Io
    } else {
        MgaStatus::Config
    }
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library from the
/// same thread.
#[no_mangle]
pub extern "C" fn mga_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Eccentric anomaly for mean anomaly `mean_anomaly` and eccentricity `e`.
///
/// # Safety
/// `out` must be null or point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn mga_solve_kepler(mean_anomaly: f64, e: f64, out: *mut f64) -> MgaStatus {
    guard(|| {
        if out.is_null() {
            return fail(MgaStatus::NullPointer, "out is null");
        }
        if !(0.0..1.0).contains(&e) || !mean_anomaly.is_finite() {
            return fail(MgaStatus::InvalidArgument, "need finite mean anomaly and 0 <= e < 1");
        }
        match solve_kepler(mean_anomaly, e) {
            Ok(ecc) => {
                *out = ecc;
                MgaStatus::Ok
            }
            Err(err) => fail(MgaStatus::Numerical, err.to_string()),
        }
    })
}

/// Loads a case-study config (and the catalog it names).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must point to writable
/// memory for one pointer. On success `*out` owns a handle for
/// [`mga_problem_free`].
#[no_mangle]
pub unsafe extern "C" fn mga_problem_load(path: *const c_char, out: *mut *mut MgaProblem) -> MgaStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return fail(MgaStatus::NullPointer, "path or out is null");
        }
        *out = ptr::null_mut();
        let Ok(path) = CStr::from_ptr(path).to_str() else {
            return fail(MgaStatus::InvalidArgument, "path is not UTF-8");
        };
        let config = match LoadedConfig::load(path) {
            Ok(c) => c,
            Err(e) => return fail(config_status(&e), e.to_string()),
        };
        let problem = match config.problem() {
            Ok(p) => p,
            Err(e) => return fail(config_status(&e), e.to_string()),
        };
        *out = Box::into_raw(Box::new(MgaProblem { config, problem }));
        MgaStatus::Ok
    })
}

/// # Safety
/// `problem` must be null or a handle from [`mga_problem_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mga_problem_free(problem: *mut MgaProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Number of legs; 0 for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mga_problem_n_legs(problem: *const MgaProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.problem.n_legs())
}

/// Evaluates the plan coded by `s[0..len]` (1-based interleaved entries).
///
/// # Safety
/// `problem` must be a live handle, `s` must point to `len` readable values
/// and `out` to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn mga_evaluate(
    problem: *const MgaProblem,
    s: *const u32,
    len: usize,
    out: *mut *mut MgaEvaluation,
) -> MgaStatus {
    guard(|| {
        let (Some(p), false, false) = (problem.as_ref(), s.is_null(), out.is_null()) else {
            return fail(MgaStatus::NullPointer, "problem, s or out is null");
        };
        *out = ptr::null_mut();
        let s = std::slice::from_raw_parts(s, len);
        if let Err(e) = validate(&p.problem, s) {
            return fail(MgaStatus::InvalidArgument, e.to_string());
        }
        let plan = match decode(&p.problem, s) {
            Ok(plan) => plan,
            Err(e) => return fail(MgaStatus::InvalidArgument, e.to_string()),
        };
        let outcome = evaluate_plan(&p.problem, &plan);
        *out = Box::into_raw(Box::new(MgaEvaluation { outcome }));
        MgaStatus::Ok
    })
}

/// # Safety
/// `evaluation` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mga_evaluation_free(evaluation: *mut MgaEvaluation) {
    if !evaluation.is_null() {
        drop(Box::from_raw(evaluation));
    }
}

/// 1 when the plan has at least one trajectory, else 0 (also for null).
///
/// # Safety
/// `evaluation` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mga_evaluation_is_feasible(evaluation: *const MgaEvaluation) -> i32 {
    evaluation
        .as_ref()
        .map_or(0, |e| i32::from(matches!(e.outcome, PlanOutcome::Feasible { .. })))
}

/// Objective of the best trajectory.
///
/// # Safety
/// `evaluation` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mga_evaluation_f_obj(evaluation: *const MgaEvaluation, out: *mut f64) -> MgaStatus {
    best_field(evaluation, out, |r| r.f_obj)
}

/// Arrival excess speed of the best trajectory, km/s.
///
/// # Safety
/// `evaluation` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mga_evaluation_v_inf(evaluation: *const MgaEvaluation, out: *mut f64) -> MgaStatus {
    best_field(evaluation, out, |r| r.v_inf_arrival)
}

unsafe fn best_field(
    evaluation: *const MgaEvaluation,
    out: *mut f64,
    get: impl FnOnce(&mga_core::legs::TrajectoryRecord) -> f64,
) -> MgaStatus {
    guard(|| {
        let (Some(e), false) = (evaluation.as_ref(), out.is_null()) else {
            return fail(MgaStatus::NullPointer, "evaluation or out is null");
        };
        match e.outcome.best() {
            Some(r) => {
                *out = get(r);
                MgaStatus::Ok
            }
            None => fail(MgaStatus::Infeasible, "plan is infeasible"),
        }
    })
}

/// 1-based leg at which an infeasible plan died.
///
/// # Safety
/// `evaluation` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mga_evaluation_failed_leg(evaluation: *const MgaEvaluation, out: *mut usize) -> MgaStatus {
    guard(|| {
        let (Some(e), false) = (evaluation.as_ref(), out.is_null()) else {
            return fail(MgaStatus::NullPointer, "evaluation or out is null");
        };
        match e.outcome {
            PlanOutcome::Infeasible { l_u } => {
                *out = l_u;
                MgaStatus::Ok
            }
            PlanOutcome::Feasible { .. } => fail(MgaStatus::InvalidArgument, "plan is feasible"),
        }
    })
}

/// Number of trajectories in the plan's tree; 0 when infeasible or null.
///
/// # Safety
/// `evaluation` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mga_evaluation_n_trajectories(evaluation: *const MgaEvaluation) -> usize {
    match evaluation.as_ref().map(|e| &e.outcome) {
        Some(PlanOutcome::Feasible { records, .. }) => records.len(),
        _ => 0,
    }
}

/// Copies the leg durations (days) of the best trajectory into `buf`.
/// `*n_legs` receives the leg count; `MGA_STATUS_OUT_OF_RANGE` when `cap`
/// is smaller, in which case nothing is copied.
///
/// # Safety
/// `buf` must have room for `cap` doubles; `evaluation` and `n_legs` must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn mga_evaluation_leg_times(
    evaluation: *const MgaEvaluation,
    buf: *mut f64,
    cap: usize,
    n_legs: *mut usize,
) -> MgaStatus {
    guard(|| {
        let (Some(e), false) = (evaluation.as_ref(), n_legs.is_null()) else {
            return fail(MgaStatus::NullPointer, "evaluation or n_legs is null");
        };
        let Some(r) = e.outcome.best() else {
            return fail(MgaStatus::Infeasible, "plan is infeasible");
        };
        *n_legs = r.leg_times.len();
        copy_out(&r.leg_times, buf, cap)
    })
}

unsafe fn copy_out<T: Copy>(src: &[T], buf: *mut T, cap: usize) -> MgaStatus {
    if cap < src.len() {
        return fail(MgaStatus::OutOfRange, format!("buffer holds {cap}, need {}", src.len()));
    }
    if buf.is_null() && !src.is_empty() {
        return fail(MgaStatus::NullPointer, "buffer is null");
    }
    if !src.is_empty() {
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    }
    MgaStatus::Ok
}

/// Runs one search with the config's settings. `seed` replaces the config
/// seed; `max_evals` replaces the budget unless it is 0.
///
/// # Safety
/// `problem` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mga_search(
    problem: *const MgaProblem,
    seed: u64,
    max_evals: usize,
    out: *mut *mut MgaSearchResult,
) -> MgaStatus {
    guard(|| {
        let (Some(p), false) = (problem.as_ref(), out.is_null()) else {
            return fail(MgaStatus::NullPointer, "problem or out is null");
        };
        *out = ptr::null_mut();
        let mut sc = p.config.config.search.clone();
        sc.seed = seed;
        if max_evals > 0 {
            sc.max_evals = max_evals;
        }
        let result = search(&p.problem, &sc);
        *out = Box::into_raw(Box::new(MgaSearchResult { result }));
        MgaStatus::Ok
    })
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mga_search_free(result: *mut MgaSearchResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Evaluations spent; 0 for null.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mga_search_n_eval(result: *const MgaSearchResult) -> usize {
    result.as_ref().map_or(0, |r| r.result.stats.n_eval)
}

/// Feasible solutions found; 0 for null.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mga_search_n_feasible(result: *const MgaSearchResult) -> usize {
    result.as_ref().map_or(0, |r| r.result.feasible.len())
}

/// Entry `index` of the feasible list (0 is the best): its objective and
/// solution vector. `*len` receives the vector length; `MGA_STATUS_OUT_OF_RANGE`
/// when `index` is past the end or `cap` is too small.
///
/// # Safety
/// `s_buf` must have room for `cap` values; the other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn mga_search_entry(
    result: *const MgaSearchResult,
    index: usize,
    f_obj: *mut f64,
    s_buf: *mut u32,
    cap: usize,
    len: *mut usize,
) -> MgaStatus {
    guard(|| {
        let (Some(r), false, false) = (result.as_ref(), f_obj.is_null(), len.is_null()) else {
            return fail(MgaStatus::NullPointer, "result, f_obj or len is null");
        };
        let Some(e) = r.result.feasible.get(index) else {
            return fail(MgaStatus::OutOfRange, format!("no entry {index}"));
        };
        *len = e.s.len();
        let status = copy_out(&e.s, s_buf, cap);
        if status == MgaStatus::Ok {
            *f_obj = e.f_obj;
        }
        status
    })
}

/// Writes the sequence label of entry `index` (e.g. `EVVEJS`) as a
/// NUL-terminated string into `buf` of `cap` bytes.
///
/// # Safety
/// `buf` must have room for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn mga_search_entry_sequence(
    result: *const MgaSearchResult,
    index: usize,
    buf: *mut c_char,
    cap: usize,
) -> MgaStatus {
    guard(|| {
        let (Some(r), false) = (result.as_ref(), buf.is_null()) else {
            return fail(MgaStatus::NullPointer, "result or buf is null");
        };
        let Some(e) = r.result.feasible.get(index) else {
            return fail(MgaStatus::OutOfRange, format!("no entry {index}"));
        };
        let bytes = e.sequence.as_bytes();
        if cap < bytes.len() + 1 {
            return fail(MgaStatus::OutOfRange, format!("need {} bytes", bytes.len() + 1));
        }
        ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, bytes.len());
        *buf.add(bytes.len()) = 0;
        MgaStatus::Ok
    })
}

//! C ABI over the xtfc solver.
//!
//! Configurations and reports are opaque heap handles owned by the caller and
//! released with their `*_free` function. Every fallible call returns an
//! [`XtfcStatus`]; on failure the message is available from
//! [`xtfc_last_error`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use xtfc::{run_once, ActivationKind, ProblemId, RunConfig, RunReport, WeightRange, XtfcError};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XtfcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownProblem = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

/// Opaque run configuration.
pub struct XtfcConfig(RunConfig);

/// Opaque run report.
pub struct XtfcReport(RunReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &XtfcError) -> XtfcStatus {
    match err {
        XtfcError::UnknownProblem(_) => XtfcStatus::UnknownProblem,
        XtfcError::Io(_) => XtfcStatus::Io,
        XtfcError::NonFinite(_) | XtfcError::SvdNoConvergence | XtfcError::ConstraintDegeneracy { .. } => {
            XtfcStatus::Numerical
        }
        _ => XtfcStatus::InvalidArgument,
    }
}

fn fail(status: XtfcStatus, msg: impl Into<String>) -> XtfcStatus {
    set_error(msg);
    status
}

/// Runs `f`, mapping library errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), XtfcStatus>) -> XtfcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => XtfcStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(XtfcStatus::Panic, "internal panic"),
    }
}

fn lib_err(err: XtfcError) -> XtfcStatus {
    fail(status_of(&err), err.to_string())
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, XtfcStatus> {
    if s.is_null() {
        return Err(fail(XtfcStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(XtfcStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn config_mut<'a>(cfg: *mut XtfcConfig) -> Result<&'a mut RunConfig, XtfcStatus> {
    cfg.as_mut()
        .map(|c| &mut c.0)
        .ok_or_else(|| fail(XtfcStatus::NullPointer, "config is null"))
}

unsafe fn report_ref<'a>(report: *const XtfcReport) -> Result<&'a RunReport, XtfcStatus> {
    report
        .as_ref()
        .map(|r| &r.0)
        .ok_or_else(|| fail(XtfcStatus::NullPointer, "report is null"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), XtfcStatus> {
    if out.is_null() {
        return Err(fail(XtfcStatus::NullPointer, "output pointer is null"));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn xtfc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn xtfc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a configuration holding the default hyperparameters of `problem`
/// (e.g. `"pde1"`) with the given seed.
///
/// # Safety
/// `problem` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn xtfc_config_new(problem: *const c_char, seed: u64, out: *mut *mut XtfcConfig) -> XtfcStatus {
    guard(|| {
        let id: ProblemId = read_str(problem, "problem")?.parse().map_err(lib_err)?;
        let handle = Box::into_raw(Box::new(XtfcConfig(RunConfig::defaults(id, seed))));
        write_out(out, handle).inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// Releases a configuration. Null is ignored.
///
/// # Safety
/// `cfg` must come from [`xtfc_config_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xtfc_config_free(cfg: *mut XtfcConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// # Safety
/// `cfg` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn xtfc_config_set_neurons(cfg: *mut XtfcConfig, neurons: usize) -> XtfcStatus {
    guard(|| {
        if neurons == 0 {
            return Err(fail(XtfcStatus::InvalidArgument, "neurons must be positive"));
        }
        config_mut(cfg)?.neurons = neurons;
        Ok(())
    })
}

/// Sets the per-axis training point counts; `len` must equal the problem dimension.
///
/// # Safety
/// `cfg` must be a live configuration handle and `counts` point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn xtfc_config_set_points(cfg: *mut XtfcConfig, counts: *const usize, len: usize) -> XtfcStatus {
    guard(|| {
        let cfg = config_mut(cfg)?;
        if counts.is_null() {
            return Err(fail(XtfcStatus::NullPointer, "counts is null"));
        }
        let dim = cfg.problem.definition().dim();
        if len != dim {
            return Err(fail(
                XtfcStatus::InvalidArgument,
                format!("expected {dim} point counts, got {len}"),
            ));
        }
        let counts = std::slice::from_raw_parts(counts, len);
        if counts.iter().any(|&c| c < 2) {
            return Err(fail(XtfcStatus::InvalidArgument, "each axis needs at least 2 points"));
        }
        cfg.points = counts.to_vec();
        Ok(())
    })
}

/// Sets the activation by name: `logistic`, `tanh`, `sin` or `gaussian`.
///
/// # Safety
/// `cfg` must be a live configuration handle and `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn xtfc_config_set_activation(cfg: *mut XtfcConfig, name: *const c_char) -> XtfcStatus {
    guard(|| {
        let kind: ActivationKind = read_str(name, "activation")?.parse().map_err(lib_err)?;
        config_mut(cfg)?.activation = kind;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn xtfc_config_set_weight_range(cfg: *mut XtfcConfig, lo: f64, hi: f64) -> XtfcStatus {
    guard(|| {
        let range = WeightRange::new(lo, hi).map_err(lib_err)?;
        config_mut(cfg)?.weight_range = range;
        Ok(())
    })
}

/// Sets the Gauss-Newton stopping tolerance and iteration cap.
///
/// # Safety
/// `cfg` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn xtfc_config_set_solver(cfg: *mut XtfcConfig, tol: f64, max_iter: usize) -> XtfcStatus {
    guard(|| {
        if !(tol.is_finite() && tol > 0.0) || max_iter == 0 {
            return Err(fail(
                XtfcStatus::InvalidArgument,
                "tol must be positive and max_iter at least 1",
            ));
        }
        let cfg = config_mut(cfg)?;
        cfg.solve.tol = tol;
        cfg.solve.max_iter = max_iter;
        Ok(())
    })
}

/// Runs the solver. A run that stops without converging still succeeds;
/// check [`xtfc_report_converged`].
///
/// # Safety
/// `cfg` must be a live configuration handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn xtfc_run(cfg: *const XtfcConfig, out: *mut *mut XtfcReport) -> XtfcStatus {
    guard(|| {
        let cfg = cfg
            .as_ref()
            .ok_or_else(|| fail(XtfcStatus::NullPointer, "config is null"))?;
        if out.is_null() {
            return Err(fail(XtfcStatus::NullPointer, "output pointer is null"));
        }
        let report = run_once(&cfg.0).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(XtfcReport(report))))
    })
}

/// Releases a report. Null is ignored.
///
/// # Safety
/// `report` must come from [`xtfc_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xtfc_report_free(report: *mut XtfcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Maximum absolute error against the exact solution on the test grid.
///
/// # Safety
/// `report` must be a live report handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn xtfc_report_test_max_error(report: *const XtfcReport, out: *mut f64) -> XtfcStatus {
    guard(|| write_out(out, report_ref(report)?.test_max_error))
}

/// Mean absolute error against the exact solution on the test grid.
///
/// # Safety
/// `report` must be a live report handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn xtfc_report_test_mean_error(report: *const XtfcReport, out: *mut f64) -> XtfcStatus {
    guard(|| write_out(out, report_ref(report)?.test_mean_error))
}

/// Maximum absolute error on the training points.
///
/// # Safety
/// `report` must be a live report handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn xtfc_report_train_max_error(report: *const XtfcReport, out: *mut f64) -> XtfcStatus {
    guard(|| write_out(out, report_ref(report)?.train_max_error))
}

/// # Safety
/// `report` must be a live report handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn xtfc_report_iterations(report: *const XtfcReport, out: *mut usize) -> XtfcStatus {
    guard(|| write_out(out, report_ref(report)?.iterations))
}

/// # Safety
/// `report` must be a live report handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn xtfc_report_converged(report: *const XtfcReport, out: *mut bool) -> XtfcStatus {
    guard(|| write_out(out, report_ref(report)?.converged))
}

/// # Safety
/// `report` must be a live report handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn xtfc_report_solve_time(report: *const XtfcReport, out: *mut f64) -> XtfcStatus {
    guard(|| write_out(out, report_ref(report)?.solve_time_s))
}

/// The full report as a JSON string, released with [`xtfc_string_free`].
///
/// # Safety
/// `report` must be a live report handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn xtfc_report_json(report: *const XtfcReport, out: *mut *mut c_char) -> XtfcStatus {
    guard(|| {
        let json =
            serde_json::to_string(report_ref(report)?).map_err(|e| fail(XtfcStatus::InvalidArgument, e.to_string()))?;
        let s = CString::new(json).map_err(|e| fail(XtfcStatus::InvalidArgument, e.to_string()))?;
        write_out(out, s.into_raw())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xtfc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

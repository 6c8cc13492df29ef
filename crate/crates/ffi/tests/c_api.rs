use std::ffi::{CStr, CString};
use std::ptr;

use xtfc_ffi::*;

fn last_error() -> String {
    let p = xtfc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn config(problem: &str, seed: u64) -> *mut XtfcConfig {
    let name = CString::new(problem).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(
        unsafe { xtfc_config_new(name.as_ptr(), seed, &mut cfg) },
        XtfcStatus::Ok
    );
    assert!(!cfg.is_null());
    cfg
}

#[test]
fn run_reports_accurate_solution() {
    unsafe {
        let cfg = config("pde1", 0);
        assert_eq!(xtfc_config_set_neurons(cfg, 60), XtfcStatus::Ok);
        assert_eq!(xtfc_config_set_points(cfg, [15usize, 15].as_ptr(), 2), XtfcStatus::Ok);
        let act = CString::new("tanh").unwrap();
        assert_eq!(xtfc_config_set_activation(cfg, act.as_ptr()), XtfcStatus::Ok);
        assert_eq!(xtfc_config_set_weight_range(cfg, -1.0, 1.0), XtfcStatus::Ok);

        let mut report = ptr::null_mut();
        assert_eq!(xtfc_run(cfg, &mut report), XtfcStatus::Ok);
        let mut err = f64::NAN;
        assert_eq!(xtfc_report_test_max_error(report, &mut err), XtfcStatus::Ok);
        assert!(err < 1e-6, "{err:e}");
        let mut converged = false;
        assert_eq!(xtfc_report_converged(report, &mut converged), XtfcStatus::Ok);
        assert!(converged);
        let mut iters = 0usize;
        assert_eq!(xtfc_report_iterations(report, &mut iters), XtfcStatus::Ok);
        assert_eq!(iters, 1);

        let mut json = ptr::null_mut();
        assert_eq!(xtfc_report_json(report, &mut json), XtfcStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        xtfc_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["problem"], "pde1");
        assert_eq!(v["neurons"], 60);
        assert_eq!(v["test_max_error"].as_f64().unwrap(), err);

        xtfc_report_free(report);
        xtfc_config_free(cfg);
    }
}

#[test]
fn matches_library_run() {
    unsafe {
        let cfg = config("ode1", 5);
        let mut report = ptr::null_mut();
        assert_eq!(xtfc_run(cfg, &mut report), XtfcStatus::Ok);
        let mut err = 0.0;
        xtfc_report_test_max_error(report, &mut err);
        let direct = xtfc::run_once(&xtfc::RunConfig::defaults(xtfc::ProblemId::Ode1, 5)).unwrap();
        assert_eq!(err.to_bits(), direct.test_max_error.to_bits());
        xtfc_report_free(report);
        xtfc_config_free(cfg);
    }
}

#[test]
fn non_convergence_is_reported_not_failed() {
    unsafe {
        let cfg = config("pde6", 0);
        xtfc_config_set_neurons(cfg, 40);
        xtfc_config_set_points(cfg, [4usize, 4, 4].as_ptr(), 3);
        assert_eq!(xtfc_config_set_solver(cfg, 1e-12, 1), XtfcStatus::Ok);
        let mut report = ptr::null_mut();
        assert_eq!(xtfc_run(cfg, &mut report), XtfcStatus::Ok);
        let mut converged = true;
        xtfc_report_converged(report, &mut converged);
        assert!(!converged);
        xtfc_report_free(report);
        xtfc_config_free(cfg);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let bad = CString::new("pde9").unwrap();
        let mut cfg = ptr::null_mut();
        assert_eq!(xtfc_config_new(bad.as_ptr(), 0, &mut cfg), XtfcStatus::UnknownProblem);
        assert!(cfg.is_null());
        assert!(last_error().contains("pde9"));

        assert_eq!(xtfc_config_new(ptr::null(), 0, &mut cfg), XtfcStatus::NullPointer);
        assert_eq!(xtfc_config_set_neurons(ptr::null_mut(), 10), XtfcStatus::NullPointer);
        assert!(last_error().contains("config"));

        let cfg = config("pde1", 0);
        assert_eq!(
            xtfc_config_set_points(cfg, [5usize].as_ptr(), 1),
            XtfcStatus::InvalidArgument
        );
        assert!(last_error().contains("expected 2"));
        assert_eq!(
            xtfc_config_set_weight_range(cfg, 1.0, -1.0),
            XtfcStatus::InvalidArgument
        );
        assert_eq!(xtfc_config_set_neurons(cfg, 0), XtfcStatus::InvalidArgument);
        assert_eq!(xtfc_config_set_solver(cfg, -1.0, 5), XtfcStatus::InvalidArgument);
        let act = CString::new("relu6").unwrap();
        assert_eq!(
            xtfc_config_set_activation(cfg, act.as_ptr()),
            XtfcStatus::InvalidArgument
        );
        assert_eq!(xtfc_run(cfg, ptr::null_mut()), XtfcStatus::NullPointer);

        let mut v = 0.0;
        assert_eq!(xtfc_report_test_max_error(ptr::null(), &mut v), XtfcStatus::NullPointer);
        xtfc_config_free(cfg);
        xtfc_config_free(ptr::null_mut());
        xtfc_report_free(ptr::null_mut());
        xtfc_string_free(ptr::null_mut());
    }
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(xtfc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let header = include_str!("../include/xtfc.h");
    for name in [
        "XtfcStatus",
        "XTFC_STATUS_OK",
        "typedef struct XtfcConfig XtfcConfig",
        "xtfc_config_new",
        "xtfc_config_set_points",
        "xtfc_run",
        "xtfc_report_json",
        "xtfc_last_error",
        "xtfc_string_free",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

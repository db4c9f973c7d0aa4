use std::ffi::{CStr, CString};
use std::ptr;

use qmetro::io::{to_json_string, ModelFile, PovmFile};
use qmetro::quasipure::{two_qubit_example, two_qubit_lmcc_povm};
use qmetro_ffi::*;

fn two_qubit_json() -> CString {
    let file = ModelFile::from_quasipure(&two_qubit_example(0.3, 1.0), None);
    CString::new(to_json_string(&file).unwrap()).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    qm_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = qm_last_error_message();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_str().unwrap().to_string()
}

#[test]
fn model_lifecycle_and_qfim() {
    unsafe {
        let json = two_qubit_json();
        let mut m = ptr::null_mut();
        assert_eq!(qm_model_from_json(json.as_ptr(), ptr::null(), &mut m), QmStatus::Ok);
        assert!(qm_last_error_message().is_null());
        assert_eq!(qm_model_dim(m), 8);
        assert_eq!(qm_model_num_params(m), 2);
        let mut buf = [0.0f64; 4];
        assert_eq!(qm_model_qfim(m, buf.as_mut_ptr(), 3), QmStatus::BufferTooSmall);
        assert_eq!(qm_model_qfim(m, buf.as_mut_ptr(), 4), QmStatus::Ok);
        let expected = 4.0 * 0.3 + 4.0 * 0.7 * 1.0f64.sin().powi(2);
        assert!((buf[0] - expected).abs() < 1e-12);
        assert!((buf[3] - 4.0).abs() < 1e-12);
        assert!(buf[1].abs() < 1e-12);
        qm_model_free(m);
    }
}

#[test]
fn analyze_construct_verify() {
    unsafe {
        let json = two_qubit_json();
        let mut m = ptr::null_mut();
        assert_eq!(qm_model_from_json(json.as_ptr(), ptr::null(), &mut m), QmStatus::Ok);

        let mut out = ptr::null_mut();
        assert_eq!(qm_model_analyze(m, &mut out), QmStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(report["pcc"]["holds"], true);

        assert_eq!(qm_model_construct(m, 3, &mut out), QmStatus::Ok);
        let first = take(out);
        assert_eq!(qm_model_construct(m, 3, &mut out), QmStatus::Ok);
        assert_eq!(first, take(out));

        let povm = CString::new(to_json_string(&PovmFile::from_povm(&two_qubit_lmcc_povm(1.0))).unwrap()).unwrap();
        assert_eq!(qm_model_verify(m, povm.as_ptr(), &mut out), QmStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(report["verdict"], "Saturating");
        qm_model_free(m);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(qm_model_from_json(ptr::null(), ptr::null(), &mut m), QmStatus::NullPointer);
        assert!(m.is_null());

        let bad = CString::new("{\"rho\": 3}").unwrap();
        assert_eq!(qm_model_from_json(bad.as_ptr(), ptr::null(), &mut m), QmStatus::Schema);
        assert!(!last_error().is_empty());

        let not_psd = CString::new(
            r#"{"rho": [[2,0],[0,0],[0,0],[-1,0]], "drho": [[[0,0],[0,0],[0,0],[0,0]]]}"#,
        )
        .unwrap();
        assert_eq!(qm_model_from_json(not_psd.as_ptr(), ptr::null(), &mut m), QmStatus::Numeric);

        let json = two_qubit_json();
        assert_eq!(qm_model_from_json(json.as_ptr(), ptr::null(), &mut m), QmStatus::Ok);
        let incomplete = CString::new(r#"{"vectors": [[[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]]}"#).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(qm_model_verify(m, incomplete.as_ptr(), &mut out), QmStatus::IncompletePovm);
        assert!(out.is_null());
        assert_eq!(qm_model_verify(ptr::null(), incomplete.as_ptr(), &mut out), QmStatus::NullPointer);
        qm_model_free(m);
        qm_model_free(ptr::null_mut());
        qm_string_free(ptr::null_mut());
    }
}

#[test]
fn config_overrides_tolerances() {
    unsafe {
        let json = two_qubit_json();
        let cfg = CString::new(r#"{"seed": 9, "tolerances": {"sat": 1e-7}}"#).unwrap();
        let mut m = ptr::null_mut();
        assert_eq!(qm_model_from_json(json.as_ptr(), cfg.as_ptr(), &mut m), QmStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(qm_model_analyze(m, &mut out), QmStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(report["config"]["seed"], 9);
        assert_eq!(report["config"]["tolerances"]["sat"], 1e-7);
        qm_model_free(m);

        let unknown = CString::new(r#"{"bogus": 1}"#).unwrap();
        assert_eq!(qm_model_from_json(json.as_ptr(), unknown.as_ptr(), &mut m), QmStatus::Schema);
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(qm_version()) };
    assert_eq!(v.to_str().unwrap(), qmetro::report::VERSION);
}

#[test]
fn header_declares_entry_points() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/qmetro.h")).unwrap();
    for name in [
        "qm_model_from_json",
        "qm_model_free",
        "qm_model_qfim",
        "qm_model_construct",
        "qm_model_verify",
        "qm_last_error_message",
        "QM_STATUS_INFEASIBLE",
        "typedef struct QmModel QmModel",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

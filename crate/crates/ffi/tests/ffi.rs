use std::ffi::{CStr, CString};
use std::ptr;

use chainskip_ffi::*;

fn last_error() -> String {
    let p = cs_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn ba(n: usize, m: usize, seed: u64) -> *mut CsModel {
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { cs_model_generate_ba(n, m, seed, true, &mut model) }, CsStatus::Ok);
    model
}

#[test]
fn model_round_trips_through_json() {
    let model = ba(12, 2, 5);
    assert_eq!(unsafe { cs_model_num_variables(model) }, 12);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { cs_model_to_json(model, &mut json) }, CsStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { cs_model_from_json(json, &mut back) }, CsStatus::Ok);

    let spins = [1i8, -1, 1, 1, -1, -1, 1, -1, 1, 1, -1, 1];
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        assert_eq!(cs_model_energy(model, spins.as_ptr(), spins.len(), &mut a), CsStatus::Ok);
        assert_eq!(cs_model_energy(back, spins.as_ptr(), spins.len(), &mut b), CsStatus::Ok);
        cs_string_free(json);
        cs_model_free(back);
        cs_model_free(model);
    }
    assert_eq!(a, b);
}

#[test]
fn ground_state_energy_matches_evaluation() {
    let model = ba(10, 3, 2);
    let mut ids = [0u32; 10];
    let mut spins = [0i8; 10];
    let (mut ground, mut check) = (0.0, 0.0);
    unsafe {
        assert_eq!(cs_model_variables(model, ids.as_mut_ptr(), ids.len()), CsStatus::Ok);
        assert_eq!(cs_model_ground_state(model, spins.as_mut_ptr(), spins.len(), &mut ground), CsStatus::Ok);
        assert_eq!(cs_model_energy(model, spins.as_ptr(), spins.len(), &mut check), CsStatus::Ok);
        cs_model_free(model);
    }
    assert_eq!(ids.to_vec(), (0..10).collect::<Vec<u32>>());
    assert!(spins.iter().all(|&s| s == 1 || s == -1));
    assert_eq!(ground, check);
}

#[test]
fn exact_run_reaches_ground() {
    let model = ba(14, 2, 3);
    let cfg = CString::new(r#"{"scheme":"skipper","cuts":3,"sampler":{"kind":"exact","num_reads":5}}"#).unwrap();
    let mut report = ptr::null_mut();
    let mut er = f64::NAN;
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(cs_run(model, cfg.as_ptr(), &mut report), CsStatus::Ok, "{}", last_error());
        assert_eq!(cs_report_n_qmi(report), 8);
        assert_eq!(cs_report_energy_residual(report, &mut er), CsStatus::Ok);
        assert_eq!(cs_report_to_json(report, &mut json), CsStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["n_qmi"], 8);
        assert_eq!(v["best"]["energy"].as_f64().unwrap(), cs_report_best_energy(report));
        cs_string_free(json);
        cs_report_free(report);
        cs_model_free(model);
    }
    assert_eq!(er, 0.0);
}

#[test]
fn failures_set_status_and_message() {
    let mut model = ptr::null_mut();
    unsafe {
        assert_eq!(cs_model_generate_ba(3, 3, 0, false, &mut model), CsStatus::InvalidArgument);
        assert!(model.is_null());
        assert!(!last_error().is_empty());

        let bad = CString::new("{not json").unwrap();
        assert_eq!(cs_model_from_json(bad.as_ptr(), &mut model), CsStatus::InvalidArgument);
        assert_eq!(cs_model_from_json(ptr::null(), &mut model), CsStatus::NullPointer);
        assert_eq!(cs_model_generate_ba(10, 2, 0, false, ptr::null_mut()), CsStatus::NullPointer);

        let model = ba(6, 2, 0);
        let mut e = 0.0;
        let three = [1i8, 0, -1, 1, 1, 1];
        assert_eq!(cs_model_energy(model, three.as_ptr(), 6, &mut e), CsStatus::InvalidArgument);
        assert_eq!(cs_model_energy(model, three.as_ptr(), 5, &mut e), CsStatus::InvalidArgument);

        let cfg = CString::new(r#"{"cuts":12}"#).unwrap();
        let mut report = ptr::null_mut();
        assert_eq!(cs_run(model, cfg.as_ptr(), &mut report), CsStatus::InvalidArgument);
        let cfg = CString::new(r#"{"unknown":1}"#).unwrap();
        assert_eq!(cs_run(model, cfg.as_ptr(), &mut report), CsStatus::InvalidArgument);
        let cfg = CString::new(r#"{"hw":{"topology":"complete","n":2}}"#).unwrap();
        assert_eq!(cs_run(model, cfg.as_ptr(), &mut report), CsStatus::EmbeddingFailed, "{}", last_error());
        assert!(report.is_null());
        cs_model_free(model);

        assert_eq!(cs_model_num_variables(ptr::null()), 0);
        assert!(cs_report_best_energy(ptr::null()).is_nan());
        cs_model_free(ptr::null_mut());
        cs_report_free(ptr::null_mut());
        cs_string_free(ptr::null_mut());
    }
}

#[test]
fn runtime_totals() {
    let mut t = 0.0;
    unsafe {
        assert_eq!(cs_runtime_total(CsScheme::Baseline, 1, 0, false, &mut t), CsStatus::Ok);
        assert_eq!(t, 1806.0);
        assert_eq!(cs_runtime_total(CsScheme::SkipperG, 23, 11, false, &mut t), CsStatus::Ok);
        assert_eq!(t, 1894.0);
        assert_eq!(cs_runtime_total(CsScheme::Skipper, 5, 11, false, &mut t), CsStatus::InvalidArgument);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/chainskip.h")).unwrap();
    assert!(header.starts_with("#ifndef CHAINSKIP_H"));
    for name in [
        "typedef struct cs_model cs_model;",
        "typedef struct cs_report cs_report;",
        "CS_STATUS_OK = 0",
        "CS_STATUS_EMBEDDING_FAILED = 4",
        "cs_last_error(void)",
        "cs_string_free(",
        "cs_model_from_json(",
        "cs_model_generate_ba(",
        "cs_model_free(",
        "cs_model_num_variables(",
        "cs_model_variables(",
        "cs_model_to_json(",
        "cs_model_energy(",
        "cs_model_ground_state(",
        "cs_run(",
        "cs_report_free(",
        "cs_report_best_energy(",
        "cs_report_n_qmi(",
        "cs_report_energy_residual(",
        "cs_report_to_json(",
        "cs_runtime_total(",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

//! C interface to `chainskip`.
//!
//! Objects cross the boundary as opaque handles that must be released with
//! their `*_free` function. Every fallible call returns a [`CsStatus`]; on
//! failure the message is available from [`cs_last_error`] on the same
//! thread until the next failing call.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chainskip::bench::{ba_model, BaParams, LinearMode};
use chainskip::experiment::{run_model, ExperimentConfig, RunReport};
use chainskip::ising::{brute_force_ground, Assignment, IsingModel, Spin};
use chainskip::runtime::{total_runtime, AccessMode, RuntimeParams, Scheme};
use chainskip::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    Internal = 1,
    InvalidArgument = 2,
    Io = 3,
    EmbeddingFailed = 4,
    NullPointer = 5,
    NotAvailable = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsScheme {
    Baseline = 0,
    Skipper = 1,
    SkipperG = 2,
}

impl From<CsScheme> for Scheme {
    fn from(s: CsScheme) -> Scheme {
        match s {
            CsScheme::Baseline => Scheme::Baseline,
            CsScheme::Skipper => Scheme::Skipper,
            CsScheme::SkipperG => Scheme::SkipperG,
        }
    }
}

/// An Ising model.
pub struct CsModel(IsingModel);

/// The report of one run.
pub struct CsReport(RunReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: CsStatus, msg: impl Into<String>) -> CsStatus {
    set_error(msg.into());
    status
}

fn from_error(e: &Error) -> CsStatus {
    let status = match chainskip::exit_code(e) {
        2 => CsStatus::InvalidArgument,
        3 => CsStatus::Io,
        4 => CsStatus::EmbeddingFailed,
        _ => CsStatus::Internal,
    };
    fail(status, e.to_string())
}

fn guard<F: FnOnce() -> CsStatus>(f: F) -> CsStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(CsStatus::Panic, "panic inside chainskip"))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, CsStatus> {
    if s.is_null() {
        return Err(fail(CsStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(CsStatus::InvalidArgument, "string argument is not UTF-8"))
}

fn to_c_string(s: String, out: *mut *mut c_char) -> CsStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            CsStatus::Ok
        }
        Err(_) => fail(CsStatus::Internal, "output contains a nul byte"),
    }
}

macro_rules! non_null {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            return fail(CsStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Message of the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a model from its JSON form.
#[no_mangle]
pub unsafe extern "C" fn cs_model_from_json(json: *const c_char, out: *mut *mut CsModel) -> CsStatus {
    guard(|| {
        non_null!(out);
        let s = match read_str(json) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match IsingModel::from_json(s) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(CsModel(m)));
                CsStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Seeded Barabasi-Albert model with standard-normal couplings. Linear
/// terms are standard normal when `normal_linear` is set, zero otherwise.
#[no_mangle]
pub unsafe extern "C" fn cs_model_generate_ba(
    n: usize,
    m: usize,
    seed: u64,
    normal_linear: bool,
    out: *mut *mut CsModel,
) -> CsStatus {
    guard(|| {
        non_null!(out);
        let linear = if normal_linear { LinearMode::Normal } else { LinearMode::Zero };
        match ba_model(&BaParams { n, m, seed, linear }) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(CsModel(model)));
                CsStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn cs_model_free(model: *mut CsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of variables, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn cs_model_num_variables(model: *const CsModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.num_variables())
}

/// Variable ids in ascending order, written to `ids` (capacity `len`).
#[no_mangle]
pub unsafe extern "C" fn cs_model_variables(model: *const CsModel, ids: *mut u32, len: usize) -> CsStatus {
    guard(|| {
        non_null!(model, ids);
        let m = &(*model).0;
        if len < m.num_variables() {
            return fail(CsStatus::InvalidArgument, format!("buffer holds {len}, need {}", m.num_variables()));
        }
        for (k, q) in m.variables().enumerate() {
            *ids.add(k) = q;
        }
        CsStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn cs_model_to_json(model: *const CsModel, out: *mut *mut c_char) -> CsStatus {
    guard(|| {
        non_null!(model, out);
        match (*model).0.to_json() {
            Ok(s) => to_c_string(s, out),
            Err(e) => from_error(&e),
        }
    })
}

/// Energy of the assignment giving `spins[k]` (`-1` or `+1`) to the k-th
/// variable in ascending id order. `len` must equal the variable count.
#[no_mangle]
pub unsafe extern "C" fn cs_model_energy(
    model: *const CsModel,
    spins: *const i8,
    len: usize,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        non_null!(model, out);
        let m = &(*model).0;
        if len != m.num_variables() {
            return fail(CsStatus::InvalidArgument, format!("got {len} spins for {} variables", m.num_variables()));
        }
        if len > 0 && spins.is_null() {
            return fail(CsStatus::NullPointer, "spins is null");
        }
        let mut a = Assignment::new();
        for (k, q) in m.variables().enumerate() {
            match Spin::from_sign(i64::from(*spins.add(k))) {
                Some(s) => {
                    a.insert(q, s);
                }
                None => return fail(CsStatus::InvalidArgument, format!("spin {k} is not -1 or +1")),
            }
        }
        match m.energy(&a) {
            Ok(e) => {
                *out = e;
                CsStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Exhaustive ground state. `spins` (capacity `len`) receives the state in
/// ascending id order; it may be null when `len` is 0.
#[no_mangle]
pub unsafe extern "C" fn cs_model_ground_state(
    model: *const CsModel,
    spins: *mut i8,
    len: usize,
    energy: *mut f64,
) -> CsStatus {
    guard(|| {
        non_null!(model, energy);
        let m = &(*model).0;
        if len != 0 && len < m.num_variables() {
            return fail(CsStatus::InvalidArgument, format!("buffer holds {len}, need {}", m.num_variables()));
        }
        match brute_force_ground(m) {
            Ok((state, e)) => {
                *energy = e;
                if len != 0 {
                    if spins.is_null() {
                        return fail(CsStatus::NullPointer, "spins is null");
                    }
                    for (k, (_, s)) in state.iter().enumerate() {
                        *spins.add(k) = s.sign();
                    }
                }
                CsStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Runs a scheme on `model`. `config_json` is an experiment configuration
/// object (null for defaults); its `model` field is ignored.
#[no_mangle]
pub unsafe extern "C" fn cs_run(model: *const CsModel, config_json: *const c_char, out: *mut *mut CsReport) -> CsStatus {
    guard(|| {
        non_null!(model, out);
        let cfg = if config_json.is_null() {
            ExperimentConfig::default()
        } else {
            let s = match read_str(config_json) {
                Ok(s) => s,
                Err(st) => return st,
            };
            match serde_json::from_str::<ExperimentConfig>(s) {
                Ok(c) => c,
                Err(e) => return from_error(&e.into()),
            }
        };
        match run_model(&(*model).0, &cfg) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(CsReport(r)));
                CsStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn cs_report_free(report: *mut CsReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Best energy found, NaN for a null handle.
#[no_mangle]
pub unsafe extern "C" fn cs_report_best_energy(report: *const CsReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.best.energy)
}

/// QMIs executed, 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn cs_report_n_qmi(report: *const CsReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.n_qmi)
}

/// Gap to the exact optimum; `NotAvailable` when the model was too large
/// to enumerate.
#[no_mangle]
pub unsafe extern "C" fn cs_report_energy_residual(report: *const CsReport, out: *mut f64) -> CsStatus {
    guard(|| {
        non_null!(report, out);
        match (*report).0.energy_residual {
            Some(er) => {
                *out = er;
                CsStatus::Ok
            }
            None => fail(CsStatus::NotAvailable, "model too large for an exact residual"),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn cs_report_to_json(report: *const CsReport, out: *mut *mut c_char) -> CsStatus {
    guard(|| {
        non_null!(report, out);
        match serde_json::to_string(&(*report).0) {
            Ok(s) => to_c_string(s, out),
            Err(e) => from_error(&e.into()),
        }
    })
}

/// Sequential end-to-end runtime in seconds under the default timing
/// assumptions.
#[no_mangle]
pub unsafe extern "C" fn cs_runtime_total(
    scheme: CsScheme,
    n_qmi: usize,
    cuts: usize,
    dedicated: bool,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        non_null!(out);
        let mode = if dedicated { AccessMode::Dedicated } else { AccessMode::Shared };
        let p = RuntimeParams::default().with_mode(mode);
        match total_runtime(&p, n_qmi, cuts, scheme.into()) {
            Ok(r) => {
                *out = r.total;
                CsStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

//! C interface to `qmetro`.
//!
//! Models are opaque handles created from JSON and released with
//! [`qm_model_free`]. Reports come back as NUL-terminated JSON strings owned
//! by the caller and released with [`qm_string_free`]. Every entry point
//! returns a [`QmStatus`]; on failure [`qm_last_error_message`] describes the
//! most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qmetro::io::{to_json_string, ModelFile, PovmFile};
use qmetro::model::PreparedModel;
use qmetro::report::{analysis_report, construct_report, verify_report, RunConfig, VERSION};
use qmetro::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Schema = 3,
    Numeric = 4,
    Infeasible = 5,
    IncompletePovm = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Prepared model together with the configuration its reports embed.
pub struct QmModel {
    prepared: PreparedModel,
    config: RunConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

static VERSION_C: &CStr = {
    match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version contains NUL"),
    }
};

fn set_error(msg: impl Into<String>) {
    let mut bytes = msg.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).expect("interior NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> QmStatus {
    match e.exit_code() {
        2 => QmStatus::Schema,
        5 => QmStatus::IncompletePovm,
        _ => QmStatus::Numeric,
    }
}

fn fail(e: Error) -> QmStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

/// Runs `f`, mapping panics to [`QmStatus::Panic`].
fn guard(f: impl FnOnce() -> QmStatus) -> QmStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            QmStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, QmStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(QmStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        QmStatus::InvalidUtf8
    })
}

/// # Safety
/// `out` is null or valid for a pointer write.
unsafe fn write_string(out: *mut *mut c_char, s: String) -> QmStatus {
    if out.is_null() {
        set_error("null output pointer");
        return QmStatus::NullPointer;
    }
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            QmStatus::Ok
        }
        Err(_) => {
            set_error("report contains a NUL byte");
            QmStatus::Numeric
        }
    }
}

fn parse_config(text: Option<&str>, file: &ModelFile) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::default();
    if let Some(t) = file.tolerances {
        cfg.tolerances = t;
    }
    if let Some(text) = text {
        cfg = serde_json::from_str(text)?;
    }
    Ok(cfg)
}

/// Parse and prepare a model. `config_json` may be null; otherwise it is a
/// run configuration object and replaces the tolerances embedded in the
/// model.
///
/// # Safety
/// `model_json` and a non-null `config_json` are NUL-terminated strings;
/// `out` is valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qm_model_from_json(
    model_json: *const c_char,
    config_json: *const c_char,
    out: *mut *mut QmModel,
) -> QmStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return QmStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let text = match read_str(model_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let config_text = if config_json.is_null() {
            None
        } else {
            match read_str(config_json) {
                Ok(t) => Some(t),
                Err(s) => return s,
            }
        };
        let built = (|| -> Result<QmModel, Error> {
            let file: ModelFile = serde_json::from_str(text)?;
            let config = parse_config(config_text, &file)?;
            let loaded = file.load(&config.tolerances)?;
            let prepared = PreparedModel::new(loaded.model, &config.tolerances)?;
            Ok(QmModel { prepared, config })
        })();
        match built {
            Ok(m) => {
                *out = Box::into_raw(Box::new(m));
                QmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `model` is null or a handle from [`qm_model_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qm_model_free(model: *mut QmModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Hilbert-space dimension, or 0 for a null handle.
///
/// # Safety
/// `model` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qm_model_dim(model: *const QmModel) -> usize {
    model.as_ref().map_or(0, |m| m.prepared.model.dim)
}

/// Number of parameters, or 0 for a null handle.
///
/// # Safety
/// `model` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qm_model_num_params(model: *const QmModel) -> usize {
    model.as_ref().map_or(0, |m| m.prepared.model.num_params)
}

/// Row-major QFIM into `out`, which holds `len >= s*s` doubles.
///
/// # Safety
/// `model` is a live handle and `out` is valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn qm_model_qfim(model: *const QmModel, out: *mut f64, len: usize) -> QmStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            set_error("null model handle");
            return QmStatus::NullPointer;
        };
        if out.is_null() {
            set_error("null output buffer");
            return QmStatus::NullPointer;
        }
        let q = &m.prepared.qfim.matrix;
        let s = q.nrows();
        if len < s * s {
            set_error(format!("buffer holds {len} doubles, need {}", s * s));
            return QmStatus::BufferTooSmall;
        }
        let buf = std::slice::from_raw_parts_mut(out, s * s);
        for i in 0..s {
            for j in 0..s {
                buf[i * s + j] = q[(i, j)];
            }
        }
        QmStatus::Ok
    })
}

/// Analysis report as JSON.
///
/// # Safety
/// `model` is a live handle and `out_json` is valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qm_model_analyze(model: *const QmModel, out_json: *mut *mut c_char) -> QmStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            set_error("null model handle");
            return QmStatus::NullPointer;
        };
        match analysis_report(&m.prepared, &m.config).and_then(|r| to_json_string(&r)) {
            Ok(s) => write_string(out_json, s),
            Err(e) => fail(e),
        }
    })
}

/// Construction report as JSON. The report is written even when no
/// saturating measurement exists, in which case the status is
/// [`QmStatus::Infeasible`].
///
/// # Safety
/// `model` is a live handle and `out_json` is valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qm_model_construct(model: *const QmModel, seed: u64, out_json: *mut *mut c_char) -> QmStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            set_error("null model handle");
            return QmStatus::NullPointer;
        };
        let cfg = RunConfig {
            seed,
            ..m.config.clone()
        };
        let (report, _) = match construct_report(&m.prepared, &cfg) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        let text = match to_json_string(&report) {
            Ok(t) => t,
            Err(e) => return fail(e),
        };
        let s = write_string(out_json, text);
        if s == QmStatus::Ok && !report.feasible {
            set_error(format!("no saturating measurement: {:?}", report.reason));
            return QmStatus::Infeasible;
        }
        s
    })
}

/// Verification report for a POVM given as `{"vectors": ..., "weights": ...}`.
///
/// # Safety
/// `model` is a live handle, `povm_json` a NUL-terminated string and
/// `out_json` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qm_model_verify(
    model: *const QmModel,
    povm_json: *const c_char,
    out_json: *mut *mut c_char,
) -> QmStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            set_error("null model handle");
            return QmStatus::NullPointer;
        };
        let text = match read_str(povm_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let result = serde_json::from_str::<PovmFile>(text)
            .map_err(Error::from)
            .and_then(|f| f.to_povm())
            .and_then(|p| verify_report(&m.prepared, &p, &m.config))
            .and_then(|r| to_json_string(&r));
        match result {
            Ok(s) => write_string(out_json, s),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `s` is null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn qm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qm_version() -> *const c_char {
    debug_assert_eq!(VERSION_C.to_str().ok(), Some(VERSION));
    VERSION_C.as_ptr()
}

//! C ABI over `qecdesign`.
//!
//! Every fallible call returns a [`QdStatus`] and writes its result through an
//! out-pointer. On failure the message is available from
//! [`qd_last_error_message`] on the same thread. Models are opaque handles
//! owned by the caller and released with [`qd_model_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use qecdesign::{
    find_optimal_params, load_model, logical_error_rate, round_distance, round_rounds, Error,
    Model, NoiseProfile, OracleConfig, PredictionRequest, Recommender, SweepConfig,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdStatus {
    Ok = 0,
    /// Null pointer or a path that is not UTF-8.
    NullArgument = 1,
    InvalidInput = 2,
    AboveThreshold = 3,
    Infeasible = 4,
    Io = 5,
    CorruptModel = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QdPrediction {
    pub raw_distance: f64,
    pub rounded_distance: u32,
    pub raw_rounds: f64,
    pub rounded_rounds: u32,
}

/// Opaque trained model.
pub struct QdModel {
    inner: Model,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> QdStatus {
    match err {
        Error::AboveThreshold { .. } => QdStatus::AboveThreshold,
        Error::Infeasible => QdStatus::Infeasible,
        Error::Io { .. } => QdStatus::Io,
        Error::Corrupt(_) | Error::VersionMismatch { .. } => QdStatus::CorruptModel,
        Error::InvalidInput { .. } | Error::AllZeroProfile => QdStatus::InvalidInput,
        _ => QdStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> Result<(), QdStatus>) -> QdStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QdStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            QdStatus::Internal
        }
    }
}

fn fail(err: Error) -> QdStatus {
    let s = status_of(&err);
    set_error(err.to_string());
    s
}

fn null(what: &str) -> QdStatus {
    set_error(format!("{what} is null"));
    QdStatus::NullArgument
}

fn profile(depol: f64, gate: f64, reset: f64, readout: f64) -> Result<NoiseProfile, QdStatus> {
    NoiseProfile::new(depol, gate, reset, readout).map_err(fail)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next `qd_*` call on the same thread.
#[no_mangle]
pub extern "C" fn qd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a model file. On success `*out` owns a handle for `qd_model_free`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qd_model_load(path: *const c_char, out: *mut *mut QdModel) -> QdStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let Ok(path) = CStr::from_ptr(path).to_str() else {
            set_error("path is not valid UTF-8".into());
            return Err(QdStatus::NullArgument);
        };
        let inner = load_model(Path::new(path)).map_err(fail)?;
        *out = Box::into_raw(Box::new(QdModel { inner }));
        Ok(())
    })
}

/// Releases a handle from `qd_model_load`. NULL is ignored.
///
/// # Safety
/// `model` must come from `qd_model_load` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qd_model_free(model: *mut QdModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Recommends code parameters for one noise profile and target rate.
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qd_model_predict(
    model: *const QdModel,
    depolarizing: f64,
    gate: f64,
    reset: f64,
    readout: f64,
    target: f64,
    out: *mut QdPrediction,
) -> QdStatus {
    guard(|| {
        let Some(model) = model.as_ref() else {
            return Err(null("model"));
        };
        if out.is_null() {
            return Err(null("out"));
        }
        let req = PredictionRequest::new(profile(depolarizing, gate, reset, readout)?, target)
            .map_err(fail)?;
        let r = model.inner.recommend(&req).map_err(fail)?;
        *out = QdPrediction {
            raw_distance: r.raw_distance,
            rounded_distance: r.rounded_distance,
            raw_rounds: r.raw_rounds,
            rounded_rounds: r.rounded_rounds,
        };
        Ok(())
    })
}

/// Rounds a raw distance up to the next odd integer, at least 3.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qd_round_distance(raw: f64, out: *mut u32) -> QdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = round_distance(raw).map_err(fail)?;
        Ok(())
    })
}

/// Rounds a raw round count up, at least 1.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qd_round_rounds(raw: f64, out: *mut u32) -> QdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = round_rounds(raw).map_err(fail)?;
        Ok(())
    })
}

/// Logical error rate under the default oracle.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qd_oracle_logical_error_rate(
    distance: u32,
    rounds: u32,
    depolarizing: f64,
    gate: f64,
    reset: f64,
    readout: f64,
    out: *mut f64,
) -> QdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = profile(depolarizing, gate, reset, readout)?;
        *out = logical_error_rate(distance, rounds, &p, &OracleConfig::default()).map_err(fail)?;
        Ok(())
    })
}

/// Smallest (distance, rounds) on the default grid whose oracle rate meets
/// `target`. Returns `QD_STATUS_INFEASIBLE` when none does.
///
/// # Safety
/// `distance` and `rounds` must be writable pointers.
#[no_mangle]
pub unsafe extern "C" fn qd_find_optimal_params(
    depolarizing: f64,
    gate: f64,
    reset: f64,
    readout: f64,
    target: f64,
    distance: *mut u32,
    rounds: *mut u32,
) -> QdStatus {
    guard(|| {
        if distance.is_null() || rounds.is_null() {
            return Err(null("distance/rounds"));
        }
        let req = PredictionRequest::new(profile(depolarizing, gate, reset, readout)?, target)
            .map_err(fail)?;
        let best = find_optimal_params(&req, &SweepConfig::default(), &OracleConfig::default())
            .map_err(fail)?
            .ok_or_else(|| fail(Error::Infeasible))?;
        *distance = best.distance;
        *rounds = best.rounds;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_match_cli_exit_classes() {
        assert_eq!(status_of(&Error::Infeasible), QdStatus::Infeasible);
        assert_eq!(
            status_of(&Error::AboveThreshold {
                effective: 0.02,
                threshold: 0.01
            }),
            QdStatus::AboveThreshold
        );
        assert_eq!(
            status_of(&Error::Corrupt("x".into())),
            QdStatus::CorruptModel
        );
        assert_eq!(status_of(&Error::AllZeroProfile), QdStatus::InvalidInput);
    }

    #[test]
    fn success_clears_the_previous_error() {
        let mut u = 0;
        assert_eq!(
            unsafe { qd_round_distance(-1.0, &mut u) },
            QdStatus::InvalidInput
        );
        assert!(!qd_last_error_message().is_null());
        assert_eq!(unsafe { qd_round_distance(1.0, &mut u) }, QdStatus::Ok);
        assert!(qd_last_error_message().is_null());
    }
}

//! C ABI for the qtele simulator.
//!
//! Objects are opaque handles created and destroyed through this API.
//! Every fallible call returns a [`QteleStatus`]; on failure the message is
//! available from [`qtele_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qtele::netsim::{coincidence_rate_budget, feed_forward_feasible};
use qtele::stats::hoeffding_test;
use qtele::{run_experiment, ExperimentConfig, RunReport};

/// Opaque experiment configuration.
pub struct QteleConfig(ExperimentConfig);

/// Opaque result of a simulated run.
pub struct QteleReport(RunReport);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QteleStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ConfigError = 3,
    SimulationError = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QteleHoeffding {
    pub p_bound: f64,
    pub p_ln: f64,
    /// `p = p_mantissa · 10^p_exponent10`.
    pub p_mantissa: f64,
    pub p_exponent10: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QteleTimeline {
    pub photon_release_ns: f64,
    pub signal_arrival_ns: f64,
    pub slack_ns: f64,
    pub feasible: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("no interior NUL")));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> Result<(), (QteleStatus, String)>) -> QteleStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QteleStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            QteleStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, (QteleStatus, String)> {
    p.as_ref()
        .ok_or_else(|| (QteleStatus::NullPointer, format!("{what} is NULL")))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<(), (QteleStatus, String)> {
    if p.is_null() {
        Err((QteleStatus::NullPointer, format!("{what} is NULL")))
    } else {
        Ok(())
    }
}

fn sim_err(e: impl std::fmt::Display) -> (QteleStatus, String) {
    (QteleStatus::SimulationError, e.to_string())
}

fn cfg_err(e: impl std::fmt::Display) -> (QteleStatus, String) {
    (QteleStatus::ConfigError, e.to_string())
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next API call on the same thread.
#[no_mangle]
pub extern "C" fn qtele_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Built-in default configuration. Free with `qtele_config_free`.
#[no_mangle]
pub extern "C" fn qtele_config_default() -> *mut QteleConfig {
    Box::into_raw(Box::new(QteleConfig(ExperimentConfig::default())))
}

/// Parses and validates a TOML configuration.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qtele_config_from_toml(toml: *const c_char, out: *mut *mut QteleConfig) -> QteleStatus {
    guard(|| {
        out_ptr(out, "out")?;
        if toml.is_null() {
            return Err((QteleStatus::NullPointer, "toml is NULL".into()));
        }
        let text = CStr::from_ptr(toml)
            .to_str()
            .map_err(|e| (QteleStatus::InvalidUtf8, e.to_string()))?;
        let cfg = ExperimentConfig::from_toml_str(text).map_err(cfg_err)?;
        *out = Box::into_raw(Box::new(QteleConfig(cfg)));
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qtele_config_free(cfg: *mut QteleConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qtele_config_set_seed(cfg: *mut QteleConfig, seed: u64) -> QteleStatus {
    guard(|| {
        let cfg = cfg
            .as_mut()
            .ok_or_else(|| (QteleStatus::NullPointer, "cfg is NULL".to_string()))?;
        cfg.0.run.seed = seed;
        Ok(())
    })
}

/// Runs the simulated experiment on `workers` threads (0 means 1).
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qtele_run(cfg: *const QteleConfig, workers: u32, out: *mut *mut QteleReport) -> QteleStatus {
    guard(|| {
        let cfg = borrow(cfg, "cfg")?;
        out_ptr(out, "out")?;
        cfg.0.validate().map_err(cfg_err)?;
        let report = run_experiment(&cfg.0, workers.max(1) as usize).map_err(sim_err)?;
        *out = Box::into_raw(Box::new(QteleReport(report)));
        Ok(())
    })
}

/// # Safety
/// `report` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qtele_report_free(report: *mut QteleReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Serializes the report as JSON. Free the string with `qtele_string_free`.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qtele_report_to_json(report: *const QteleReport, out: *mut *mut c_char) -> QteleStatus {
    guard(|| {
        let report = borrow(report, "report")?;
        out_ptr(out, "out")?;
        let s = CString::new(report.0.to_json()).map_err(sim_err)?;
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qtele_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qtele_report_average_fidelity(report: *const QteleReport, out: *mut f64) -> QteleStatus {
    guard(|| {
        let report = borrow(report, "report")?;
        out_ptr(out, "out")?;
        *out = report.0.average_state_fidelity;
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qtele_report_process_fidelity(report: *const QteleReport, out: *mut f64) -> QteleStatus {
    guard(|| {
        let report = borrow(report, "report")?;
        out_ptr(out, "out")?;
        *out = report.0.process_fidelity;
        Ok(())
    })
}

/// Classical-bound p-value for mean fidelity over `trials_per_state` trials
/// per input state.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qtele_hoeffding(
    mean_fidelity: f64,
    trials_per_state: u64,
    out: *mut QteleHoeffding,
) -> QteleStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let r = hoeffding_test(mean_fidelity, trials_per_state).map_err(sim_err)?;
        *out = QteleHoeffding {
            p_bound: r.p_bound,
            p_ln: r.p_ln,
            p_mantissa: r.p_mantissa,
            p_exponent10: r.p_exponent10,
        };
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qtele_timeline(cfg: *const QteleConfig, out: *mut QteleTimeline) -> QteleStatus {
    guard(|| {
        let cfg = borrow(cfg, "cfg")?;
        out_ptr(out, "out")?;
        let r = feed_forward_feasible(&cfg.0.topology()).map_err(sim_err)?;
        *out = QteleTimeline {
            photon_release_ns: r.photon_release_ns,
            signal_arrival_ns: r.signal_arrival_ns,
            slack_ns: r.slack_ns,
            feasible: r.feasible,
        };
        Ok(())
    })
}

/// Four-fold coincidences per hour from the itemized budget.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qtele_rate_per_hour(cfg: *const QteleConfig, out: *mut f64) -> QteleStatus {
    guard(|| {
        let cfg = borrow(cfg, "cfg")?;
        out_ptr(out, "out")?;
        let c = &cfg.0;
        let b = coincidence_rate_budget(&c.rate_inputs(), c.clock_model().repetition_rate_hz()).map_err(sim_err)?;
        *out = b.fourfold_rate_per_hour;
        Ok(())
    })
}

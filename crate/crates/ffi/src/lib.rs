//! C ABI over the linzip pipeline.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function. Every fallible call returns an
//! `LzStatus`; on failure `lz_last_error` describes the problem. That
//! message lives in thread-local storage and stays valid until the next
//! failing call on the same thread.
//!
//! Strings handed out by an `LzResult` are owned by it and live exactly as
//! long as the result.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::time::Duration;

use linzip::pipeline::io::{parse_csv_str, parse_json_str};
use linzip::pipeline::{generate_synthetic, parse_instance, Mode, PipelineError};
use linzip::{Bound, PipelineConfig, SetSystem, Style};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Config = 4,
    Render = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LzStyle {
    /// One set per row.
    Linear = 0,
    /// Non-intersecting sets share rows.
    Disjoint = 1,
    /// Row mates must not overlap in their active ranges.
    NonAlternating = 2,
    /// At most two row mates cover any column.
    PairAlternating = 3,
}

impl From<LzStyle> for Style {
    fn from(s: LzStyle) -> Style {
        match s {
            LzStyle::Linear => Style::Linear,
            LzStyle::Disjoint => Style::Disjoint,
            LzStyle::NonAlternating => Style::NonAlternating,
            LzStyle::PairAlternating => Style::PairAlternating,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LzMode {
    Exact = 0,
    Heuristic = 1,
}

/// A validated set system.
pub struct LzSetSystem(SetSystem);

/// Pipeline settings, starting from the library defaults.
pub struct LzConfig(PipelineConfig);

/// Output of one pipeline run.
pub struct LzResult {
    svg: CString,
    metrics_json: CString,
    meta_json: CString,
    row_count: usize,
    total_blocks: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(LzStatus, String);

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let status = match &e {
            PipelineError::Parse(_) => LzStatus::Parse,
            PipelineError::Render(_) => LzStatus::Render,
            PipelineError::Config(_) => LzStatus::Config,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `f`, turning errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LzStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal error: {message}"));
            LzStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(LzStatus::NullPointer, format!("{what} is null")))
}

unsafe fn borrow_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(LzStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(LzStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(LzStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    let slot = borrow_mut(out, "output pointer")?;
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

fn c_string(s: String, what: &str) -> Result<CString, Failure> {
    CString::new(s).map_err(|_| Failure(LzStatus::Render, format!("{what} contains a NUL byte")))
}

/// Message for the most recent failure on this thread, or an empty string.
#[no_mangle]
pub extern "C" fn lz_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn lz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a JSON instance (`{"elements": [...], "sets": {...}}`).
#[no_mangle]
pub unsafe extern "C" fn lz_set_system_from_json(json: *const c_char, out: *mut *mut LzSetSystem) -> LzStatus {
    guard(|| {
        let (sys, _) = parse_json_str(text(json, "json")?).map_err(PipelineError::from)?;
        emit(out, LzSetSystem(sys))
    })
}

/// Parses a CSV 0/1 membership matrix with a header row of element names.
#[no_mangle]
pub unsafe extern "C" fn lz_set_system_from_csv(csv: *const c_char, out: *mut *mut LzSetSystem) -> LzStatus {
    guard(|| {
        let (sys, _) = parse_csv_str(text(csv, "csv")?).map_err(PipelineError::from)?;
        emit(out, LzSetSystem(sys))
    })
}

/// Reads an instance file; the format follows the `.json`/`.csv` extension.
#[no_mangle]
pub unsafe extern "C" fn lz_set_system_from_file(path: *const c_char, out: *mut *mut LzSetSystem) -> LzStatus {
    guard(|| {
        let sys = parse_instance(Path::new(text(path, "path")?), None).map_err(PipelineError::from)?;
        emit(out, LzSetSystem(sys))
    })
}

/// Builds a synthetic instance; `density` must lie in [0, 1].
#[no_mangle]
pub unsafe extern "C" fn lz_set_system_generate(
    n_sets: usize,
    n_elements: usize,
    density: f64,
    seed: u64,
    out: *mut *mut LzSetSystem,
) -> LzStatus {
    guard(|| emit(out, LzSetSystem(generate_synthetic(n_sets, n_elements, density, seed)?)))
}

/// Number of sets, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn lz_set_system_set_count(sys: *const LzSetSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.set_count())
}

/// Number of elements kept after validation, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn lz_set_system_element_count(sys: *const LzSetSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.element_count())
}

#[no_mangle]
pub unsafe extern "C" fn lz_set_system_free(sys: *mut LzSetSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// New configuration with the library defaults. Never returns null.
#[no_mangle]
pub extern "C" fn lz_config_new() -> *mut LzConfig {
    Box::into_raw(Box::new(LzConfig(PipelineConfig::default())))
}

#[no_mangle]
pub unsafe extern "C" fn lz_config_free(cfg: *mut LzConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

#[no_mangle]
pub unsafe extern "C" fn lz_config_set_style(cfg: *mut LzConfig, style: LzStyle) -> LzStatus {
    guard(|| {
        borrow_mut(cfg, "config")?.0.style = style.into();
        Ok(())
    })
}

/// Maximum sets per row; 0 means unbounded. Other values below 2 are rejected.
#[no_mangle]
pub unsafe extern "C" fn lz_config_set_bound(cfg: *mut LzConfig, bound: usize) -> LzStatus {
    guard(|| {
        let cfg = borrow_mut(cfg, "config")?;
        cfg.0.bound = match bound {
            0 => Bound::Unbounded,
            1 => return Err(Failure(LzStatus::Config, "bound must be 0 (unbounded) or at least 2".into())),
            b => Bound::AtMost(b),
        };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lz_config_set_mode(cfg: *mut LzConfig, mode: LzMode) -> LzStatus {
    guard(|| {
        borrow_mut(cfg, "config")?.0.mode = match mode {
            LzMode::Exact => Mode::Exact,
            LzMode::Heuristic => Mode::Heuristic,
        };
        Ok(())
    })
}

/// Per-stage limit for the exact solvers, in seconds.
#[no_mangle]
pub unsafe extern "C" fn lz_config_set_timeout(cfg: *mut LzConfig, seconds: f64) -> LzStatus {
    guard(|| {
        let cfg = borrow_mut(cfg, "config")?;
        cfg.0.timeout = Duration::try_from_secs_f64(seconds)
            .map_err(|_| Failure(LzStatus::Config, format!("invalid timeout {seconds}")))?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lz_config_set_seed(cfg: *mut LzConfig, seed: u64) -> LzStatus {
    guard(|| {
        borrow_mut(cfg, "config")?.0.seed = seed;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lz_config_set_show_cardinality(cfg: *mut LzConfig, on: bool) -> LzStatus {
    guard(|| {
        borrow_mut(cfg, "config")?.0.render.show_cardinality = on;
        Ok(())
    })
}

/// Whether metrics carry stage wall times (off by default for reproducibility).
#[no_mangle]
pub unsafe extern "C" fn lz_config_set_record_timings(cfg: *mut LzConfig, on: bool) -> LzStatus {
    guard(|| {
        borrow_mut(cfg, "config")?.0.record_timings = on;
        Ok(())
    })
}

/// Runs the whole pipeline. On success `*out` receives a result to be
/// released with `lz_result_free`.
#[no_mangle]
pub unsafe extern "C" fn lz_run(cfg: *const LzConfig, sys: *const LzSetSystem, out: *mut *mut LzResult) -> LzStatus {
    guard(|| {
        let cfg = borrow(cfg, "config")?;
        let sys = borrow(sys, "set system")?;
        borrow_mut(out, "output pointer")?;
        let run = linzip::run(&cfg.0, &sys.0)?;
        let result = LzResult {
            svg: c_string(run.document.svg.clone(), "svg")?,
            metrics_json: c_string(run.metrics.to_json(), "metrics")?,
            meta_json: c_string(run.document.metadata_json(), "metadata")?,
            row_count: run.metrics.row_count,
            total_blocks: run.metrics.total_blocks,
        };
        emit(out, result)
    })
}

/// SVG document, or null for a null handle.
#[no_mangle]
pub unsafe extern "C" fn lz_result_svg(res: *const LzResult) -> *const c_char {
    res.as_ref().map_or(ptr::null(), |r| r.svg.as_ptr())
}

/// Metrics as JSON, or null for a null handle.
#[no_mangle]
pub unsafe extern "C" fn lz_result_metrics_json(res: *const LzResult) -> *const c_char {
    res.as_ref().map_or(ptr::null(), |r| r.metrics_json.as_ptr())
}

/// Rendered geometry as JSON, or null for a null handle.
#[no_mangle]
pub unsafe extern "C" fn lz_result_meta_json(res: *const LzResult) -> *const c_char {
    res.as_ref().map_or(ptr::null(), |r| r.meta_json.as_ptr())
}

#[no_mangle]
pub unsafe extern "C" fn lz_result_row_count(res: *const LzResult) -> usize {
    res.as_ref().map_or(0, |r| r.row_count)
}

#[no_mangle]
pub unsafe extern "C" fn lz_result_total_blocks(res: *const LzResult) -> usize {
    res.as_ref().map_or(0, |r| r.total_blocks)
}

#[no_mangle]
pub unsafe extern "C" fn lz_result_free(res: *mut LzResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

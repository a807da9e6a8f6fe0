//! C interface: parse a run configuration, run it, inspect the outputs.
//!
//! Every fallible call returns an [`MgfemStatus`]; on failure the message
//! is available from [`mgfem_last_error_message`] on the same thread.
//! Handles are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use mgfem::cli::{parse_config, run, RunConfig, RunSummary};
use mgfem::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgfemStatus {
    Ok = 0,
    /// I/O and other failures.
    Failed = 1,
    Config = 2,
    Solver = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// A validated run configuration.
pub struct MgfemConfig {
    inner: RunConfig,
}

/// The outcome of a completed run.
pub struct MgfemResult {
    summary: RunSummary,
    paths: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> MgfemStatus {
    match mgfem::cli::exit_code(err) {
        2 => MgfemStatus::Config,
        3 => MgfemStatus::Solver,
        _ => MgfemStatus::Failed,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (MgfemStatus, String)>) -> MgfemStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MgfemStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MgfemStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (MgfemStatus, String)> {
    if p.is_null() {
        return Err((MgfemStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (MgfemStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn lib_error(e: Error) -> (MgfemStatus, String) {
    (status_of(&e), e.to_string())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mgfem_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn mgfem_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses and validates configuration text into `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn mgfem_config_parse(text: *const c_char, out: *mut *mut MgfemConfig) -> MgfemStatus {
    guard(|| {
        if out.is_null() {
            return Err((MgfemStatus::NullPointer, "out is null".into()));
        }
        *out = ptr::null_mut();
        let text = read_str(text, "text")?;
        let inner = parse_config(text).map_err(lib_error)?;
        *out = Box::into_raw(Box::new(MgfemConfig { inner }));
        Ok(())
    })
}

/// Overrides the output directory.
///
/// # Safety
/// `cfg` must come from [`mgfem_config_parse`]; `dir` must be a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mgfem_config_set_out_dir(cfg: *mut MgfemConfig, dir: *const c_char) -> MgfemStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or((MgfemStatus::NullPointer, "config is null".into()))?;
        cfg.inner.out_dir = PathBuf::from(read_str(dir, "dir")?);
        Ok(())
    })
}

/// Overrides the VTK snapshot stride; 0 writes no snapshots.
///
/// # Safety
/// `cfg` must come from [`mgfem_config_parse`].
#[no_mangle]
pub unsafe extern "C" fn mgfem_config_set_snapshot_stride(cfg: *mut MgfemConfig, stride: usize) -> MgfemStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or((MgfemStatus::NullPointer, "config is null".into()))?;
        cfg.inner.snapshot_stride = stride;
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from [`mgfem_config_parse`] and not be used again.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mgfem_config_free(cfg: *mut MgfemConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Runs the configured problem and writes its outputs.
///
/// # Safety
/// `cfg` must come from [`mgfem_config_parse`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mgfem_run(cfg: *const MgfemConfig, out: *mut *mut MgfemResult) -> MgfemStatus {
    guard(|| {
        if out.is_null() {
            return Err((MgfemStatus::NullPointer, "out is null".into()));
        }
        *out = ptr::null_mut();
        let cfg = cfg.as_ref().ok_or((MgfemStatus::NullPointer, "config is null".into()))?;
        let summary = run(&cfg.inner).map_err(lib_error)?;
        let paths = summary
            .files
            .iter()
            .map(|p| CString::new(p.to_string_lossy().into_owned()).unwrap_or_default())
            .collect();
        *out = Box::into_raw(Box::new(MgfemResult { summary, paths }));
        Ok(())
    })
}

/// Number of completed time steps, 0 for a null handle.
///
/// # Safety
/// `res` must be null or come from [`mgfem_run`].
#[no_mangle]
pub unsafe extern "C" fn mgfem_result_steps(res: *const MgfemResult) -> usize {
    res.as_ref().map_or(0, |r| r.summary.steps)
}

/// Number of files written, 0 for a null handle.
///
/// # Safety
/// `res` must be null or come from [`mgfem_run`].
#[no_mangle]
pub unsafe extern "C" fn mgfem_result_file_count(res: *const MgfemResult) -> usize {
    res.as_ref().map_or(0, |r| r.paths.len())
}

/// Path of the `index`-th written file; owned by the result handle.
///
/// # Safety
/// `res` must come from [`mgfem_run`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mgfem_result_file_path(
    res: *const MgfemResult,
    index: usize,
    out: *mut *const c_char,
) -> MgfemStatus {
    guard(|| {
        if out.is_null() {
            return Err((MgfemStatus::NullPointer, "out is null".into()));
        }
        *out = ptr::null();
        let r = res.as_ref().ok_or((MgfemStatus::NullPointer, "result is null".into()))?;
        let p = r.paths.get(index).ok_or((
            MgfemStatus::OutOfRange,
            format!("file index {index} out of range ({} files)", r.paths.len()),
        ))?;
        *out = p.as_ptr();
        Ok(())
    })
}

/// # Safety
/// `res` must come from [`mgfem_run`] and not be used again. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn mgfem_result_free(res: *mut MgfemResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

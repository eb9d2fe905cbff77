//! C ABI for greenwalk: opaque handles, integer status codes, and a
//! JSON-in/JSON-out run entry point.
//!
//! Conventions:
//! * every function returns a `GwStatus` code; `GW_OK` is 0;
//! * output objects are returned through out-pointers and released with
//!   the matching `gw_*_free` function;
//! * strings crossing the boundary are NUL-terminated UTF-8 owned by the
//!   library; release them with `gw_string_free`;
//! * on failure, `gw_last_error` returns a human-readable message for the
//!   current thread.

use greenwalk::cli::{parse_config, run, CliError};
use greenwalk::groups::{element_of_word, make_group, GeneratorSet, GroupOracle};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

/// Status codes mirror the CLI exit codes where they overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GwStatus {
    /// Success.
    Ok = 0,
    /// Unspecified runtime failure; see `gw_last_error`.
    RuntimeError = 1,
    /// Malformed config, spec, measure, or word.
    SchemaError = 2,
    /// Budget or memory cap exceeded.
    BudgetError = 3,
    /// A required pointer argument was null.
    NullPointer = 4,
    /// A string argument was not valid UTF-8.
    Utf8Error = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into()).unwrap_or_else(|_| CString::new("invalid error").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &CliError) -> GwStatus {
    match e.exit_code() {
        2 => GwStatus::SchemaError,
        3 => GwStatus::BudgetError,
        _ => GwStatus::RuntimeError,
    }
}

/// Opaque group handle: a word-problem oracle plus its generator set.
pub struct GwGroup {
    oracle: GroupOracle,
    gens: GeneratorSet,
}

unsafe fn cstr<'a>(p: *const c_char) -> Result<&'a str, GwStatus> {
    if p.is_null() {
        set_error("null pointer argument");
        return Err(GwStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        GwStatus::Utf8Error
    })
}

fn give_string(s: String, out: *mut *mut c_char) -> GwStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            GwStatus::Ok
        }
        Err(_) => {
            set_error("output contained an interior NUL byte");
            GwStatus::RuntimeError
        }
    }
}

/// Parses a group spec (the config `group` object, e.g.
/// `{"type":"free","rank":2,"extra":["ab"]}`) into an opaque handle.
///
/// # Safety
/// `spec_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gw_group_new(
    spec_json: *const c_char,
    out: *mut *mut GwGroup,
) -> GwStatus {
    if out.is_null() {
        set_error("null out pointer");
        return GwStatus::NullPointer;
    }
    let text = match unsafe { cstr(spec_json) } {
        Ok(t) => t,
        Err(s) => return s,
    };
    let spec = match serde_json::from_str(text) {
        Ok(s) => s,
        Err(e) => {
            set_error(format!("group spec: {e}"));
            return GwStatus::SchemaError;
        }
    };
    match make_group(&spec) {
        Ok((oracle, gens)) => {
            unsafe { *out = Box::into_raw(Box::new(GwGroup { oracle, gens })) };
            GwStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            GwStatus::SchemaError
        }
    }
}

/// Releases a group handle. Null is a no-op.
///
/// # Safety
/// `group` must be a pointer from `gw_group_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gw_group_free(group: *mut GwGroup) {
    if !group.is_null() {
        drop(unsafe { Box::from_raw(group) });
    }
}

/// Number of generator labels of the group (the symmetric generating set).
///
/// # Safety
/// `group` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gw_group_generator_count(
    group: *const GwGroup,
    out: *mut usize,
) -> GwStatus {
    if group.is_null() || out.is_null() {
        set_error("null pointer argument");
        return GwStatus::NullPointer;
    }
    unsafe { *out = (*group).gens.len() };
    GwStatus::Ok
}

/// Evaluates a word over generator labels (e.g. `"abA"` or `"x1 X2"`) and
/// returns the display form of its normal form.
///
/// # Safety
/// `group` must be a live handle; strings as in the module docs.
#[no_mangle]
pub unsafe extern "C" fn gw_group_normal_form(
    group: *const GwGroup,
    word: *const c_char,
    out: *mut *mut c_char,
) -> GwStatus {
    if group.is_null() || out.is_null() {
        set_error("null pointer argument");
        return GwStatus::NullPointer;
    }
    let word = match unsafe { cstr(word) } {
        Ok(w) => w,
        Err(s) => return s,
    };
    let g = unsafe { &*group };
    match element_of_word(&g.oracle, &g.gens, word) {
        Ok(el) => give_string(g.oracle.display(&el), out),
        Err(e) => {
            set_error(e.to_string());
            GwStatus::SchemaError
        }
    }
}

/// Runs a full batch config (same JSON schema as the CLI) and returns the
/// primary report JSON; report files are written under `out_dir`.
///
/// # Safety
/// Strings must be NUL-terminated; `out_report` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gw_run_json(
    config_json: *const c_char,
    out_dir: *const c_char,
    out_report: *mut *mut c_char,
) -> GwStatus {
    if out_report.is_null() {
        set_error("null out pointer");
        return GwStatus::NullPointer;
    }
    let config_text = match unsafe { cstr(config_json) } {
        Ok(t) => t,
        Err(s) => return s,
    };
    let dir = match unsafe { cstr(out_dir) } {
        Ok(t) => t,
        Err(s) => return s,
    };
    let config = match parse_config(config_text) {
        Ok(c) => c,
        Err(e) => {
            set_error(e.to_string());
            return status_of(&e);
        }
    };
    match run(&config, Path::new(dir)) {
        Ok(output) => give_string(output.primary, out_report),
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    }
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must come from a greenwalk FFI call, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Last error message on this thread, or null if none. Caller frees with
/// `gw_string_free`.
#[no_mangle]
pub extern "C" fn gw_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        Some(c) => c.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn take_string(p: *mut c_char) -> String {
        let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
        unsafe { gw_string_free(p) };
        s
    }

    #[test]
    fn group_lifecycle_and_normal_form() {
        unsafe {
            let mut group: *mut GwGroup = ptr::null_mut();
            let spec = c(r#"{"type":"free","rank":2}"#);
            assert_eq!(gw_group_new(spec.as_ptr(), &mut group), GwStatus::Ok);
            let mut n = 0usize;
            assert_eq!(gw_group_generator_count(group, &mut n), GwStatus::Ok);
            assert_eq!(n, 4);
            let mut out: *mut c_char = ptr::null_mut();
            let word = c("abA");
            assert_eq!(
                gw_group_normal_form(group, word.as_ptr(), &mut out),
                GwStatus::Ok
            );
            assert_eq!(take_string(out), "abA");
            let word = c("aA");
            assert_eq!(
                gw_group_normal_form(group, word.as_ptr(), &mut out),
                GwStatus::Ok
            );
            assert_eq!(take_string(out), "e");
            gw_group_free(group);
        }
    }

    #[test]
    fn bad_spec_reports_schema_error() {
        unsafe {
            let mut group: *mut GwGroup = ptr::null_mut();
            let spec = c(r#"{"type":"free","rank":0}"#);
            assert_eq!(
                gw_group_new(spec.as_ptr(), &mut group),
                GwStatus::SchemaError
            );
            let err = gw_last_error();
            assert!(!err.is_null());
            let msg = take_string(err);
            assert!(msg.contains("rank"), "{msg}");
        }
    }

    #[test]
    fn null_pointer_is_rejected() {
        unsafe {
            assert_eq!(
                gw_group_new(ptr::null(), ptr::null_mut()),
                GwStatus::NullPointer
            );
            let mut n = 0usize;
            assert_eq!(
                gw_group_generator_count(ptr::null(), &mut n),
                GwStatus::NullPointer
            );
            gw_group_free(ptr::null_mut()); // no-op
            gw_string_free(ptr::null_mut()); // no-op
        }
    }

    #[test]
    fn run_green_through_ffi() {
        unsafe {
            let dir = tempfile::tempdir().unwrap();
            let cfg = c(r#"{"group":{"type":"free","rank":2},"command":"green",
                     "params":{"radius":8,"n_max":100,"rho_plus":0.87},"seed":5}"#);
            let out_dir = c(dir.path().to_str().unwrap());
            let mut report: *mut c_char = ptr::null_mut();
            let status = gw_run_json(cfg.as_ptr(), out_dir.as_ptr(), &mut report);
            assert_eq!(status, GwStatus::Ok);
            let body = take_string(report);
            let v: serde_json::Value = serde_json::from_str(&body).unwrap();
            let lower = v["result"]["lower"].as_f64().unwrap();
            let upper = v["result"]["upper"].as_f64().unwrap();
            assert!(lower <= 1.5 && 1.5 <= upper);
            assert!(dir.path().join("green.json").exists());
        }
    }

    #[test]
    fn run_rejects_recurrent_green_with_schema_code() {
        unsafe {
            let dir = tempfile::tempdir().unwrap();
            let cfg = c(r#"{"group":{"type":"free_abelian","rank":2},"command":"green","seed":1}"#);
            let out_dir = c(dir.path().to_str().unwrap());
            let mut report: *mut c_char = ptr::null_mut();
            let status = gw_run_json(cfg.as_ptr(), out_dir.as_ptr(), &mut report);
            assert_eq!(status, GwStatus::SchemaError);
            let msg = take_string(gw_last_error());
            assert!(msg.contains("recurrent"), "{msg}");
        }
    }
}

//! C interface: opaque system and normal-form handles, status codes and a
//! thread-local error message.
//!
//! Strings returned through `char **` are owned by the caller and must be
//! released with `pdnf_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use clap::Parser;
use pdnf_core::cli::report::Report;
use pdnf_core::cli::{execute_on, normalize_report, parse_system, prepare, Cli, SystemFile};
use pdnf_core::normalform::{verify_normal_form, NormalFormResult};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdnfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InputError = 4,
    /// The call completed but an exact check failed.
    VerificationFailed = 5,
    Internal = 6,
}

/// A parsed system file.
pub struct PdnfSystem {
    sys: SystemFile,
}

/// A normal form with its report.
pub struct PdnfNormalForm {
    result: NormalFormResult,
    report: Report,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: PdnfStatus, msg: impl Into<String>) -> PdnfStatus {
    set_error(msg);
    status
}

/// Runs `f`, mapping panics to `Internal`.
fn guard(f: impl FnOnce() -> PdnfStatus) -> PdnfStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(PdnfStatus::Internal, msg)
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, PdnfStatus> {
    if p.is_null() {
        return Err(fail(PdnfStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|e| fail(PdnfStatus::InvalidUtf8, e.to_string()))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> PdnfStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            PdnfStatus::Ok
        }
        Err(e) => fail(PdnfStatus::Internal, e.to_string()),
    }
}

/// Parses system-file text. On success `*out` owns a new handle.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pdnf_system_parse(text: *const c_char, out: *mut *mut PdnfSystem) -> PdnfStatus {
    guard(|| {
        if out.is_null() {
            return fail(PdnfStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_system(text) {
            Ok(sys) => {
                *out = Box::into_raw(Box::new(PdnfSystem { sys }));
                PdnfStatus::Ok
            }
            Err(e) => fail(PdnfStatus::ParseError, e.to_string()),
        }
    })
}

/// Dimension of the system, or 0 for a null handle.
///
/// # Safety
/// `sys` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pdnf_system_dim(sys: *const PdnfSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.sys.dim)
}

/// # Safety
/// `sys` must be null or a handle from `pdnf_system_parse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pdnf_system_free(sys: *mut PdnfSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Normal form through `order`. Declared eigenvalues must match the
/// linear part.
///
/// # Safety
/// `sys` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pdnf_normalize(
    sys: *const PdnfSystem,
    order: u32,
    out: *mut *mut PdnfNormalForm,
) -> PdnfStatus {
    guard(|| {
        if out.is_null() {
            return fail(PdnfStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(sys) = sys.as_ref() else {
            return fail(PdnfStatus::NullPointer, "null system");
        };
        let res = prepare(&sys.sys, false).and_then(|p| normalize_report(&p, order));
        match res {
            Ok((result, report)) => {
                *out = Box::into_raw(Box::new(PdnfNormalForm { result, report }));
                PdnfStatus::Ok
            }
            Err(e) => fail(PdnfStatus::InputError, e.to_string()),
        }
    })
}

/// The normal-form report as JSON.
///
/// # Safety
/// `nf` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pdnf_normal_form_json(nf: *const PdnfNormalForm, out: *mut *mut c_char) -> PdnfStatus {
    guard(|| {
        if out.is_null() {
            return fail(PdnfStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(nf) = nf.as_ref() else {
            return fail(PdnfStatus::NullPointer, "null normal form");
        };
        write_string(out, serde_json::to_string(&nf.report.json).expect("serializable"))
    })
}

/// Re-runs the exact checks. Returns `Ok` when all pass and
/// `VerificationFailed` otherwise.
///
/// # Safety
/// `nf` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pdnf_normal_form_verify(nf: *const PdnfNormalForm) -> PdnfStatus {
    guard(|| {
        let Some(nf) = nf.as_ref() else {
            return fail(PdnfStatus::NullPointer, "null normal form");
        };
        match verify_normal_form(&nf.result) {
            Ok(v) if v.ok() => PdnfStatus::Ok,
            Ok(_) => fail(PdnfStatus::VerificationFailed, "normal form checks failed"),
            Err(e) => fail(PdnfStatus::Internal, e.to_string()),
        }
    })
}

/// # Safety
/// `nf` must be null or a handle from `pdnf_normalize` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pdnf_normal_form_free(nf: *mut PdnfNormalForm) {
    if !nf.is_null() {
        drop(Box::from_raw(nf));
    }
}

/// Runs a command-line subcommand (`analyze`, `unfold`, ...) on `sys` and
/// writes its JSON report. `sys` may be null for `selfcheck`. A report
/// whose checks fail is still written and the call returns
/// `VerificationFailed`.
///
/// # Safety
/// `command` must be a nul-terminated string, `sys` null or a live handle
/// and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pdnf_run(
    sys: *const PdnfSystem,
    command: *const c_char,
    order: u32,
    out: *mut *mut c_char,
) -> PdnfStatus {
    guard(|| {
        if out.is_null() {
            return fail(PdnfStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let command = match read_str(command) {
            Ok(c) => c,
            Err(s) => return s,
        };
        let order = order.to_string();
        let mut args = vec!["pdnf", "--order", &order, command];
        if command != "selfcheck" {
            args.push("-");
        }
        let cli = match Cli::try_parse_from(args) {
            Ok(c) => c,
            Err(e) => return fail(PdnfStatus::InputError, e.to_string().trim_end().to_string()),
        };
        let rep = match execute_on(&cli, sys.as_ref().map(|s| &s.sys)) {
            Ok(r) => r,
            Err(e) => return fail(PdnfStatus::InputError, e.to_string()),
        };
        let status = write_string(out, serde_json::to_string(&rep.json).expect("serializable"));
        if status == PdnfStatus::Ok && !rep.verified {
            return fail(PdnfStatus::VerificationFailed, "report checks failed");
        }
        status
    })
}

/// Message for the last failing call on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pdnf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pdnf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

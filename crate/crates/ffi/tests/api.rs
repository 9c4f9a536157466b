use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;

use pdnf_ffi::*;

const EXAMPLE: &str = "dim 2\nterm 1 1 0 1\nterm 2 0 1 2\nterm 2 2 0 1\nterm 1 1 1 1/3\n";

fn parse(text: &str) -> (PdnfStatus, *mut PdnfSystem) {
    let c = CString::new(text).unwrap();
    let mut sys = ptr::null_mut();
    let st = unsafe { pdnf_system_parse(c.as_ptr(), &mut sys) };
    (st, sys)
}

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { pdnf_string_free(s) };
    out
}

fn last_error() -> Option<String> {
    let p = pdnf_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned())
}

#[test]
fn normalize_round_trip() {
    let (st, sys) = parse(EXAMPLE);
    assert_eq!(st, PdnfStatus::Ok);
    assert_eq!(unsafe { pdnf_system_dim(sys) }, 2);
    let mut nf = ptr::null_mut();
    assert_eq!(unsafe { pdnf_normalize(sys, 3, &mut nf) }, PdnfStatus::Ok);
    assert_eq!(unsafe { pdnf_normal_form_verify(nf) }, PdnfStatus::Ok);
    let mut js = ptr::null_mut();
    assert_eq!(unsafe { pdnf_normal_form_json(nf, &mut js) }, PdnfStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(js)).unwrap();
    // only x1^2 e2 survives beyond the linear part
    let nonlinear: Vec<_> = v["normal_form"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|t| t["exponent"].as_array().unwrap().iter().map(|e| e.as_u64().unwrap()).sum::<u64>() > 1)
        .collect();
    assert_eq!(nonlinear.len(), 1);
    assert_eq!(nonlinear[0]["coeff"], "1/1");
    assert_eq!(nonlinear[0]["component"], 2);
    assert!(last_error().is_none());
    unsafe {
        pdnf_normal_form_free(nf);
        pdnf_system_free(sys);
    }
}

#[test]
fn error_codes() {
    let (st, sys) = parse("dim 2\nterm 3 1 0 1\n");
    assert_eq!(st, PdnfStatus::ParseError);
    assert!(sys.is_null());
    assert!(last_error().unwrap().contains("line 2"));

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { pdnf_system_parse(ptr::null(), &mut out) }, PdnfStatus::NullPointer);
    let bad = [0xffu8, 0xfe, 0];
    assert_eq!(unsafe { pdnf_system_parse(bad.as_ptr().cast(), &mut out) }, PdnfStatus::InvalidUtf8);

    let mut nf = ptr::null_mut();
    assert_eq!(unsafe { pdnf_normalize(ptr::null(), 3, &mut nf) }, PdnfStatus::NullPointer);
    assert_eq!(unsafe { pdnf_normal_form_verify(ptr::null()) }, PdnfStatus::NullPointer);

    // declared eigenvalues that disagree with the linear part
    let (st, sys) = parse("dim 1\neigenvalue 1 2\nterm 1 1 1\n");
    assert_eq!(st, PdnfStatus::Ok);
    assert_eq!(unsafe { pdnf_normalize(sys, 3, &mut nf) }, PdnfStatus::InputError);
    assert!(nf.is_null());
    unsafe { pdnf_system_free(sys) };
    unsafe {
        pdnf_system_free(ptr::null_mut());
        pdnf_normal_form_free(ptr::null_mut());
        pdnf_string_free(ptr::null_mut());
    }
}

#[test]
fn run_commands() {
    let (_, sys) = parse(EXAMPLE);
    let mut js = ptr::null_mut();
    let cmd = CString::new("analyze").unwrap();
    assert_eq!(unsafe { pdnf_run(sys, cmd.as_ptr(), 3, &mut js) }, PdnfStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(js)).unwrap();
    assert_eq!(v["dimension"], 2);

    let cmd = CString::new("nonsense").unwrap();
    assert_eq!(unsafe { pdnf_run(sys, cmd.as_ptr(), 3, &mut js) }, PdnfStatus::InputError);
    assert!(js.is_null());

    let cmd = CString::new("unfold").unwrap();
    assert_eq!(unsafe { pdnf_run(ptr::null(), cmd.as_ptr(), 3, &mut js) }, PdnfStatus::InputError);
    unsafe { pdnf_system_free(sys) };
}

#[test]
fn header_is_current_and_links_from_c() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/pdnf.h")).unwrap();
    for f in [
        "pdnf_system_parse",
        "pdnf_system_free",
        "pdnf_normalize",
        "pdnf_normal_form_json",
        "pdnf_normal_form_verify",
        "pdnf_normal_form_free",
        "pdnf_run",
        "pdnf_last_error_message",
        "pdnf_string_free",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    // target/<profile>/deps/<test> -> target/<profile>/libpdnf_ffi.a
    let profile = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile.join("libpdnf_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let exe = profile.join("pdnf_ffi_smoke");
    let status = std::process::Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}

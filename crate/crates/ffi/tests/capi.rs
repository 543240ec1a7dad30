use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use polarcc_ffi::*;

fn construct(method: PolarccMethod, n: usize, k: usize, db: f64) -> *mut PolarccCode {
    let mut code = ptr::null_mut();
    let s = unsafe { polarcc_code_construct(method, n, k, db, ptr::null(), &mut code) };
    assert_eq!(s, PolarccStatus::Ok, "{:?}", unsafe {
        CStr::from_ptr(polarcc_last_error())
    });
    code
}

fn frozen(code: *const PolarccCode) -> Vec<usize> {
    let mut count = 0;
    let s = unsafe { polarcc_code_frozen(code, ptr::null_mut(), 0, &mut count) };
    assert_eq!(s, PolarccStatus::BufferTooSmall);
    let mut out = vec![0; count];
    let s = unsafe { polarcc_code_frozen(code, out.as_mut_ptr(), out.len(), &mut count) };
    assert_eq!(s, PolarccStatus::Ok);
    out
}

#[test]
fn golden_code_through_the_c_interface() {
    for method in [
        PolarccMethod::Pcc0,
        PolarccMethod::Pcc2,
        PolarccMethod::Pcc3,
    ] {
        let code = construct(method, 8, 5, 0.0);
        assert_eq!(
            unsafe { (polarcc_code_n(code), polarcc_code_k(code)) },
            (8, 5)
        );
        assert_eq!(frozen(code), [0, 2, 4], "{method:?}");
        unsafe { polarcc_code_free(code) };
    }
}

#[test]
fn noiseless_round_trip() {
    let code = construct(PolarccMethod::Pcc0, 64, 32, 1.0);
    let mut dec = ptr::null_mut();
    assert_eq!(
        unsafe { polarcc_decoder_new(64, &mut dec) },
        PolarccStatus::Ok
    );
    let u: Vec<u8> = (0..32).map(|i| (i * 7 % 3 == 0) as u8).collect();
    let mut x = vec![0u8; 64];
    let mut u_hat = vec![0u8; 32];
    unsafe {
        assert_eq!(
            polarcc_encode(code, u.as_ptr(), u.len(), x.as_mut_ptr(), x.len()),
            PolarccStatus::Ok
        );
        let llr: Vec<f64> = x.iter().map(|&b| if b == 0 { 4.0 } else { -4.0 }).collect();
        let s = polarcc_decode(
            dec,
            code,
            llr.as_ptr(),
            llr.len(),
            u_hat.as_mut_ptr(),
            u_hat.len(),
        );
        assert_eq!(s, PolarccStatus::Ok);
        polarcc_decoder_free(dec);
        polarcc_code_free(code);
    }
    assert_eq!(u_hat, u);
}

#[test]
fn bad_arguments_map_to_status_codes() {
    let code = construct(PolarccMethod::Pcc0, 8, 5, 0.0);
    let mut x = [0u8; 8];
    unsafe {
        let u = [0u8; 4];
        assert_eq!(
            polarcc_encode(code, u.as_ptr(), 4, x.as_mut_ptr(), 8),
            PolarccStatus::Domain
        );
        let u = [2u8; 5];
        assert_eq!(
            polarcc_encode(code, u.as_ptr(), 5, x.as_mut_ptr(), 8),
            PolarccStatus::Domain
        );
        assert_eq!(
            polarcc_encode(ptr::null(), u.as_ptr(), 5, x.as_mut_ptr(), 8),
            PolarccStatus::NullPointer
        );
        let missing = CString::new("/nonexistent/dir/code.pcf").unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(
            polarcc_code_read_pcf(missing.as_ptr(), &mut out),
            PolarccStatus::Io
        );
        assert!(!CStr::from_ptr(polarcc_last_error()).to_bytes().is_empty());
        let dup = [1usize, 1];
        assert_eq!(
            polarcc_code_from_frozen(8, dup.as_ptr(), 2, &mut out),
            PolarccStatus::Domain
        );
        polarcc_code_free(code);
        polarcc_code_free(ptr::null_mut());
    }
}

#[test]
fn pcf_round_trip() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ffi_pcf");
    std::fs::create_dir_all(&dir).unwrap();
    let path = CString::new(dir.join("c.pcf").to_str().unwrap()).unwrap();
    let code = construct(PolarccMethod::Pcc3, 32, 16, 2.0);
    let mut back = ptr::null_mut();
    unsafe {
        assert_eq!(
            polarcc_code_write_pcf(code, path.as_ptr()),
            PolarccStatus::Ok
        );
        assert_eq!(
            polarcc_code_read_pcf(path.as_ptr(), &mut back),
            PolarccStatus::Ok
        );
    }
    assert_eq!(frozen(back), frozen(code));
    unsafe {
        polarcc_code_free(code);
        polarcc_code_free(back);
    }
}

#[test]
fn header_is_committed_and_declares_the_api() {
    let h =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/polarcc.h")).unwrap();
    for sym in [
        "polarcc_code_construct",
        "polarcc_decode",
        "polarcc_last_error",
        "POLARCC_STATUS_OK",
    ] {
        assert!(h.contains(sym), "{sym} missing from header");
    }
}

/// Compiles and runs a small C program against the static library, when a C
/// compiler is available.
#[test]
fn c_program_links_and_runs() {
    let deps = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = deps.parent().unwrap().join("libpolarcc_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: static library or C compiler not available");
        return;
    }
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ffi_c");
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "polarcc.h"
int main(void) {
    PolarccCode *code = NULL;
    if (polarcc_code_construct(POLARCC_METHOD_PCC0, 8, 5, 0.0, NULL, &code) != POLARCC_STATUS_OK) return 1;
    size_t f[3], count = 0;
    if (polarcc_code_frozen(code, f, 3, &count) != POLARCC_STATUS_OK) return 2;
    printf("%zu %zu %zu %zu\n", count, f[0], f[1], f[2]);
    polarcc_code_free(code);
    if (polarcc_code_construct(POLARCC_METHOD_PCC0, 6, 1, 0.0, NULL, &code) != POLARCC_STATUS_DOMAIN) return 3;
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.join("smoke");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "3 0 2 4\n");
}

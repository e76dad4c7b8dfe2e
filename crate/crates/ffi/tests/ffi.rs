use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use csa_tower_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    csa_string_free(s);
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(csa_last_error()).to_str().unwrap().to_string() }
}

fn tower(variant: &str) -> *mut CsaTower {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { csa_tower_new(c(variant).as_ptr(), 2, &mut t) }, CsaStatus::Ok);
    t
}

#[test]
fn equality_and_normal_form() {
    let t = tower("cyclic-root");
    unsafe {
        let mut eq = false;
        assert_eq!(
            csa_tower_equal(t, 0, c("r2^2").as_ptr(), c("x1").as_ptr(), &mut eq),
            CsaStatus::Ok
        );
        assert!(eq);
        assert_eq!(
            csa_tower_equal(t, 0, c("r2").as_ptr(), c("x1").as_ptr(), &mut eq),
            CsaStatus::Ok
        );
        assert!(!eq);
        let mut s = ptr::null_mut();
        assert_eq!(
            csa_tower_normal_form(t, 0, c("t2_0^-1 x1 t2_0 x2^-1").as_ptr(), &mut s),
            CsaStatus::Ok
        );
        assert_eq!(take(s), "e");
        csa_tower_free(t);
    }
}

#[test]
fn conjugacy_roots_reps() {
    let t = tower("cyclic-root");
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(
            csa_tower_conjugate(t, 0, c("x1 x2").as_ptr(), c("x2 x1").as_ptr(), &mut s),
            CsaStatus::Ok
        );
        assert_eq!(take(s), "x1");
        assert_eq!(
            csa_tower_conjugate(t, 1, c("x1").as_ptr(), c("x2").as_ptr(), &mut s),
            CsaStatus::Ok
        );
        assert!(s.is_null());

        let mut stage = 0;
        assert_eq!(
            csa_tower_root(t, c("x1").as_ptr(), 3, &mut s, &mut stage),
            CsaStatus::Ok
        );
        let root = take(s);
        assert_eq!(stage, 3);
        let mut eq = false;
        let cube = c(&format!("({})^3", root));
        assert_eq!(
            csa_tower_equal(t, 0, cube.as_ptr(), c("x1").as_ptr(), &mut eq),
            CsaStatus::Ok
        );
        assert!(eq);

        let reps: Vec<String> = (0..4)
            .map(|i| {
                assert_eq!(csa_tower_class_rep(t, 1, i, &mut s), CsaStatus::Ok);
                take(s)
            })
            .collect();
        assert_eq!(reps, ["x1", "x2", "x1 x2", "x1 x2^-1"]);
        csa_tower_free(t);
    }
}

#[test]
fn rational_tower() {
    let t = tower("rational-root");
    unsafe {
        let mut eq = false;
        let st = csa_tower_equal(t, 0, c("q1(1/2) q1(1/2)").as_ptr(), c("q1(1)").as_ptr(), &mut eq);
        assert_eq!(st, CsaStatus::Ok);
        assert!(eq);
        csa_tower_free(t);
    }
}

#[test]
fn errors() {
    let t = tower("cyclic-root");
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(csa_tower_normal_form(t, 1, c("r2").as_ptr(), &mut s), CsaStatus::Usage);
        assert!(last_error().contains("stage violation"), "{}", last_error());
        assert_eq!(
            csa_tower_normal_form(t, 0, c("x1 (").as_ptr(), &mut s),
            CsaStatus::Usage
        );
        assert!(last_error().contains("syntax error"));
        assert_eq!(
            csa_tower_normal_form(t, 0, ptr::null(), &mut s),
            CsaStatus::InvalidArgument
        );
        assert_eq!(
            csa_tower_normal_form(ptr::null(), 0, c("x1").as_ptr(), &mut s),
            CsaStatus::InvalidArgument
        );
        assert_eq!(
            csa_tower_normal_form(t, 0, c("x1").as_ptr(), ptr::null_mut()),
            CsaStatus::InvalidArgument
        );
        assert_eq!(csa_tower_normal_form(t, 0, c("x1").as_ptr(), &mut s), CsaStatus::Ok);
        assert_eq!(take(s), "x1");
        assert_eq!(last_error(), "");
        let mut stage = 0;
        assert_eq!(
            csa_tower_root(t, c("e").as_ptr(), 2, &mut s, &mut stage),
            CsaStatus::Usage
        );

        let mut bad = ptr::null_mut();
        assert_eq!(csa_tower_new(c("cyclic-root").as_ptr(), 1, &mut bad), CsaStatus::Usage);
        assert!(bad.is_null());
        assert_eq!(csa_tower_new(c("square").as_ptr(), 2, &mut bad), CsaStatus::Usage);
        csa_tower_free(t);
        csa_tower_free(ptr::null_mut());
        csa_string_free(ptr::null_mut());
    }
}

#[test]
fn undecided_and_config() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(
            csa_tower_from_config(c("max_reps = 2\n").as_ptr(), &mut t),
            CsaStatus::Ok
        );
        let mut s = ptr::null_mut();
        assert_eq!(csa_tower_class_rep(t, 1, 2, &mut s), CsaStatus::Undecided);
        assert!(last_error().contains("undecided"));
        csa_tower_free(t);
        assert_eq!(
            csa_tower_from_config(c("base_rank = x").as_ptr(), &mut t),
            CsaStatus::Usage
        );
    }
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/csa_tower.h")
}

#[test]
fn header_declares_api() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "csa_tower_new",
        "csa_tower_from_config",
        "csa_tower_free",
        "csa_tower_normal_form",
        "csa_tower_equal",
        "csa_tower_conjugate",
        "csa_tower_root",
        "csa_tower_class_rep",
        "csa_last_error",
        "csa_string_free",
        "typedef struct CsaTower CsaTower",
        "CSA_STATUS_UNDECIDED = 3",
    ] {
        assert!(h.contains(name), "header lacks {}", name);
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "csa_tower.h"

int main(void) {
    CsaTower *t = NULL;
    if (csa_tower_new("cyclic-root", 2, &t) != CSA_STATUS_OK) return 10;
    bool eq = false;
    if (csa_tower_equal(t, 0, "t2_0^-1 x1 t2_0", "x2", &eq) != CSA_STATUS_OK || !eq) return 11;
    char *nf = NULL;
    if (csa_tower_normal_form(t, 1, "r2", &nf) != CSA_STATUS_USAGE) return 12;
    if (strstr(csa_last_error(), "stage violation") == NULL) return 13;
    if (csa_tower_normal_form(t, 0, "x1 x1^-1 x2", &nf) != CSA_STATUS_OK) return 14;
    printf("%s\n", nf);
    csa_string_free(nf);
    csa_tower_free(t);
    return 0;
}
"#;

/// Compile and run a C client against the header and the static library.
#[test]
fn c_client() {
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib = deps.parent().unwrap().join("libcsa_tower_ffi.a");
    let lib = if lib.exists() {
        lib
    } else {
        deps.join("libcsa_tower_ffi.a")
    };
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let dir = tempfile_dir();
    let src = dir.join("client.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let exe = dir.join("client");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler");
    assert!(status.success(), "C client failed to build");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C client exited {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "x2");
    let _ = std::fs::remove_dir_all(&dir);
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("csa-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

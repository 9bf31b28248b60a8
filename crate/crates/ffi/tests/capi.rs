use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use ncfourier_ffi::*;

fn group(spec: &str) -> *mut NcfGroup {
    let spec = CString::new(spec).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ncf_group_from_spec(spec.as_ptr(), &mut g) }, NcfStatus::Ok);
    g
}

fn dual(spec: &str) -> *mut NcfDual {
    let g = group(spec);
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { ncf_dual_compute(g, 0, &mut d) }, NcfStatus::Ok);
    unsafe { ncf_group_free(g) };
    d
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ncf_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn s3_dual_dimensions() {
    let d = dual("s:3");
    let mut dims = [0usize; 3];
    unsafe {
        assert_eq!(ncf_dual_len(d), 3);
        assert_eq!(ncf_dual_dims(d, dims.as_mut_ptr(), 3), NcfStatus::Ok);
        assert_eq!(ncf_dual_dims(d, dims.as_mut_ptr(), 2), NcfStatus::InvalidArgument);
        ncf_dual_free(d);
    }
    assert_eq!(dims, [1, 1, 2]);
}

#[test]
fn bad_inputs_set_status_and_message() {
    let mut g = ptr::null_mut();
    let bad = CString::new("3\n0 1 2\n1 0 2\n2 2 0\n").unwrap();
    assert_eq!(unsafe { ncf_group_from_cayley(bad.as_ptr(), &mut g) }, NcfStatus::NotAGroup);
    assert!(last_error().contains("associativity"), "{}", last_error());
    assert!(g.is_null());

    let spec = CString::new("nonsense:3").unwrap();
    assert_eq!(unsafe { ncf_group_from_spec(spec.as_ptr(), &mut g) }, NcfStatus::InvalidArgument);
    assert_eq!(unsafe { ncf_group_from_spec(ptr::null(), &mut g) }, NcfStatus::NullPointer);
    assert_eq!(unsafe { ncf_group_order(ptr::null()) }, 0);
    unsafe {
        ncf_group_free(ptr::null_mut());
        ncf_dual_free(ptr::null_mut());
        ncf_string_free(ptr::null_mut());
    }
}

#[test]
fn constant_function_norms_and_quotient() {
    let d = dual("s:3");
    let one: Vec<f64> = (0..6).flat_map(|_| [1.0, 0.0]).collect();
    let mut norms = NcfFunctionNorms {
        norm_a: 0.0,
        norm_adelta: 0.0,
        norm_agamma: 0.0,
    };
    assert_eq!(unsafe { ncf_function_norms(d, one.as_ptr(), 6, &mut norms) }, NcfStatus::Ok);
    for v in [norms.norm_a, norms.norm_adelta, norms.norm_agamma] {
        assert!((v - 1.0).abs() < 1e-12);
    }
    assert_eq!(
        unsafe { ncf_function_norms(d, one.as_ptr(), 5, &mut norms) },
        NcfStatus::DimensionMismatch
    );

    let mut report = std::mem::MaybeUninit::<NcfSolverReport>::uninit();
    let status = unsafe { ncf_quotient_norm(d, one.as_ptr(), 6, ptr::null(), report.as_mut_ptr()) };
    assert_eq!(status, NcfStatus::Ok, "{}", last_error());
    let report = unsafe { report.assume_init() };
    assert!(report.converged && (report.value - 1.0).abs() < 1e-5, "{report:?}");
    unsafe { ncf_dual_free(d) };
}

#[test]
fn cb_norms_of_identity_operator() {
    let d = dual("s:3");
    // Identity blocks: 1, 1 and the 2x2 identity.
    let data = [1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    let mut cfg = ncf_solver_config_default();
    let mut out = std::mem::MaybeUninit::<NcfSolverReport>::uninit();
    unsafe {
        assert_eq!(
            ncf_cb_norm_gamma_adjoint(d, data.as_ptr(), data.len(), &cfg, out.as_mut_ptr()),
            NcfStatus::Ok
        );
        assert!((out.assume_init().value - 1.0).abs() < 1e-6);
        assert_eq!(
            ncf_cb_norm_gamma_check_adjoint(d, data.as_ptr(), data.len(), &cfg, out.as_mut_ptr()),
            NcfStatus::Ok
        );
        assert!((out.assume_init().value - 1.0).abs() < 1e-6);
        assert_eq!(
            ncf_cb_norm_gamma_adjoint(d, data.as_ptr(), 4, &cfg, out.as_mut_ptr()),
            NcfStatus::DimensionMismatch
        );
        cfg.tol_rel = -1.0;
        assert_eq!(
            ncf_cb_norm_gamma_adjoint(d, data.as_ptr(), data.len(), &cfg, out.as_mut_ptr()),
            NcfStatus::InvalidArgument
        );
        ncf_dual_free(d);
    }
}

#[test]
fn verify_returns_json_report() {
    let id = CString::new("projection_p").unwrap();
    let spec = CString::new("q8").unwrap();
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { ncf_verify_check(id.as_ptr(), spec.as_ptr(), 7, &mut json) }, NcfStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { ncf_string_free(json) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], "v1");
    assert_eq!(v["pass"], true);

    let id = CString::new("unknown").unwrap();
    assert_eq!(
        unsafe { ncf_verify_check(id.as_ptr(), spec.as_ptr(), 7, &mut json) },
        NcfStatus::UnknownCheck
    );
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include").join("ncfourier.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "ncf_last_error",
        "ncf_version",
        "ncf_group_from_spec",
        "ncf_group_from_cayley",
        "ncf_group_order",
        "ncf_group_free",
        "ncf_dual_compute",
        "ncf_dual_len",
        "ncf_dual_dims",
        "ncf_dual_free",
        "ncf_solver_config_default",
        "ncf_function_norms",
        "ncf_quotient_norm",
        "ncf_cb_norm_gamma_adjoint",
        "ncf_cb_norm_gamma_check_adjoint",
        "ncf_verify_check",
        "ncf_string_free",
        "typedef struct NcfGroup NcfGroup",
        "typedef struct NcfDual NcfDual",
        "NCF_STATUS_NOT_CONVERGED = 8",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

/// Compiles a C program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libncfourier_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "ncfourier.h"

int main(void) {
    NcfGroup *g = NULL;
    NcfDual *d = NULL;
    if (ncf_group_from_spec("dihedral:4", &g) != NCF_STATUS_OK) return 10;
    if (ncf_group_order(g) != 8) return 11;
    if (ncf_dual_compute(g, 0, &d) != NCF_STATUS_OK) return 12;
    ncf_group_free(g);
    size_t dims[5];
    if (ncf_dual_dims(d, dims, 5) != NCF_STATUS_OK) return 13;
    size_t total = 0;
    for (int i = 0; i < 5; i++) total += dims[i] * dims[i];
    if (total != 8) return 14;
    double one[16];
    for (int i = 0; i < 8; i++) { one[2 * i] = 1.0; one[2 * i + 1] = 0.0; }
    NcfFunctionNorms n;
    if (ncf_function_norms(d, one, 8, &n) != NCF_STATUS_OK) return 15;
    if (n.norm_adelta < 1.0 - 1e-12 || n.norm_adelta > 1.0 + 1e-12) return 16;
    if (ncf_group_from_spec("bogus", &g) == NCF_STATUS_OK) return 17;
    printf("%s\n", ncf_last_error());
    ncf_dual_free(d);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("capi");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .expect("run cc");
    assert!(status.success(), "C compile failed");
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "C program exited with {:?}", run.status);
    assert!(String::from_utf8_lossy(&run.stdout).contains("bogus"));
}

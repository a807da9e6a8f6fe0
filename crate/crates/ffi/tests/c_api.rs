use std::ffi::{CStr, CString};
use std::ptr;

use mgfem_ffi::*;

fn last_error() -> String {
    let p = mgfem_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn parse(text: &str) -> (MgfemStatus, *mut MgfemConfig) {
    let text = CString::new(text).unwrap();
    let mut cfg = ptr::null_mut();
    let status = unsafe { mgfem_config_parse(text.as_ptr(), &mut cfg) };
    (status, cfg)
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(mgfem_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn config_errors_carry_status_and_message() {
    let (status, cfg) = parse("problem = elasticity\nfoo = 3\n");
    assert_eq!(status, MgfemStatus::Config);
    assert!(cfg.is_null());
    let msg = last_error();
    assert!(msg.contains("foo") && msg.contains("line 2"), "{msg}");

    let (status, _) = parse("problem = transport-diffusion\ntd.dt = 0\n");
    assert_eq!(status, MgfemStatus::Config);
    assert!(last_error().contains("td.dt"));
}

#[test]
fn null_and_bad_utf8_rejected() {
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { mgfem_config_parse(ptr::null(), &mut cfg) }, MgfemStatus::NullPointer);
    let text = CString::new("problem = elasticity").unwrap();
    assert_eq!(unsafe { mgfem_config_parse(text.as_ptr(), ptr::null_mut()) }, MgfemStatus::NullPointer);
    let bad = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { mgfem_config_parse(bad.as_ptr().cast(), &mut cfg) },
        MgfemStatus::InvalidUtf8
    );
    let mut res = ptr::null_mut();
    assert_eq!(unsafe { mgfem_run(ptr::null(), &mut res) }, MgfemStatus::NullPointer);
    assert_eq!(unsafe { mgfem_result_steps(ptr::null()) }, 0);
    unsafe {
        mgfem_config_free(ptr::null_mut());
        mgfem_result_free(ptr::null_mut());
    }
}

#[test]
fn runs_transport_diffusion() {
    let dir = tempfile::tempdir().unwrap();
    let (status, cfg) = parse("problem = transport-diffusion\ntd.level = 2\ntd.t_end = 0.1\n");
    assert_eq!(status, MgfemStatus::Ok);
    assert!(mgfem_last_error_message().is_null());
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    unsafe {
        assert_eq!(mgfem_config_set_out_dir(cfg, out.as_ptr()), MgfemStatus::Ok);
        assert_eq!(mgfem_config_set_snapshot_stride(cfg, 5), MgfemStatus::Ok);
        let mut res = ptr::null_mut();
        assert_eq!(mgfem_run(cfg, &mut res), MgfemStatus::Ok);
        assert_eq!(mgfem_result_steps(res), 5);
        let n = mgfem_result_file_count(res);
        let mut names = Vec::new();
        for i in 0..n {
            let mut p = ptr::null();
            assert_eq!(mgfem_result_file_path(res, i, &mut p), MgfemStatus::Ok);
            let path = CStr::from_ptr(p).to_str().unwrap().to_owned();
            assert!(std::path::Path::new(&path).exists(), "{path}");
            names.push(path.rsplit('/').next().unwrap().to_owned());
        }
        assert_eq!(
            names,
            ["errors.csv", "timing.csv", "theta_000000.vtk", "theta_000005.vtk", "solution.vtk"]
        );
        let mut p = ptr::null();
        assert_eq!(mgfem_result_file_path(res, n, &mut p), MgfemStatus::OutOfRange);
        assert!(p.is_null());
        mgfem_result_free(res);
        mgfem_config_free(cfg);
    }
}

#[test]
fn solver_failure_reported() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "problem = driven-cavity\nns.re = 1\nns.dt = 0.05\nns.t_end = 5\nns.cells = 2,2,4\noutput.dir = {}\n",
        dir.path().display()
    );
    let (status, cfg) = parse(&text);
    assert_eq!(status, MgfemStatus::Ok);
    let mut res = ptr::null_mut();
    assert_eq!(unsafe { mgfem_run(cfg, &mut res) }, MgfemStatus::Solver);
    assert!(res.is_null());
    assert!(last_error().contains("diverged"));
    unsafe { mgfem_config_free(cfg) };
}

#[test]
fn header_declares_the_api() {
    let header = include_str!("../include/mgfem.h");
    for name in [
        "MgfemConfig",
        "MgfemResult",
        "MGFEM_STATUS_OK",
        "MGFEM_STATUS_SOLVER",
        "mgfem_version",
        "mgfem_last_error_message",
        "mgfem_config_parse",
        "mgfem_config_set_out_dir",
        "mgfem_config_set_snapshot_stride",
        "mgfem_config_free",
        "mgfem_run",
        "mgfem_result_steps",
        "mgfem_result_file_count",
        "mgfem_result_file_path",
        "mgfem_result_free",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/mgfem.h");
    let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .output()
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use cxmech_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { cx_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(cx_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn parse_integrate_and_read_back() {
    unsafe {
        let params = cx_params_new();
        assert_eq!(cx_params_set(params, cstr("m").as_ptr(), 1.0), CxStatus::Ok);
        assert_eq!(cx_params_set(params, cstr("k").as_ptr(), 1.0), CxStatus::Ok);
        let mut omega = 0.0;
        assert_eq!(
            cx_params_get(params, cstr("omega").as_ptr(), &mut omega),
            CxStatus::Ok
        );
        assert_eq!(omega, 1.0);
        let mut flow = ptr::null_mut();
        assert_eq!(
            cx_flow_parse(cstr("p^2/(2*m) + k*q^2/2").as_ptr(), params, &mut flow),
            CxStatus::Ok
        );
        let (mut qd, mut pd) = (0.0, 0.0);
        assert_eq!(
            cx_flow_eom(flow, 1.0, 0.0, 0.0, &mut qd, &mut pd),
            CxStatus::Ok
        );
        assert_eq!((qd, pd), (0.0, -1.0));
        let mut kappa = 0.0;
        assert_eq!(
            cx_curvature(flow, 1.0, 0.0, 0.0, CxCurve::Z, &mut kappa),
            CxStatus::Ok
        );
        assert!((kappa - std::f64::consts::SQRT_2).abs() < 1e-12);

        let mut traj = ptr::null_mut();
        let step = 2.0 * std::f64::consts::PI / 1000.0;
        assert_eq!(
            cx_integrate_rk4(flow, 1.0, 0.0, 0.0, step, 1000, &mut traj),
            CxStatus::Ok
        );
        assert_eq!(cx_trajectory_len(traj), 1001);
        let mut s = CxSample::default();
        assert_eq!(cx_trajectory_sample(traj, 1000, &mut s), CxStatus::Ok);
        assert!((s.q - 1.0).abs() < 1e-7);
        assert_eq!(
            cx_trajectory_sample(traj, 1001, &mut s),
            CxStatus::InvalidArgument
        );
        assert!(last_error().contains("out of range"));
        cx_trajectory_free(traj);
        cx_flow_free(flow);
        cx_params_free(params);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut flow = ptr::null_mut();
        assert_eq!(
            cx_flow_parse(cstr("p^2 +").as_ptr(), ptr::null(), &mut flow),
            CxStatus::Parse
        );
        assert!(flow.is_null());
        assert_eq!(
            cx_flow_parse(cstr("p^2/(2*mass)").as_ptr(), ptr::null(), &mut flow),
            CxStatus::Param
        );
        assert!(last_error().contains("mass"));
        assert_eq!(
            cx_flow_parse(ptr::null(), ptr::null(), &mut flow),
            CxStatus::NullPointer
        );
        assert_eq!(
            cx_flow_from_scenario(cstr("nope").as_ptr(), ptr::null(), &mut flow),
            CxStatus::InvalidArgument
        );
        let params = cx_params_new();
        cx_params_set(params, cstr("n").as_ptr(), 2.0);
        let mut e = 0.0;
        assert_eq!(
            cx_quantum_energy(cstr("attenuated").as_ptr(), params, &mut e),
            CxStatus::Nonlinear
        );
        cx_params_free(params);
        assert_eq!(cx_trajectory_len(ptr::null()), 0);
    }
}

#[test]
fn scenario_quantization() {
    unsafe {
        let params = cx_params_new();
        cx_params_set(params, cstr("kappa0").as_ptr(), 2.0);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(
            cx_commutator(
                cstr("harmonic").as_ptr(),
                params,
                CxBracket::ZdagZ,
                &mut re,
                &mut im
            ),
            CxStatus::Ok
        );
        assert!((re - 2.0).abs() < 1e-14 && im.abs() < 1e-14);
        let mut flow = ptr::null_mut();
        assert_eq!(
            cx_flow_from_scenario(cstr("imaginary").as_ptr(), params, &mut flow),
            CxStatus::Ok
        );
        let mut traj = ptr::null_mut();
        assert_eq!(
            cx_integrate_adaptive(flow, 1.0, 0.0, 0.0, 1.0, 1e-10, 1e-12, &mut traj),
            CxStatus::Ok
        );
        assert!(cx_trajectory_len(traj) > 2);
        cx_trajectory_free(traj);
        cx_flow_free(flow);
        cx_params_free(params);
    }
}

/// Builds and runs a C program against the generated header and static library.
#[test]
fn c_program_links_against_header() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libcxmech_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <math.h>
#include <stdio.h>
#include "cxmech.h"
int main(void) {
    CxFlow *flow = NULL;
    if (cx_flow_from_scenario("harmonic", NULL, &flow) != CX_STATUS_OK) return 1;
    double qd, pd;
    if (cx_flow_eom(flow, 1.0, 0.0, 0.0, &qd, &pd) != CX_STATUS_OK) return 2;
    if (fabs(pd + 1.0) > 1e-15) return 3;
    CxTrajectory *traj = NULL;
    if (cx_integrate_adaptive(NULL, 1, 0, 0, 1, 1e-9, 1e-12, &traj) != CX_STATUS_NULL_POINTER) return 4;
    char msg[128];
    if (cx_last_error_message(msg, sizeof msg) == 0) return 5;
    cx_flow_free(flow);
    printf("ok %s\n", cx_version());
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.join("smoke");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}

use std::ffi::{CStr, CString};
use std::ptr;

use boussfrac_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(bf_last_error()).to_string_lossy().into_owned() }
}

fn config(pairs: &[(&str, &str)]) -> *mut BfConfig {
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(bf_config_new(&mut cfg), BfStatus::Ok);
        for (k, v) in pairs {
            let (k, v) = (CString::new(*k).unwrap(), CString::new(*v).unwrap());
            assert_eq!(bf_config_set(cfg, k.as_ptr(), v.as_ptr()), BfStatus::Ok, "{}", last_error());
        }
    }
    cfg
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(bf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn invalid_key_and_value() {
    let cfg = config(&[]);
    let bad = CString::new("lambda").unwrap();
    let three = CString::new("3").unwrap();
    unsafe {
        assert_eq!(bf_config_set(cfg, bad.as_ptr(), three.as_ptr()), BfStatus::InvalidArgument);
        assert!(last_error().contains("lambda"));
        assert_eq!(bf_config_set(cfg, ptr::null(), three.as_ptr()), BfStatus::NullPointer);
        bf_config_free(cfg);
    }
}

#[test]
fn evolve_round_trip() {
    let cfg = config(&[("n", "128"), ("T", "0.5"), ("eps", "0.1"), ("data", "smooth-bump")]);
    unsafe {
        let mut s0 = ptr::null_mut();
        assert_eq!(bf_state_from_config(cfg, &mut s0), BfStatus::Ok);
        let mut n = 0;
        assert_eq!(bf_state_len(s0, &mut n), BfStatus::Ok);
        assert_eq!(n, 128);
        let (mut z, mut u) = (vec![0.0; n], vec![0.0; n]);
        assert_eq!(bf_state_samples(s0, z.as_mut_ptr(), u.as_mut_ptr(), n), BfStatus::Ok);
        assert!((z.iter().cloned().fold(0.0, f64::max) - 0.3).abs() < 1e-12);

        let mut rep = ptr::null_mut();
        let mut s1 = ptr::null_mut();
        assert_eq!(bf_evolve(cfg, s0, &mut rep, &mut s1), BfStatus::Ok);
        let mut pass = 0;
        assert_eq!(bf_report_pass(rep, &mut pass), BfStatus::Ok);
        assert_eq!(pass, 1);
        let (mut t, mut e0, mut e1) = (0.0, 0.0, 0.0);
        bf_state_info(s0, ptr::null_mut(), &mut e0);
        bf_state_info(s1, &mut t, &mut e1);
        assert!((t - 0.5).abs() < 1e-12);
        assert!(e1 < e0);

        let mut len = 0;
        assert_eq!(bf_report_json(rep, ptr::null_mut(), 0, &mut len), BfStatus::BufferTooSmall);
        let mut buf = vec![0 as std::ffi::c_char; len];
        assert_eq!(bf_report_json(rep, buf.as_mut_ptr(), len, &mut len), BfStatus::Ok);
        let json = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        assert!(json.contains("\"schema_version\": 1"));

        bf_report_free(rep);
        bf_state_free(s0);
        bf_state_free(s1);
        bf_config_free(cfg);
    }
}

#[test]
fn state_from_samples() {
    let n = 64;
    let l = std::f64::consts::PI;
    let z: Vec<f64> = (0..n).map(|i| 0.1 * (-l + 2.0 * l * i as f64 / n as f64).sin()).collect();
    let u = vec![0.0; n];
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(bf_state_new(l, n, z.as_ptr(), u.as_ptr(), &mut s), BfStatus::Ok);
        let mut e = 0.0;
        assert_eq!(bf_state_info(s, ptr::null_mut(), &mut e), BfStatus::Ok);
        assert!(e > 0.0);
        bf_state_free(s);
        assert_eq!(bf_state_new(l, 3, z.as_ptr(), u.as_ptr(), &mut s), BfStatus::InvalidArgument);
    }
}

#[test]
fn kernel_norms() {
    let (mut l1, mut c) = (0.0, 0.0);
    unsafe {
        assert_eq!(bf_kernel_norms(2.0, 0.1, 1.0, &mut l1, &mut c), BfStatus::Ok);
        assert!((l1 - 1.0).abs() < 1e-6);
        // heat kernel: |K_x|_1 = 1 / sqrt(pi eps t)
        assert!((c - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-6);
        assert_eq!(bf_kernel_norms(2.5, 0.1, 1.0, &mut l1, &mut c), BfStatus::InvalidArgument);
    }
}

#[test]
fn study_by_name() {
    let cfg = config(&[("n", "256"), ("T", "0.5")]);
    let name = CString::new("converge-eps").unwrap();
    let bogus = CString::new("nope").unwrap();
    unsafe {
        let mut rep = ptr::null_mut();
        assert_eq!(bf_study_run(cfg, name.as_ptr(), &mut rep), BfStatus::Ok);
        let mut pass = 0;
        bf_report_pass(rep, &mut pass);
        assert_eq!(pass, 1);
        let mut len = 0;
        bf_report_csv(rep, ptr::null_mut(), 0, &mut len);
        assert!(len > 1);
        bf_report_free(rep);
        assert_eq!(bf_study_run(cfg, bogus.as_ptr(), &mut rep), BfStatus::InvalidArgument);
        bf_config_free(cfg);
    }
}

#[test]
fn cli_exit_codes() {
    let args: Vec<CString> = ["boussfrac", "bogus"].iter().map(|s| CString::new(*s).unwrap()).collect();
    let ptrs: Vec<_> = args.iter().map(|a| a.as_ptr()).collect();
    assert_eq!(unsafe { bf_cli_run(2, ptrs.as_ptr()) }, 1);
    assert_eq!(unsafe { bf_cli_run(0, ptr::null()) }, 1);
}

#[test]
fn free_null_is_noop() {
    unsafe {
        bf_config_free(ptr::null_mut());
        bf_state_free(ptr::null_mut());
        bf_report_free(ptr::null_mut());
    }
}

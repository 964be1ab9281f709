use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use gadgetforge_ffi::*;

fn matrix(rows: usize, cols: usize, re: &[f64]) -> *mut GfMatrix {
    let mut m = ptr::null_mut();
    let s = unsafe { gf_matrix_new(rows, cols, re.as_ptr(), ptr::null(), &mut m) };
    assert_eq!(s, GfStatus::Ok);
    m
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { gf_string_free(p) };
    s
}

fn last_error() -> String {
    let p = gf_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn swap(d: usize) -> Vec<f64> {
    let n = d * d;
    let mut m = vec![0.0; n * n];
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j) * n + (j * d + i)] = 1.0;
        }
    }
    m
}

#[test]
fn matrix_round_trip() {
    let re = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let im = [0.5, 0.0, -1.0, 0.0, 0.0, 2.0];
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(gf_matrix_new(2, 3, re.as_ptr(), im.as_ptr(), &mut m), GfStatus::Ok);
        let (mut r, mut c) = (0, 0);
        assert_eq!(gf_matrix_dims(m, &mut r, &mut c), GfStatus::Ok);
        assert_eq!((r, c), (2, 3));
        let (mut re2, mut im2) = ([0.0; 6], [0.0; 6]);
        assert_eq!(gf_matrix_copy(m, re2.as_mut_ptr(), im2.as_mut_ptr()), GfStatus::Ok);
        assert_eq!(re, re2);
        assert_eq!(im, im2);
        gf_matrix_free(m);
    }
}

#[test]
fn null_and_bad_arguments_report_errors() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(gf_matrix_new(2, 2, ptr::null(), ptr::null(), &mut m), GfStatus::NullPointer);
        assert!(last_error().contains("re"));
        let re = [0.0; 4];
        assert_eq!(gf_matrix_new(0, 4, re.as_ptr(), ptr::null(), &mut m), GfStatus::InvalidDimension);
        let mut v = ptr::null_mut();
        assert_eq!(gf_classify_two_qudit(ptr::null(), 2, 1e-8, &mut v), GfStatus::NullPointer);

        // Not Hermitian.
        let h = matrix(4, 4, &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(gf_classify_two_qudit(h, 2, 1e-8, &mut v), GfStatus::NotHermitian);
        gf_matrix_free(h);
        gf_matrix_free(ptr::null_mut());
        gf_verdict_free(ptr::null_mut());
        gf_string_free(ptr::null_mut());
    }
}

#[test]
fn classifies_swap() {
    for d in [2, 3] {
        let h = matrix(d * d, d * d, &swap(d));
        let mut v = ptr::null_mut();
        unsafe {
            assert_eq!(gf_classify_two_qudit(h, d, 1e-8, &mut v), GfStatus::Ok);
            assert_eq!(gf_verdict_class(v), GfClass::LaUniversal);
            let mut json = ptr::null_mut();
            assert_eq!(gf_verdict_json(v, &mut json), GfStatus::Ok);
            assert!(take_string(json).contains("LA_UNIVERSAL"));
            gf_verdict_free(v);
            gf_matrix_free(h);
        }
    }
}

#[test]
fn classifies_set_from_json() {
    let json = CString::new(r#"{"d": 2, "interactions": [{"name": "swap"}, {"name": "sym_projector"}]}"#).unwrap();
    let mut v = ptr::null_mut();
    unsafe {
        let s = gf_classify_set_json(json.as_ptr(), 1e-8, &mut v);
        if s == GfStatus::Ok {
            assert_eq!(gf_verdict_class(v), GfClass::LaUniversal);
            gf_verdict_free(v);
        } else {
            panic!("{s:?}: {}", last_error());
        }
        let bad = CString::new("{").unwrap();
        assert_eq!(gf_classify_set_json(bad.as_ptr(), 1e-8, &mut v), GfStatus::Parse);
    }
}

#[test]
fn gadget_run_status() {
    let name = CString::new("alt-sud").unwrap();
    let params = GfGadgetParams { d: 2, theta: f64::NAN, alpha: f64::NAN, beta: f64::NAN, mu: 0.0, seed: 0, tol: f64::NAN };
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(gf_gadget_run(name.as_ptr(), &params, &mut out), GfStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(report["passed"], true);

        let coupling = CString::new("sud-coupling").unwrap();
        assert_eq!(gf_gadget_run(coupling.as_ptr(), ptr::null(), &mut out), GfStatus::CheckFailed);
        assert!(last_error().starts_with("failed checks"));
        gf_string_free(out);

        let unknown = CString::new("nope").unwrap();
        assert_eq!(gf_gadget_run(unknown.as_ptr(), ptr::null(), &mut out), GfStatus::Parse);
    }
}

#[test]
fn certifies_trivial_simulation() {
    let hs = matrix(2, 2, &[0.25, 0.0, 0.0, 10.0]);
    let ht = matrix(1, 1, &[0.25]);
    let v = matrix(2, 1, &[1.0, 0.0]);
    let mut r = GfSimulation { low_space_dim: 0, encoded_dim: 0, rank_match: false, eta: 0.0, eps: 0.0, identity_offset: 0.0 };
    unsafe {
        assert_eq!(gf_certify_simulation(hs, ht, v, 5.0, false, &mut r), GfStatus::Ok);
        assert!(r.rank_match);
        assert!(r.eta < 1e-12 && r.eps < 1e-12);
        assert_eq!(gf_certify_simulation(hs, ht, v, 20.0, false, &mut r), GfStatus::Ok);
        assert!(!r.rank_match);
        assert!(r.eps.is_nan());
        for m in [hs, ht, v] {
            gf_matrix_free(m);
        }
    }
}

#[test]
fn max_cut_on_square() {
    let g = CString::new(r#"{"n": 4, "edges": [[0,1,1.0],[1,2,1.0],[2,3,1.0],[3,0,1.0]]}"#).unwrap();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(gf_max_d_cut(g.as_ptr(), 2, &mut out), GfStatus::Ok);
    }
    let r: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(r["max_cut_weight"].as_f64(), Some(4.0));
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(gf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/gadgetforge.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for symbol in ["gf_matrix_new", "gf_classify_two_qudit", "gf_last_error", "gf_string_free", "GF_STATUS_CHECK_FAILED"] {
        assert!(text.contains(symbol), "{symbol} missing from header");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", "-include"])
        .arg(&header)
        .arg("/dev/null")
        .status()
    else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    assert!(status.success());
}

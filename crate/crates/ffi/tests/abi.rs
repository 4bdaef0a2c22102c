use std::ffi::{CStr, CString};
use std::ptr;

use cstar_triple_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cstar_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn element(rows: usize, cols: usize, data: &[f64]) -> *mut CstarElement {
    let mut out = ptr::null_mut();
    let s = unsafe { cstar_element_new(rows, cols, data.as_ptr(), &mut out) };
    assert_eq!(s, CstarStatus::Ok, "{}", last_error());
    out
}

fn entries(e: *const CstarElement) -> Vec<f64> {
    let n = unsafe { 2 * cstar_element_rows(e) * cstar_element_cols(e) };
    let mut buf = vec![0.0; n];
    assert_eq!(
        unsafe { cstar_element_get(e, buf.as_mut_ptr(), n) },
        CstarStatus::Ok
    );
    buf
}

#[test]
fn element_round_trip_and_norm() {
    // [[3, 0], [0, 4i]] row-major.
    let e = element(2, 2, &[3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 4.0]);
    unsafe {
        assert_eq!((cstar_element_rows(e), cstar_element_cols(e)), (2, 2));
        assert_eq!(entries(e), [3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 4.0]);
        let mut n = 0.0;
        assert_eq!(cstar_module_norm(e, &mut n), CstarStatus::Ok);
        assert!((n - 4.0).abs() < 1e-14);

        let mut small = [0.0; 3];
        assert_eq!(
            cstar_element_get(e, small.as_mut_ptr(), 3),
            CstarStatus::BufferTooSmall
        );
        assert!(last_error().contains("need 8"));
        cstar_element_free(e);
    }
}

#[test]
fn scalar_triple_product() {
    let x = element(1, 1, &[1.0, 0.0]);
    let y = element(1, 1, &[2.0, 0.0]);
    let z = element(1, 1, &[0.0, 3.0]);
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(cstar_triple_product(x, y, z, &mut t), CstarStatus::Ok);
        assert_eq!(entries(t), [0.0, 6.0]);
        let mut r = 1.0;
        assert_eq!(cstar_cube_identity_residual(z, &mut r), CstarStatus::Ok);
        assert!(r < 1e-15);
        for p in [x, y, z, t] {
            cstar_element_free(p);
        }
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(
            cstar_element_new(2, 2, ptr::null(), &mut out),
            CstarStatus::NullPointer
        );
        assert!(last_error().contains("data"));
        let nan = [f64::NAN, 0.0];
        assert_eq!(
            cstar_element_new(1, 1, nan.as_ptr(), &mut out),
            CstarStatus::InvalidArgument
        );
        assert_eq!(
            cstar_element_new(0, 3, nan.as_ptr(), &mut out),
            CstarStatus::InvalidArgument
        );

        let a = element(1, 2, &[1.0, 0.0, 0.0, 0.0]);
        let b = element(2, 1, &[1.0, 0.0, 0.0, 0.0]);
        let mut t = ptr::null_mut();
        assert_eq!(
            cstar_triple_product(a, b, a, &mut t),
            CstarStatus::DimensionMismatch
        );
        assert!(t.is_null());
        let mut n = 0.0;
        assert_eq!(
            cstar_module_norm(ptr::null(), &mut n),
            CstarStatus::NullPointer
        );
        assert_eq!(cstar_module_norm(a, &mut n), CstarStatus::Ok);
        assert_eq!(last_error(), "");
        cstar_element_free(a);
        cstar_element_free(b);
        cstar_element_free(ptr::null_mut());
    }
}

#[test]
fn scalar_transvection() {
    let c = element(1, 1, &[0.5, 0.0]);
    let x = element(1, 1, &[0.5, 0.0]);
    let mut t = ptr::null_mut();
    let mut y = ptr::null_mut();
    unsafe {
        assert_eq!(cstar_transvection_new(c, &mut t), CstarStatus::Ok);
        assert_eq!(cstar_transvection_apply(t, x, &mut y), CstarStatus::Ok);
        let v = entries(y);
        assert!((v[0] - 0.8).abs() < 1e-15 && v[1].abs() < 1e-15);

        let wrong = element(2, 1, &[0.1, 0.0, 0.0, 0.0]);
        let mut z = ptr::null_mut();
        assert_eq!(
            cstar_transvection_apply(t, wrong, &mut z),
            CstarStatus::DimensionMismatch
        );

        let outside = element(1, 1, &[1.0, 0.0]);
        let mut t2 = ptr::null_mut();
        assert_eq!(
            cstar_transvection_new(outside, &mut t2),
            CstarStatus::OutsideBall
        );
        assert!(t2.is_null());

        cstar_transvection_free(t);
        cstar_transvection_free(ptr::null_mut());
        for p in [c, x, y, wrong, outside] {
            cstar_element_free(p);
        }
    }
}

#[test]
fn classification() {
    let u = element(2, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let e11 = element(2, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let mut k = CstarClassification::default();
    unsafe {
        assert_eq!(cstar_classify(u, &mut k), CstarStatus::Ok);
        assert!(k.is_extreme && k.family_full_norm && k.family_full_range);
        assert_eq!(cstar_classify(e11, &mut k), CstarStatus::Ok);
        assert!(k.is_tripotent && !k.is_extreme);
        assert!((k.bergmann_norm - 1.0).abs() < 1e-14);
        cstar_element_free(u);
        cstar_element_free(e11);
    }
}

#[test]
fn suites_report_as_json() {
    let dims = CString::new("1x1").unwrap();
    let suite = CString::new("axioms").unwrap();
    let mut json = ptr::null_mut();
    let mut passed = false;
    unsafe {
        let s = cstar_run_suites_json(
            dims.as_ptr(),
            suite.as_ptr(),
            5,
            42,
            0.0,
            &mut json,
            &mut passed,
        );
        assert_eq!(s, CstarStatus::Ok, "{}", last_error());
        assert!(passed);
        let v: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["passed"], true);
        assert!(v["properties"].as_array().unwrap().len() >= 7);
        cstar_string_free(json);

        let bad = CString::new("3").unwrap();
        let s = cstar_run_suites_json(
            bad.as_ptr(),
            ptr::null(),
            5,
            42,
            0.0,
            &mut json,
            &mut passed,
        );
        assert_eq!(s, CstarStatus::Config);
        let s = cstar_run_suites_json(ptr::null(), ptr::null(), 0, 42, 0.0, &mut json, &mut passed);
        assert_eq!(s, CstarStatus::Config);
        assert!(last_error().contains("trials"));
    }
}

#[test]
fn version_is_the_package_version() {
    let v = unsafe { CStr::from_ptr(cstar_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

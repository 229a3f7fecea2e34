use std::ffi::{CStr, CString};
use std::ptr;

use conley_lab_ffi::*;

fn field(name: &str) -> *mut ClField {
    let name = CString::new(name).unwrap();
    let mut f = ptr::null_mut();
    let s = unsafe { cl_field_from_catalogue(name.as_ptr(), 0.0, false, &mut f) };
    assert_eq!(s, ClStatus::Ok);
    f
}

fn unit() -> ClRect {
    ClRect { x_min: -1.0, x_max: 1.0, y_min: -1.0, y_max: 1.0 }
}

fn full() -> ClShape {
    ClShape { kind: ClShapeKind::Full, rect: unit(), center_x: 0.0, center_y: 0.0, radius: 0.0, r0: 0.0, r1: 0.0 }
}

fn last_message() -> String {
    let p = cl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn saddle_index_through_handles() {
    let f = field("saddle");
    let mut r = ptr::null_mut();
    let s = unsafe { cl_conley_index(f, &unit(), 1, &full(), &mut r) };
    assert_eq!(s, ClStatus::Ok);
    let mut betti = [9u64; 3];
    unsafe {
        assert_eq!(cl_report_betti(r, betti.as_mut_ptr()), ClStatus::Ok);
        assert_eq!(cl_report_ind_p(r), -1);
        assert_eq!(cl_report_classification(r), ClClassification::Neither);
        cl_report_free(r);
        cl_field_free(f);
    }
    assert_eq!(betti, [0, 1, 0]);
    assert!(cl_last_error_message().is_null());
}

#[test]
fn tangency_location_is_reported() {
    let f = field("zpow2");
    let mut r = ptr::null_mut();
    let s = unsafe { cl_conley_index(f, &unit(), 1, &full(), &mut r) };
    assert_eq!(s, ClStatus::BlockError);
    assert!(r.is_null());
    assert!(last_message().starts_with("InternalTangency"));
    let mut loc = [0.0; 2];
    assert_eq!(unsafe { cl_last_error_location(loc.as_mut_ptr()) }, 1);
    assert!(loc[0].abs() < 1e-6 && (loc[1].abs() - 1.0).abs() < 1e-6);
    unsafe { cl_field_free(f) };
}

#[test]
fn expressions_winding_and_eval() {
    let (p, q) = (CString::new("x^2 - y^2").unwrap(), CString::new("2*x*y").unwrap());
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { cl_field_from_expressions(p.as_ptr(), q.as_ptr(), 0.0, false, &mut f) }, ClStatus::Ok);
    let mut idx = 0i64;
    assert_eq!(unsafe { cl_winding_index(f, 0.0, 0.0, 0.5, &mut idx) }, ClStatus::Ok);
    assert_eq!(idx, 2);
    let mut v = [0.0; 2];
    assert_eq!(unsafe { cl_field_eval(f, 1.0, 2.0, v.as_mut_ptr()) }, ClStatus::Ok);
    assert_eq!(v, [-3.0, 4.0]);
    assert_eq!(unsafe { cl_winding_index(f, 0.0, 0.0, -1.0, &mut idx) }, ClStatus::InvalidArgument);
    unsafe { cl_field_free(f) };
}

#[test]
fn bad_inputs() {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { cl_field_from_catalogue(ptr::null(), 0.0, false, &mut f) }, ClStatus::NullPointer);
    let name = CString::new("nope").unwrap();
    assert_eq!(unsafe { cl_field_from_catalogue(name.as_ptr(), 0.0, false, &mut f) }, ClStatus::FieldError);
    let fam = CString::new("saddle_family").unwrap();
    assert_eq!(unsafe { cl_field_from_catalogue(fam.as_ptr(), 0.0, false, &mut f) }, ClStatus::FieldError);
    assert!(last_message().contains("lambda"));
    let (p, q) = (CString::new("x +").unwrap(), CString::new("y").unwrap());
    assert_eq!(unsafe { cl_field_from_expressions(p.as_ptr(), q.as_ptr(), 0.0, false, &mut f) }, ClStatus::ParseError);
    assert!(f.is_null());
    unsafe {
        cl_field_free(ptr::null_mut());
        cl_report_free(ptr::null_mut());
        cl_string_free(ptr::null_mut());
    }
}

#[test]
fn run_returns_report_and_exit_code() {
    let cfg = CString::new("[field]\nname = node\n[verify]\nchi = 1\n").unwrap();
    let cmd = CString::new("verify").unwrap();
    let mut json = ptr::null_mut();
    let mut code = -1;
    assert_eq!(unsafe { cl_run(cfg.as_ptr(), cmd.as_ptr(), &mut json, &mut code) }, ClStatus::Ok);
    assert_eq!(code, 0);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
    unsafe { cl_string_free(json) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["results"][0]["report"]["ind_p"], 1);

    let bad = CString::new("[field]\nnmae = node\n").unwrap();
    assert_eq!(unsafe { cl_run(bad.as_ptr(), cmd.as_ptr(), ptr::null_mut(), &mut code) }, ClStatus::ParseError);
    assert_eq!(code, 2);
    let nope = CString::new("plot").unwrap();
    assert_eq!(unsafe { cl_run(cfg.as_ptr(), nope.as_ptr(), ptr::null_mut(), &mut code) }, ClStatus::InvalidArgument);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(cl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

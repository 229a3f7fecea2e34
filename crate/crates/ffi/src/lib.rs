//! C ABI over `conley-lab`.
//!
//! Objects cross the boundary as opaque handles (`ClField`, `ClReport`) that
//! the caller releases with the matching `*_free`. Every fallible call
//! returns a [`ClStatus`]; details of the most recent failure on the calling
//! thread are available from `cl_last_error_message` and
//! `cl_last_error_location`. Strings returned by the library are freed with
//! [`cl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use conley_lab::analysis::{conley_index, winding, Classification, ConleyReport};
use conley_lab::block::{BlockOptions, Shape};
use conley_lab::cli::{self, Command};
use conley_lab::complex::Rect;
use conley_lab::field::{catalogue, Field, VectorFieldSpec};
use conley_lab::geometry::Point;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    FieldError = 4,
    BlockError = 5,
    AnalysisError = 6,
    VerifierFailed = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClShapeKind {
    Full = 0,
    Rect = 1,
    Disc = 2,
    Annulus = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClClassification {
    Attractor = 0,
    Repeller = 1,
    Neither = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClRect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

/// `rect` is read for `Rect`, `radius` for `Disc`, `r0`/`r1` for `Annulus`;
/// `center_*` for both curved shapes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClShape {
    pub kind: ClShapeKind,
    pub rect: ClRect,
    pub center_x: f64,
    pub center_y: f64,
    pub radius: f64,
    pub r0: f64,
    pub r1: f64,
}

/// Opaque vector field handle.
pub struct ClField(Field);

/// Opaque Conley index report handle.
pub struct ClReport(ConleyReport);

struct LastError {
    message: CString,
    location: Option<Point>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<LastError>> = const { RefCell::new(None) };
}

fn set_error(status: ClStatus, message: impl Into<String>, location: Option<Point>) -> ClStatus {
    let message = CString::new(message.into().replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(LastError { message, location }));
    status
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> ClStatus) -> ClStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => set_error(ClStatus::Panic, "internal panic", None),
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, ClStatus> {
    if p.is_null() {
        return Err(set_error(ClStatus::NullPointer, format!("{what} is NULL"), None));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| set_error(ClStatus::InvalidArgument, format!("{what} is not UTF-8"), None))
}

fn rect(r: &ClRect) -> Result<Rect, ClStatus> {
    Rect::new(r.x_min, r.x_max, r.y_min, r.y_max).map_err(|e| set_error(ClStatus::InvalidArgument, e.to_string(), None))
}

fn shape(s: &ClShape) -> Result<Shape, ClStatus> {
    let center = Point::new(s.center_x, s.center_y);
    let shape = match s.kind {
        ClShapeKind::Full => Shape::Full,
        ClShapeKind::Rect => Shape::Rect(rect(&s.rect)?),
        ClShapeKind::Disc => Shape::Disc { center, radius: s.radius },
        ClShapeKind::Annulus => Shape::Annulus { center, r0: s.r0, r1: s.r1 },
    };
    if shape.is_valid() {
        Ok(shape)
    } else {
        Err(set_error(ClStatus::InvalidArgument, format!("invalid shape {shape}"), None))
    }
}

fn bind(spec: VectorFieldSpec, lambda: f64, has_lambda: bool) -> Result<Field, ClStatus> {
    spec.bind(has_lambda.then_some(lambda)).map_err(|e| set_error(ClStatus::FieldError, e.to_string(), None))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or NULL. Valid until the next
/// library call on the same thread.
#[no_mangle]
pub extern "C" fn cl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |e| e.message.as_ptr()))
}

/// Writes the location attached to the last failure (tangency points) and
/// returns 1, or returns 0 when there is none.
///
/// # Safety
/// `out` must point to two writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cl_last_error_location(out: *mut f64) -> i32 {
    let loc = LAST_ERROR.with(|e| e.borrow().as_ref().and_then(|e| e.location));
    match (loc, out.is_null()) {
        (Some(p), false) => {
            *out = p.x;
            *out.add(1) = p.y;
            1
        }
        _ => 0,
    }
}

/// Catalogue field by name (`saddle`, `zpow2`, ...). `has_lambda` selects
/// whether `lambda` is bound; families require it.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_field_from_catalogue(
    name: *const c_char,
    lambda: f64,
    has_lambda: bool,
    out: *mut *mut ClField,
) -> ClStatus {
    guard(|| {
        if out.is_null() {
            return set_error(ClStatus::NullPointer, "out is NULL", None);
        }
        let run = || -> Result<Field, ClStatus> {
            let name = text(name, "name")?;
            let spec = catalogue(name).map_err(|e| set_error(ClStatus::FieldError, e.to_string(), None))?;
            bind(spec, lambda, has_lambda)
        };
        match run() {
            Ok(f) => {
                *out = Box::into_raw(Box::new(ClField(f)));
                ClStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Field `(p, q)` from two expressions in `x`, `y` and `lambda`.
///
/// # Safety
/// `p` and `q` must be NUL-terminated strings and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_field_from_expressions(
    p: *const c_char,
    q: *const c_char,
    lambda: f64,
    has_lambda: bool,
    out: *mut *mut ClField,
) -> ClStatus {
    guard(|| {
        if out.is_null() {
            return set_error(ClStatus::NullPointer, "out is NULL", None);
        }
        let run = || -> Result<Field, ClStatus> {
            let (p, q) = (text(p, "p")?, text(q, "q")?);
            let spec = VectorFieldSpec::parse(p, q).map_err(|e| set_error(ClStatus::ParseError, e.to_string(), None))?;
            bind(spec, lambda, has_lambda)
        };
        match run() {
            Ok(f) => {
                *out = Box::into_raw(Box::new(ClField(f)));
                ClStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// # Safety
/// `field` must come from a `cl_field_*` constructor (or be NULL) and not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cl_field_free(field: *mut ClField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Writes `F(x, y)` into `out[0..2]`.
///
/// # Safety
/// `field` must be a live handle and `out` point to two writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cl_field_eval(field: *const ClField, x: f64, y: f64, out: *mut f64) -> ClStatus {
    guard(|| {
        if field.is_null() || out.is_null() {
            return set_error(ClStatus::NullPointer, "field or out is NULL", None);
        }
        match (*field).0.eval(Point::new(x, y)) {
            Ok(v) => {
                *out = v.x;
                *out.add(1) = v.y;
                ClStatus::Ok
            }
            Err(e) => set_error(ClStatus::FieldError, e.to_string(), None),
        }
    })
}

/// Winding index of the field along the circle of `radius` about
/// `(center_x, center_y)`.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cl_winding_index(
    field: *const ClField,
    center_x: f64,
    center_y: f64,
    radius: f64,
    out: *mut i64,
) -> ClStatus {
    guard(|| {
        if field.is_null() || out.is_null() {
            return set_error(ClStatus::NullPointer, "field or out is NULL", None);
        }
        if !(radius > 0.0) {
            return set_error(ClStatus::InvalidArgument, "radius must be positive", None);
        }
        match winding(&(*field).0, Point::new(center_x, center_y), radius, 16, 1e-6) {
            Ok(w) => {
                *out = w.index;
                ClStatus::Ok
            }
            Err(e) => set_error(ClStatus::AnalysisError, e.to_string(), None),
        }
    })
}

/// Builds an isolating block and its index triple, and computes the
/// homology Conley index. On `BlockError` a tangency location may be
/// available from `cl_last_error_location`.
///
/// # Safety
/// `field`, `domain` and `shape` must be valid pointers and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cl_conley_index(
    field: *const ClField,
    domain: *const ClRect,
    depth: u8,
    shape: *const ClShape,
    out: *mut *mut ClReport,
) -> ClStatus {
    guard(|| {
        if field.is_null() || domain.is_null() || shape.is_null() || out.is_null() {
            return set_error(ClStatus::NullPointer, "field, domain, shape or out is NULL", None);
        }
        let (d, s) = match (rect(&*domain), self::shape(&*shape)) {
            (Ok(d), Ok(s)) => (d, s),
            (Err(e), _) | (_, Err(e)) => return e,
        };
        match conley_index(&(*field).0, d, depth, &s, &BlockOptions::default()) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(ClReport(r)));
                ClStatus::Ok
            }
            Err(e) => set_error(ClStatus::BlockError, format!("{}: {e}", e.kind()), e.location()),
        }
    })
}

/// # Safety
/// `report` must come from `cl_conley_index` (or be NULL) and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn cl_report_free(report: *mut ClReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Rational Betti numbers of `(N, L⁺)` into `out[0..3]`.
///
/// # Safety
/// `report` must be a live handle and `out` point to three writable values.
#[no_mangle]
pub unsafe extern "C" fn cl_report_betti(report: *const ClReport, out: *mut u64) -> ClStatus {
    if report.is_null() || out.is_null() {
        return set_error(ClStatus::NullPointer, "report or out is NULL", None);
    }
    for (k, b) in (*report).0.forward.betti().into_iter().enumerate() {
        *out.add(k) = b;
    }
    ClStatus::Ok
}

/// Poincaré index `p(-1)`, or 0 for a NULL handle.
///
/// # Safety
/// `report` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn cl_report_ind_p(report: *const ClReport) -> i64 {
    report.as_ref().map_or(0, |r| r.0.ind_p)
}

/// # Safety
/// `report` must be a live handle or NULL (which yields `Neither`).
#[no_mangle]
pub unsafe extern "C" fn cl_report_classification(report: *const ClReport) -> ClClassification {
    match report.as_ref().map(|r| r.0.classification) {
        Some(Classification::Attractor) => ClClassification::Attractor,
        Some(Classification::Repeller) => ClClassification::Repeller,
        _ => ClClassification::Neither,
    }
}

/// Runs a CLI command (`"index"`, `"verify"`, ...) on INI config text and
/// returns the JSON report through `json_out` (free with
/// [`cl_string_free`]) and the CLI exit code through `exit_code`. The
/// status is `VerifierFailed` for exit code 1 and an error status for 2; the
/// report is produced in every case.
///
/// # Safety
/// `config_text` and `command` must be NUL-terminated strings; `json_out`
/// and `exit_code` writable (either may be NULL to discard).
#[no_mangle]
pub unsafe extern "C" fn cl_run(
    config_text: *const c_char,
    command: *const c_char,
    json_out: *mut *mut c_char,
    exit_code: *mut i32,
) -> ClStatus {
    guard(|| {
        let (cfg, cmd) = match (text(config_text, "config_text"), text(command, "command")) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return e,
        };
        let Some(cmd) = Command::from_name(cmd) else {
            return set_error(ClStatus::InvalidArgument, format!("unknown command `{cmd}`"), None);
        };
        let start = std::time::Instant::now();
        let (report, code, status) = match cli::parse_config(cfg) {
            Ok(config) => {
                let o = cli::run(&config, cmd);
                let status = match o.exit_code {
                    cli::EXIT_OK => ClStatus::Ok,
                    cli::EXIT_VERIFIER_FAILED => {
                        set_error(ClStatus::VerifierFailed, "at least one verifier does not hold", None)
                    }
                    _ => {
                        let e = &o.result["error"];
                        let location = e["location"].as_array().and_then(|a| {
                            Some(Point::new(a.first()?.as_f64()?, a.get(1)?.as_f64()?))
                        });
                        let kind = e["kind"].as_str().unwrap_or("Error");
                        let status = if kind.ends_with("Tangency") || kind == "Ambiguous" || kind == "DepthExhausted" {
                            ClStatus::BlockError
                        } else {
                            ClStatus::AnalysisError
                        };
                        set_error(status, e["message"].as_str().unwrap_or(kind).to_string(), location)
                    }
                };
                (cli::report(Some(&config), vec![o.result], start.elapsed()), o.exit_code, status)
            }
            Err(e) => {
                let result = serde_json::json!({
                    "command": cmd.as_str(),
                    "status": "error",
                    "error": cli::error_object(e.kind(), &e.to_string(), None),
                });
                let status = set_error(ClStatus::ParseError, e.to_string(), None);
                (cli::report(None, vec![result], start.elapsed()), cli::EXIT_ERROR, status)
            }
        };
        if !exit_code.is_null() {
            *exit_code = code;
        }
        if !json_out.is_null() {
            let json = CString::new(cli::to_json(&report)).expect("JSON text has no NUL bytes");
            *json_out = json.into_raw();
        }
        status
    })
}

/// # Safety
/// `s` must be a string returned by this library (or NULL) and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn cl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

//! C ABI over `cstar-triple`.
//!
//! Elements and transvections are opaque heap handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! [`CstarStatus`]; on failure [`cstar_last_error_message`] describes the
//! error on the calling thread. Matrices cross the boundary as row-major
//! arrays of interleaved `(re, im)` doubles, `2·rows·cols` long.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cstar_triple::ball_geometry::{BallPoint, Transvection};
use cstar_triple::extremal::classify;
use cstar_triple::hilbert_module::{module_norm, ModuleElement};
use cstar_triple::jb_triple::TripleSystem;
use cstar_triple::suites::{parse_dims, parse_suites, run_suites, SuiteConfig, SuiteError};
use cstar_triple::{c64, Error, ToleranceConfig, C64};

/// Result codes. `CSTAR_STATUS_OK` is zero; everything else is an error.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CstarStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotPositive = 4,
    Singular = 5,
    OutsideBall = 6,
    Numerical = 7,
    Config = 8,
    Panic = 9,
    BufferTooSmall = 10,
}

/// Opaque module element (an `m×n` complex matrix).
pub struct CstarElement {
    inner: ModuleElement,
}

/// Opaque transvection `g_c` of the open unit ball.
pub struct CstarTransvection {
    inner: Transvection,
}

/// Output of [`cstar_classify`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CstarClassification {
    pub is_extreme: bool,
    pub is_tripotent: bool,
    /// `c*c = 1`.
    pub family_full_norm: bool,
    /// `cc* = 1`.
    pub family_full_range: bool,
    pub bergmann_norm: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(err: &Error) -> CstarStatus {
    match err {
        Error::DimensionMismatch { .. } | Error::NotSquare { .. } => CstarStatus::DimensionMismatch,
        Error::NonFinite { .. } | Error::InvalidTolerance(_) | Error::Fixture { .. } => {
            CstarStatus::InvalidArgument
        }
        Error::NotHermitian { .. } | Error::NotPositive { .. } => CstarStatus::NotPositive,
        Error::Singular { .. } => CstarStatus::Singular,
        Error::OutsideBall { .. } | Error::NearBoundary { .. } => CstarStatus::OutsideBall,
        Error::NotAdjointable { .. }
        | Error::NotALinear { .. }
        | Error::InternalInconsistency { .. }
        | Error::NotIsometry { .. } => CstarStatus::Numerical,
    }
}

struct Failure(CstarStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

impl From<SuiteError> for Failure {
    fn from(e: SuiteError) -> Self {
        match e {
            SuiteError::Fixture(inner) => inner.into(),
            other => Failure(CstarStatus::Config, other.to_string()),
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CstarStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CstarStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            CstarStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {msg}"));
            CstarStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn opt_str<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|_| Failure(CstarStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn boxed_element(e: ModuleElement) -> *mut CstarElement {
    Box::into_raw(Box::new(CstarElement { inner: e }))
}

fn tolerances() -> ToleranceConfig {
    ToleranceConfig::default()
}

/// Message for the most recent failed call on this thread, or `""`. The
/// pointer stays valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn cstar_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cstar_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates an `rows×cols` element from `2·rows·cols` interleaved doubles.
///
/// # Safety
/// `data` must point to `2·rows·cols` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstar_element_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut CstarElement,
) -> CstarStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        let len = rows
            .checked_mul(cols)
            .and_then(|k| k.checked_mul(2))
            .ok_or_else(|| Failure(CstarStatus::InvalidArgument, "dimensions overflow".into()))?;
        if len == 0 {
            return Err(Failure(
                CstarStatus::InvalidArgument,
                "dimensions must be positive".into(),
            ));
        }
        let raw = std::slice::from_raw_parts(data, len);
        let entries: Vec<C64> = raw.chunks_exact(2).map(|p| c64(p[0], p[1])).collect();
        let e = ModuleElement::from_rows(rows, cols, &entries)?;
        write_out(out, boxed_element(e), "out")
    })
}

/// Releases an element. Null is ignored.
///
/// # Safety
/// `e` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cstar_element_free(e: *mut CstarElement) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Row count, or 0 for null.
///
/// # Safety
/// `e` must be null or a live element.
#[no_mangle]
pub unsafe extern "C" fn cstar_element_rows(e: *const CstarElement) -> usize {
    e.as_ref().map_or(0, |e| e.inner.space().rows())
}

/// Column count, or 0 for null.
///
/// # Safety
/// `e` must be null or a live element.
#[no_mangle]
pub unsafe extern "C" fn cstar_element_cols(e: *const CstarElement) -> usize {
    e.as_ref().map_or(0, |e| e.inner.space().cols())
}

/// Copies the entries into `out` (row-major, interleaved). `len` is the
/// capacity in doubles and must be at least `2·rows·cols`.
///
/// # Safety
/// `e` must be a live element and `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cstar_element_get(
    e: *const CstarElement,
    out: *mut f64,
    len: usize,
) -> CstarStatus {
    guard(|| {
        let e = deref(e, "element")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let m = e.inner.matrix();
        let need = 2 * m.len();
        if len < need {
            return Err(Failure(
                CstarStatus::BufferTooSmall,
                format!("buffer holds {len} doubles, need {need}"),
            ));
        }
        let buf = std::slice::from_raw_parts_mut(out, need);
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let k = 2 * (i * m.ncols() + j);
                buf[k] = m[(i, j)].re;
                buf[k + 1] = m[(i, j)].im;
            }
        }
        Ok(())
    })
}

/// Module norm `‖x‖ = ‖x*x‖^{1/2}` (the largest singular value).
///
/// # Safety
/// `e` must be a live element; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstar_module_norm(e: *const CstarElement, out: *mut f64) -> CstarStatus {
    guard(|| {
        let e = deref(e, "element")?;
        write_out(out, module_norm(&e.inner), "out")
    })
}

/// `{x, y, z} = ½(x·y*z + z·y*x)` as a new element.
///
/// # Safety
/// `x`, `y`, `z` must be live elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstar_triple_product(
    x: *const CstarElement,
    y: *const CstarElement,
    z: *const CstarElement,
    out: *mut *mut CstarElement,
) -> CstarStatus {
    guard(|| {
        let (x, y, z) = (deref(x, "x")?, deref(y, "y")?, deref(z, "z")?);
        let sys = TripleSystem::new(x.inner.space(), tolerances());
        let t = sys.triple_product(&x.inner, &y.inner, &z.inner)?;
        write_out(out, boxed_element(t), "out")
    })
}

/// `|‖{x,x,x}‖ − ‖x‖³| / (1 + ‖x‖³)`.
///
/// # Safety
/// `x` must be a live element; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstar_cube_identity_residual(
    x: *const CstarElement,
    out: *mut f64,
) -> CstarStatus {
    guard(|| {
        let x = deref(x, "x")?;
        let sys = TripleSystem::new(x.inner.space(), tolerances());
        write_out(out, sys.cube_identity_residual(&x.inner)?, "out")
    })
}

/// Extreme-point classification of `c` (`‖c‖ ≤ 1`).
///
/// # Safety
/// `c` must be a live element; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstar_classify(
    c: *const CstarElement,
    out: *mut CstarClassification,
) -> CstarStatus {
    guard(|| {
        let c = deref(c, "c")?;
        let sys = TripleSystem::new(c.inner.space(), tolerances());
        let k = classify(&sys, &c.inner)?;
        write_out(
            out,
            CstarClassification {
                is_extreme: k.is_extreme,
                is_tripotent: k.is_tripotent,
                family_full_norm: k.family_full_norm,
                family_full_range: k.family_full_range,
                bergmann_norm: k.bergmann_norm,
            },
            "out",
        )
    })
}

/// Builds `g_c` for a center `c` strictly inside the unit ball.
///
/// # Safety
/// `c` must be a live element; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstar_transvection_new(
    c: *const CstarElement,
    out: *mut *mut CstarTransvection,
) -> CstarStatus {
    guard(|| {
        let c = deref(c, "c")?;
        let tol = tolerances();
        let sys = TripleSystem::new(c.inner.space(), tol);
        let t = Transvection::new(&sys, BallPoint::new(c.inner.clone(), &tol)?)?;
        write_out(
            out,
            Box::into_raw(Box::new(CstarTransvection { inner: t })),
            "out",
        )
    })
}

/// `g_c(x)` as a new element.
///
/// # Safety
/// `t` must be a live transvection and `x` a live element; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstar_transvection_apply(
    t: *const CstarTransvection,
    x: *const CstarElement,
    out: *mut *mut CstarElement,
) -> CstarStatus {
    guard(|| {
        let t = deref(t, "transvection")?;
        let x = deref(x, "x")?;
        let center = t.inner.center().element().space();
        if x.inner.space() != center {
            return Err(Error::DimensionMismatch {
                expected: center.to_string(),
                found: x.inner.space().to_string(),
            }
            .into());
        }
        let p = BallPoint::new(x.inner.clone(), &tolerances())?;
        let y = t.inner.apply(&p)?;
        write_out(out, boxed_element(y.into_element()), "out")
    })
}

/// Releases a transvection. Null is ignored.
///
/// # Safety
/// `t` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cstar_transvection_free(t: *mut CstarTransvection) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Runs the verification suites and returns the JSON report in `*out_json`
/// (free it with [`cstar_string_free`]). `dims` and `suite` may be null for
/// the defaults; `abs_tol <= 0` keeps the default tolerances. Property
/// failures are not an error: check `*out_passed`.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out_json` and
/// `out_passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstar_run_suites_json(
    dims: *const c_char,
    suite: *const c_char,
    trials: u64,
    seed: u64,
    abs_tol: f64,
    out_json: *mut *mut c_char,
    out_passed: *mut bool,
) -> CstarStatus {
    guard(|| {
        if out_json.is_null() || out_passed.is_null() {
            return Err(null("output pointer"));
        }
        let mut config = SuiteConfig {
            trials,
            seed,
            ..SuiteConfig::default()
        };
        if let Some(d) = opt_str(dims, "dims")? {
            config.dims = parse_dims(d)?;
        }
        if let Some(s) = opt_str(suite, "suite")? {
            config.suites = parse_suites(s)?;
        }
        if abs_tol > 0.0 {
            config.tolerances = ToleranceConfig::with_abs_tol(abs_tol)
                .map_err(|e| Failure(CstarStatus::Config, e.to_string()))?;
        }
        let report = run_suites(&config)?;
        let json = CString::new(report.to_json())
            .map_err(|_| Failure(CstarStatus::Panic, "report contains NUL".into()))?;
        write_out(out_passed, report.passed, "out_passed")?;
        write_out(out_json, json.into_raw(), "out_json")
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cstar_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

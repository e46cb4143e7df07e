//! C ABI over `lsb-lab`.
//!
//! Every fallible function returns an [`LsbStatus`]. On failure a message is
//! stored per thread and can be read with [`lsb_last_error_message`]. Handles
//! are opaque and must be released with the matching `*_free` function;
//! strings returned through `char **` must be released with
//! [`lsb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lsb_lab::dynamics::{closed_form_symmetric, SymmetricSolutionParams, Trajectory};
use lsb_lab::error::Error;
use lsb_lab::lie::{exp_map, AlgebraElement, GroupId, C64};
use lsb_lab::output::{parse_csv, report_json, trajectory_csv};
use lsb_lab::scenario::Scenario;
use lsb_lab::verify::VerificationReport;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LsbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    GroupMismatch = 4,
    Domain = 5,
    Unsupported = 6,
    Singular = 7,
    ConstraintViolation = 8,
    Diverged = 9,
    Pole = 10,
    Degenerate = 11,
    OutOfRange = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LsbGroup {
    So3 = 0,
    Su2 = 1,
    Sl2r = 2,
    So21 = 3,
}

impl From<LsbGroup> for GroupId {
    fn from(g: LsbGroup) -> Self {
        match g {
            LsbGroup::So3 => GroupId::So3,
            LsbGroup::Su2 => GroupId::Su2,
            LsbGroup::Sl2r => GroupId::Sl2r,
            LsbGroup::So21 => GroupId::So21,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LsbComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for LsbComplex {
    fn from(z: C64) -> Self {
        LsbComplex { re: z.re, im: z.im }
    }
}

impl From<LsbComplex> for C64 {
    fn from(z: LsbComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Parameters of the symmetric closed-form solution.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct LsbSymmetricParams {
    pub inertia: f64,
    pub inertia_zero: f64,
    pub connection: [f64; 3],
    pub xi_zero: LsbComplex,
    pub xi_plus0: LsbComplex,
    pub xi_minus0: LsbComplex,
}

/// One verification entry. `name` is borrowed from the report.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct LsbCheck {
    pub name: *const c_char,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub struct LsbScenario {
    inner: Scenario,
}

pub struct LsbTrajectory {
    inner: Trajectory,
    header: Vec<CString>,
    rows: Vec<Vec<f64>>,
}

pub struct LsbReport {
    inner: VerificationReport,
    names: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Fail(LsbStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::GroupMismatch { .. } => LsbStatus::GroupMismatch,
            Error::Domain(_) => LsbStatus::Domain,
            Error::Unsupported(_) => LsbStatus::Unsupported,
            Error::Singular(_) => LsbStatus::Singular,
            Error::ConstraintViolation { .. } => LsbStatus::ConstraintViolation,
            Error::InvalidConfig { .. } => LsbStatus::InvalidConfig,
            Error::Divergence { .. } => LsbStatus::Diverged,
            Error::Pole { .. } => LsbStatus::Pole,
            Error::Degenerate(_) => LsbStatus::Degenerate,
        };
        Fail(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<LsbStatus, Fail>) -> LsbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LsbStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(LsbStatus::NullPointer, format!("null pointer: {what}"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(LsbStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn range(i: usize, n: usize, what: &str) -> Result<(), Fail> {
    if i < n {
        Ok(())
    } else {
        Err(Fail(LsbStatus::OutOfRange, format!("{what} {i} out of range (size {n})")))
    }
}

fn trajectory_handle(traj: Trajectory) -> Result<*mut LsbTrajectory, Fail> {
    // the table is the CSV view, which round-trips every value exactly
    let (header, rows) = parse_csv(&trajectory_csv(&traj))?;
    let header = header
        .into_iter()
        .map(|h| CString::new(h).expect("column names have no NUL"))
        .collect();
    Ok(Box::into_raw(Box::new(LsbTrajectory { inner: traj, header, rows })))
}

/// Message of the last failure on this thread. Valid until the next failing
/// call on the same thread; empty if nothing failed yet.
#[no_mangle]
pub extern "C" fn lsb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn lsb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn lsb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a scenario document and applies `n_overrides` dotted-path
/// overrides (`keys[i] = values[i]`, values as JSON text).
///
/// # Safety
/// String arguments must be NUL-terminated; `keys` and `values` must point
/// to `n_overrides` strings each (they may be null when `n_overrides` is 0).
#[no_mangle]
pub unsafe extern "C" fn lsb_scenario_load(
    json: *const c_char,
    keys: *const *const c_char,
    values: *const *const c_char,
    n_overrides: usize,
    out_scenario: *mut *mut LsbScenario,
) -> LsbStatus {
    guard(|| {
        let slot = out(out_scenario, "out_scenario")?;
        *slot = ptr::null_mut();
        let text = string(json, "json")?;
        let mut overrides = Vec::with_capacity(n_overrides);
        if n_overrides > 0 {
            if keys.is_null() || values.is_null() {
                return Err(null("overrides"));
            }
            for i in 0..n_overrides {
                let k = string(*keys.add(i), "override key")?;
                let v = string(*values.add(i), "override value")?;
                overrides.push((k.to_string(), v.to_string()));
            }
        }
        let inner = Scenario::load(text, &overrides)?;
        *slot = Box::into_raw(Box::new(LsbScenario { inner }));
        Ok(LsbStatus::Ok)
    })
}

/// # Safety
/// `s` must come from [`lsb_scenario_load`] or be null.
#[no_mangle]
pub unsafe extern "C" fn lsb_scenario_free(s: *mut LsbScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Hex SHA-256 of the normalized scenario document.
///
/// # Safety
/// `s` must be a live scenario handle; `out_digest` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsb_scenario_digest(s: *const LsbScenario, out_digest: *mut *mut c_char) -> LsbStatus {
    guard(|| {
        let slot = out(out_digest, "out_digest")?;
        *slot = owned_string(deref(s, "scenario")?.inner.digest.clone());
        Ok(LsbStatus::Ok)
    })
}

/// Integrates the scenario. On divergence the status is
/// `LSB_STATUS_DIVERGED`, `*out_trajectory` holds the samples before the
/// escape and `*out_escape_time` (if non-null) the estimated escape time;
/// otherwise the escape time is NaN.
///
/// # Safety
/// `s` must be a live scenario handle; `out_trajectory` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsb_scenario_simulate(
    s: *const LsbScenario,
    out_trajectory: *mut *mut LsbTrajectory,
    out_escape_time: *mut f64,
) -> LsbStatus {
    guard(|| {
        let slot = out(out_trajectory, "out_trajectory")?;
        *slot = ptr::null_mut();
        if let Some(t) = out_escape_time.as_mut() {
            *t = f64::NAN;
        }
        match deref(s, "scenario")?.inner.simulate() {
            Ok(traj) => {
                *slot = trajectory_handle(traj)?;
                Ok(LsbStatus::Ok)
            }
            Err(Error::Divergence { last_time, escape_time, partial }) => {
                *slot = trajectory_handle(*partial)?;
                if let Some(t) = out_escape_time.as_mut() {
                    *t = escape_time;
                }
                set_error(&format!("trajectory diverged after t = {last_time}, estimated escape time {escape_time}"));
                Ok(LsbStatus::Diverged)
            }
            Err(e) => Err(e.into()),
        }
    })
}

/// Simulates and runs the scenario's checks. A failing check is not an
/// error: inspect the report.
///
/// # Safety
/// `s` must be a live scenario handle; `out_report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsb_scenario_verify(s: *const LsbScenario, out_report: *mut *mut LsbReport) -> LsbStatus {
    guard(|| {
        let slot = out(out_report, "out_report")?;
        *slot = ptr::null_mut();
        let inner = deref(s, "scenario")?.inner.verify()?;
        let names = inner
            .checks
            .iter()
            .map(|c| CString::new(c.name.clone()).expect("check names have no NUL"))
            .collect();
        *slot = Box::into_raw(Box::new(LsbReport { inner, names }));
        Ok(LsbStatus::Ok)
    })
}

/// # Safety
/// `t` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn lsb_trajectory_free(t: *mut LsbTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a live trajectory handle; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsb_trajectory_len(t: *const LsbTrajectory, out_len: *mut usize) -> LsbStatus {
    guard(|| {
        *out(out_len, "out_len")? = deref(t, "trajectory")?.inner.len();
        Ok(LsbStatus::Ok)
    })
}

/// Number of columns of the tabular view, `t` included.
///
/// # Safety
/// `t` must be a live trajectory handle; `out_columns` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsb_trajectory_columns(t: *const LsbTrajectory, out_columns: *mut usize) -> LsbStatus {
    guard(|| {
        *out(out_columns, "out_columns")? = deref(t, "trajectory")?.header.len();
        Ok(LsbStatus::Ok)
    })
}

/// Column name, borrowed from the handle. Null when out of range.
///
/// # Safety
/// `t` must be a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn lsb_trajectory_column_name(t: *const LsbTrajectory, column: usize) -> *const c_char {
    let mut name = ptr::null();
    guard(|| {
        let t = deref(t, "trajectory")?;
        range(column, t.header.len(), "column")?;
        name = t.header[column].as_ptr();
        Ok(LsbStatus::Ok)
    });
    name
}

/// # Safety
/// `t` must be a live trajectory handle; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsb_trajectory_value(
    t: *const LsbTrajectory,
    row: usize,
    column: usize,
    out_value: *mut f64,
) -> LsbStatus {
    guard(|| {
        let t = deref(t, "trajectory")?;
        let slot = out(out_value, "out_value")?;
        range(row, t.rows.len(), "row")?;
        range(column, t.header.len(), "column")?;
        *slot = t.rows[row][column];
        Ok(LsbStatus::Ok)
    })
}

/// # Safety
/// `t` must be a live trajectory handle; `out_csv` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsb_trajectory_to_csv(t: *const LsbTrajectory, out_csv: *mut *mut c_char) -> LsbStatus {
    guard(|| {
        let slot = out(out_csv, "out_csv")?;
        *slot = owned_string(trajectory_csv(&deref(t, "trajectory")?.inner));
        Ok(LsbStatus::Ok)
    })
}

/// # Safety
/// `r` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn lsb_report_free(r: *mut LsbReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be a live report handle; `out_passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsb_report_passed(r: *const LsbReport, out_passed: *mut bool) -> LsbStatus {
    guard(|| {
        *out(out_passed, "out_passed")? = deref(r, "report")?.inner.passed();
        Ok(LsbStatus::Ok)
    })
}

/// # Safety
/// `r` must be a live report handle; `out_count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsb_report_check_count(r: *const LsbReport, out_count: *mut usize) -> LsbStatus {
    guard(|| {
        *out(out_count, "out_count")? = deref(r, "report")?.inner.checks.len();
        Ok(LsbStatus::Ok)
    })
}

/// # Safety
/// `r` must be a live report handle; `out_check` must be writable. The name
/// pointer stays valid while the report lives.
#[no_mangle]
pub unsafe extern "C" fn lsb_report_check(r: *const LsbReport, index: usize, out_check: *mut LsbCheck) -> LsbStatus {
    guard(|| {
        let r = deref(r, "report")?;
        let slot = out(out_check, "out_check")?;
        range(index, r.names.len(), "check")?;
        let c = &r.inner.checks[index];
        *slot = LsbCheck {
            name: r.names[index].as_ptr(),
            max_residual: c.max_residual,
            tolerance: c.tolerance,
            passed: c.passed,
        };
        Ok(LsbStatus::Ok)
    })
}

/// # Safety
/// `r` must be a live report handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsb_report_to_json(r: *const LsbReport, out_json: *mut *mut c_char) -> LsbStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = owned_string(report_json(&deref(r, "report")?.inner));
        Ok(LsbStatus::Ok)
    })
}

/// Group exponential of `xi` (3 coefficients), written row-major into
/// `out_matrix`, which must hold `n*n` entries (`n` = 3 for SO(3), else 2).
///
/// # Safety
/// `xi` must point to 3 values and `out_matrix` to `out_len` writable ones.
#[no_mangle]
pub unsafe extern "C" fn lsb_exp_map(
    group: LsbGroup,
    xi: *const LsbComplex,
    out_matrix: *mut LsbComplex,
    out_len: usize,
) -> LsbStatus {
    guard(|| {
        let g = GroupId::from(group);
        if xi.is_null() {
            return Err(null("xi"));
        }
        if out_matrix.is_null() {
            return Err(null("out_matrix"));
        }
        let n = g.dim();
        if out_len < n * n {
            return Err(Fail(LsbStatus::OutOfRange, format!("out_len {out_len} < {}", n * n)));
        }
        let c = std::slice::from_raw_parts(xi, 3);
        let m = exp_map(&AlgebraElement::new(g, [c[0].into(), c[1].into(), c[2].into()]));
        let dst = std::slice::from_raw_parts_mut(out_matrix, n * n);
        for i in 0..n {
            for j in 0..n {
                dst[i * n + j] = m.matrix()[(i, j)].into();
            }
        }
        Ok(LsbStatus::Ok)
    })
}

/// Symmetric closed-form `(x(t), p(t))`.
///
/// # Safety
/// `params` must be readable; `out_x` and `out_p` writable.
#[no_mangle]
pub unsafe extern "C" fn lsb_closed_form_symmetric(
    group: LsbGroup,
    params: *const LsbSymmetricParams,
    t: f64,
    out_x: *mut LsbComplex,
    out_p: *mut LsbComplex,
) -> LsbStatus {
    guard(|| {
        let p = deref(params, "params")?;
        let (ox, op) = (out(out_x, "out_x")?, out(out_p, "out_p")?);
        let params = SymmetricSolutionParams {
            inertia: p.inertia,
            inertia_zero: p.inertia_zero,
            connection: p.connection,
            xi_zero: p.xi_zero.into(),
            xi_plus0: p.xi_plus0.into(),
            xi_minus0: p.xi_minus0.into(),
        };
        let (x, pv) = closed_form_symmetric(group.into(), &params, t)?;
        *ox = x.into();
        *op = pv.into();
        Ok(LsbStatus::Ok)
    })
}

//! C ABI over `ncfourier`.
//!
//! Groups and duals are opaque heap handles released with their `_free`
//! function. Every fallible call returns an [`NcfStatus`]; on failure the
//! message is available from [`ncf_last_error`] on the same thread.
//!
//! Complex data crosses the boundary as interleaved `(re, im)` doubles. A
//! function on a group of order `n` is `2n` doubles; a block operator is its
//! blocks in irrep order, each row-major, `2 Σ d²` doubles in total.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ncfourier::fourier::{norm_a, norm_adelta, norm_agamma, BlockOperator, ScalarFunction};
use ncfourier::group::{FiniteGroup, GroupSpec};
use ncfourier::linalg::CMatrix;
use ncfourier::normcalc::{
    cb_norm_gamma_adjoint, cb_norm_gamma_check_adjoint, quotient_norm_projective, SolverConfig, SolverReport,
};
use ncfourier::rep::{compute_dual, UnitaryDual};
use ncfourier::verify::{run_check, CheckSpec, RunConfig};
use ncfourier::Error;
use num_complex::Complex64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Syntax = 4,
    NotAGroup = 5,
    DimensionMismatch = 6,
    UnknownCheck = 7,
    /// The call produced a result, but a solver did not close its bracket.
    NotConverged = 8,
    /// A verification check ran and failed; the report is still returned.
    CheckFailed = 9,
    NumericalFailure = 10,
    Io = 11,
    Panic = 12,
}

/// Opaque finite group.
pub struct NcfGroup {
    group: FiniteGroup,
}

/// Opaque unitary dual together with its group.
pub struct NcfDual {
    group: FiniteGroup,
    dual: UnitaryDual,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NcfSolverConfig {
    pub max_iter: usize,
    pub tol_rel: f64,
    pub seed: u64,
    pub admm_rho: f64,
    pub cone_damping: f64,
}

impl From<NcfSolverConfig> for SolverConfig {
    fn from(c: NcfSolverConfig) -> Self {
        SolverConfig {
            max_iter: c.max_iter,
            tol_rel: c.tol_rel,
            seed: c.seed,
            admm_rho: c.admm_rho,
            cone_damping: c.cone_damping,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NcfSolverReport {
    pub value: f64,
    pub lower_bracket: f64,
    pub upper_bracket: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

impl From<SolverReport> for NcfSolverReport {
    fn from(r: SolverReport) -> Self {
        NcfSolverReport {
            value: r.value,
            lower_bracket: r.lower_bracket,
            upper_bracket: r.upper_bracket,
            iterations: r.iterations,
            residual: r.residual,
            converged: r.converged,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NcfFunctionNorms {
    pub norm_a: f64,
    pub norm_adelta: f64,
    pub norm_agamma: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Internal failure: a status plus its message.
struct Failure(NcfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Syntax { .. } => NcfStatus::Syntax,
            Error::NotAGroup(_) => NcfStatus::NotAGroup,
            Error::DimensionMismatch(_) => NcfStatus::DimensionMismatch,
            Error::UnknownCheck(_) => NcfStatus::UnknownCheck,
            Error::ClusteringFailure { .. } | Error::Tolerance { .. } | Error::Internal(_) => {
                NcfStatus::NumericalFailure
            }
            Error::Io(_) => NcfStatus::Io,
            _ => NcfStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(NcfStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, recording failures and catching panics.
fn guard<F: FnOnce() -> Result<NcfStatus, Failure>>(body: F) -> NcfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            NcfStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Failure(NcfStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn read_complex(ptr: *const f64, count: usize, what: &str) -> Result<Vec<Complex64>, Failure> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    let raw = std::slice::from_raw_parts(ptr, 2 * count);
    Ok(raw.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect())
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn dual_ref<'a>(d: *const NcfDual) -> Result<&'a NcfDual, Failure> {
    d.as_ref().ok_or_else(|| null("dual"))
}

/// Message of the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ncf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ncf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a group from a spec such as `s:3` or `product:cyclic:2,q8`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncf_group_from_spec(spec: *const c_char, out: *mut *mut NcfGroup) -> NcfStatus {
    guard(|| {
        let spec: GroupSpec = read_str(spec, "spec")?.parse()?;
        let group = spec.build()?;
        write_out(out, Box::into_raw(Box::new(NcfGroup { group })), "out")?;
        Ok(NcfStatus::Ok)
    })
}

/// Builds a group from Cayley table text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncf_group_from_cayley(text: *const c_char, out: *mut *mut NcfGroup) -> NcfStatus {
    guard(|| {
        let group = FiniteGroup::parse_cayley(read_str(text, "text")?)?;
        write_out(out, Box::into_raw(Box::new(NcfGroup { group })), "out")?;
        Ok(NcfStatus::Ok)
    })
}

/// Order of `g`, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live group handle.
#[no_mangle]
pub unsafe extern "C" fn ncf_group_order(g: *const NcfGroup) -> usize {
    g.as_ref().map_or(0, |g| g.group.order())
}

/// # Safety
/// `g` must be null or a group handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ncf_group_free(g: *mut NcfGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Computes the unitary dual of `g`. The dual keeps its own copy of the group.
///
/// # Safety
/// `g` must be a live group handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncf_dual_compute(g: *const NcfGroup, seed: u64, out: *mut *mut NcfDual) -> NcfStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("group"))?;
        let dual = compute_dual(&g.group, seed)?;
        let handle = NcfDual {
            group: g.group.clone(),
            dual,
        };
        write_out(out, Box::into_raw(Box::new(handle)), "out")?;
        Ok(NcfStatus::Ok)
    })
}

/// Number of irreps, or 0 for a null handle.
///
/// # Safety
/// `d` must be null or a live dual handle.
#[no_mangle]
pub unsafe extern "C" fn ncf_dual_len(d: *const NcfDual) -> usize {
    d.as_ref().map_or(0, |d| d.dual.len())
}

/// Writes the irrep dimensions into `dims`, which holds `capacity` entries.
///
/// # Safety
/// `d` must be a live dual handle and `dims` valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn ncf_dual_dims(d: *const NcfDual, dims: *mut usize, capacity: usize) -> NcfStatus {
    guard(|| {
        let d = dual_ref(d)?;
        let values = d.dual.dims();
        if capacity < values.len() {
            return Err(Failure(
                NcfStatus::InvalidArgument,
                format!("capacity {capacity} is below the {} irreps", values.len()),
            ));
        }
        if dims.is_null() {
            return Err(null("dims"));
        }
        std::slice::from_raw_parts_mut(dims, values.len()).copy_from_slice(&values);
        Ok(NcfStatus::Ok)
    })
}

/// # Safety
/// `d` must be null or a dual handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ncf_dual_free(d: *mut NcfDual) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Defaults of the solvers.
#[no_mangle]
pub extern "C" fn ncf_solver_config_default() -> NcfSolverConfig {
    let c = SolverConfig::default();
    NcfSolverConfig {
        max_iter: c.max_iter,
        tol_rel: c.tol_rel,
        seed: c.seed,
        admm_rho: c.admm_rho,
        cone_damping: c.cone_damping,
    }
}

unsafe fn read_function(d: &NcfDual, values: *const f64, len: usize) -> Result<ScalarFunction, Failure> {
    if len != d.group.order() {
        return Err(Failure(
            NcfStatus::DimensionMismatch,
            format!("function has {len} values, group has order {}", d.group.order()),
        ));
    }
    Ok(ScalarFunction::new(read_complex(values, len, "values")?))
}

unsafe fn read_operator(d: &NcfDual, data: *const f64, len: usize) -> Result<BlockOperator, Failure> {
    let dims = d.dual.dims();
    let expected: usize = dims.iter().map(|k| 2 * k * k).sum();
    if len != expected {
        return Err(Failure(
            NcfStatus::DimensionMismatch,
            format!("operator needs {expected} doubles, got {len}"),
        ));
    }
    let flat = read_complex(data, len / 2, "data")?;
    let mut offset = 0;
    let blocks = dims
        .iter()
        .map(|&k| {
            let m = CMatrix::from_fn(k, k, |i, j| flat[offset + i * k + j]);
            offset += k * k;
            m
        })
        .collect();
    Ok(BlockOperator::new(&d.dual, blocks)?)
}

fn config(cfg: *const NcfSolverConfig) -> Result<SolverConfig, Failure> {
    // SAFETY: callers pass null or a pointer to a readable config.
    let c = unsafe { cfg.as_ref() }.map_or_else(SolverConfig::default, |c| (*c).into());
    c.validate()?;
    Ok(c)
}

fn report_status(r: &SolverReport) -> NcfStatus {
    if r.converged {
        NcfStatus::Ok
    } else {
        set_last_error("solver bracket did not close within tolerance");
        NcfStatus::NotConverged
    }
}

/// `‖u‖_A`, `‖u‖_{A_Δ}` and `‖u‖_{A_γ}` of a function given as `len`
/// interleaved complex values.
///
/// # Safety
/// `d` must be a live dual handle, `values` valid for `2 len` reads and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncf_function_norms(
    d: *const NcfDual,
    values: *const f64,
    len: usize,
    out: *mut NcfFunctionNorms,
) -> NcfStatus {
    guard(|| {
        let d = dual_ref(d)?;
        let u = read_function(d, values, len)?;
        let norms = NcfFunctionNorms {
            norm_a: norm_a(&d.dual, &u),
            norm_adelta: norm_adelta(&d.dual, &u),
            norm_agamma: norm_agamma(&d.dual, &u),
        };
        write_out(out, norms, "out")?;
        Ok(NcfStatus::Ok)
    })
}

/// Quotient norm of `u` through `A(G×G)` by ADMM. `cfg` may be null for the
/// defaults. The report is written even when the status is `NotConverged`.
///
/// # Safety
/// As for [`ncf_function_norms`]; `cfg` must be null or readable.
#[no_mangle]
pub unsafe extern "C" fn ncf_quotient_norm(
    d: *const NcfDual,
    values: *const f64,
    len: usize,
    cfg: *const NcfSolverConfig,
    out: *mut NcfSolverReport,
) -> NcfStatus {
    guard(|| {
        let d = dual_ref(d)?;
        let u = read_function(d, values, len)?;
        let cfg = config(cfg)?;
        let prod = UnitaryDual::product(&d.dual, &d.dual);
        let r = quotient_norm_projective(&d.group, &prod, &u, &cfg)?;
        write_out(out, r.into(), "out")?;
        Ok(report_status(&r))
    })
}

/// cb norm of `Γ*(T)` for a block operator of `len` doubles.
///
/// # Safety
/// `d` must be a live dual handle, `data` valid for `len` reads, `cfg` null
/// or readable and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncf_cb_norm_gamma_adjoint(
    d: *const NcfDual,
    data: *const f64,
    len: usize,
    cfg: *const NcfSolverConfig,
    out: *mut NcfSolverReport,
) -> NcfStatus {
    guard(|| {
        let d = dual_ref(d)?;
        let t = read_operator(d, data, len)?;
        let r = cb_norm_gamma_adjoint(&d.dual, &t, &config(cfg)?)?;
        write_out(out, r.into(), "out")?;
        Ok(report_status(&r))
    })
}

/// cb norm of `Γ̌*(T)` for a block operator of `len` doubles.
///
/// # Safety
/// As for [`ncf_cb_norm_gamma_adjoint`].
#[no_mangle]
pub unsafe extern "C" fn ncf_cb_norm_gamma_check_adjoint(
    d: *const NcfDual,
    data: *const f64,
    len: usize,
    cfg: *const NcfSolverConfig,
    out: *mut NcfSolverReport,
) -> NcfStatus {
    guard(|| {
        let d = dual_ref(d)?;
        let t = read_operator(d, data, len)?;
        let r = cb_norm_gamma_check_adjoint(&d.dual, &t, &config(cfg)?)?;
        write_out(out, r.into(), "out")?;
        Ok(report_status(&r))
    })
}

/// Runs one verification check on one group with its default trials and
/// tolerance, and returns the JSON report in `*json_out`, to be released
/// with [`ncf_string_free`]. The report is returned also when the status
/// is `CheckFailed` or `NotConverged`.
///
/// # Safety
/// `check_id` and `group_spec` must be NUL-terminated strings and
/// `json_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncf_verify_check(
    check_id: *const c_char,
    group_spec: *const c_char,
    seed: u64,
    json_out: *mut *mut c_char,
) -> NcfStatus {
    guard(|| {
        let id = read_str(check_id, "check_id")?;
        let group: GroupSpec = read_str(group_spec, "group_spec")?.parse()?;
        let cfg = RunConfig {
            seed,
            ..RunConfig::default()
        };
        let report = run_check(&CheckSpec::new(id, vec![group], &cfg)?)?;
        let text = serde_json::to_string(&report).map_err(Error::from)?;
        let c = CString::new(text).map_err(|e| Failure(NcfStatus::InvalidArgument, e.to_string()))?;
        write_out(json_out, c.into_raw(), "json_out")?;
        Ok(if !report.pass {
            set_last_error("check failed");
            NcfStatus::CheckFailed
        } else if !report.converged {
            set_last_error("solver bracket did not close within tolerance");
            NcfStatus::NotConverged
        } else {
            NcfStatus::Ok
        })
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ncf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

//! C interface to `lanfa`.
//!
//! Every fallible function returns a [`LanfaStatus`]; on failure the
//! message is available from [`lanfa_last_error`] on the same thread.
//! Objects are opaque handles created by `*_new`-style functions and
//! released with the matching `*_free`. Panics never cross the boundary;
//! they are reported as `LANFA_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lanfa::bounds::{bound_curve, quadform_curve, sqrt_pacman_constant, piecewise_constant, PiecewiseKind};
use lanfa::cli::RunConfig;
use lanfa::fa::{lanczos_fa, quadform};
use lanfa::function::ScalarFunction;
use lanfa::lanczos::{lanczos, LanczosFactorization, Precision};
use lanfa::linalg::{read_matrix_market, SymmetricOperator};
use lanfa::linsys::{cg_apriori_bound, indefinite_iteration_bound};
use lanfa::problems::{gen_outlier, gen_strakos, gen_uniform, gen_wishart};
use lanfa::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LanfaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    SingularShift = 4,
    Domain = 5,
    SingularIntegrand = 6,
    Enclosure = 7,
    Unsupported = 8,
    Numerical = 9,
    Io = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LanfaPrecision {
    Fp64 = 0,
    Fp32 = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LanfaPiecewise {
    /// `|x - a|`
    Abs = 0,
    /// `step(x - a)`
    Step = 1,
    /// `step(x - a) / x`
    StepOverX = 2,
}

/// Symmetric operator.
pub struct LanfaOperator(SymmetricOperator);

/// Lanczos factorization of an operator and a starting vector.
pub struct LanfaFactorization(LanczosFactorization);

/// One row of a bound curve. `fp_term` is NaN when the correction was not
/// requested.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanfaBoundRow {
    pub k: usize,
    pub true_err: f64,
    pub err_w: f64,
    pub res_w: f64,
    pub integral_term: f64,
    pub bound: f64,
    pub fp_term: f64,
    pub quad_err: f64,
}

/// One row of a quadratic-form bound curve.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanfaQuadformRow {
    pub k: usize,
    pub true_err: f64,
    pub res_w_sq: f64,
    pub integral_term: f64,
    pub bound: f64,
    pub quad_err: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LanfaStatus {
    match e {
        Error::Validation(_) | Error::Parse { .. } => LanfaStatus::InvalidArgument,
        Error::DimensionMismatch { .. } => LanfaStatus::DimensionMismatch,
        Error::SingularShift { .. } => LanfaStatus::SingularShift,
        Error::Domain { .. } => LanfaStatus::Domain,
        Error::SingularIntegrand { .. } => LanfaStatus::SingularIntegrand,
        Error::Enclosure(_) => LanfaStatus::Enclosure,
        Error::Unsupported(_) => LanfaStatus::Unsupported,
        Error::Numerical(_) => LanfaStatus::Numerical,
        Error::Io(_) => LanfaStatus::Io,
    }
}

/// Failure inside a wrapper: a library error or a bare status.
enum Fail {
    Lib(Error),
    Status(LanfaStatus, String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(LanfaStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> LanfaStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => LanfaStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            LanfaStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(LanfaStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn parse_function(spec: &str) -> Result<ScalarFunction, Fail> {
    Ok(ScalarFunction::parse(spec, || {
        Err(Error::Validation("piecewise functions need an explicit breakpoint here, e.g. step:0.5".into()))
    })?)
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lanfa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lanfa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Diagonal operator with the given `n` eigenvalues.
///
/// # Safety
/// `eigenvalues` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lanfa_operator_diagonal(
    eigenvalues: *const f64,
    n: usize,
    out: *mut *mut LanfaOperator,
) -> LanfaStatus {
    guard(|| {
        let e = slice(eigenvalues, n, "eigenvalues")?.to_vec();
        let op = SymmetricOperator::diagonal(e)?;
        write_out(out, boxed(LanfaOperator(op)), "out")
    })
}

/// Dense symmetric operator from `n * n` row-major entries.
///
/// # Safety
/// `data` must point to `n * n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lanfa_operator_dense(data: *const f64, n: usize, out: *mut *mut LanfaOperator) -> LanfaStatus {
    guard(|| {
        let len = n.checked_mul(n).ok_or_else(|| Fail::Status(LanfaStatus::InvalidArgument, "n * n overflows".into()))?;
        let d = slice(data, len, "data")?.to_vec();
        let op = SymmetricOperator::dense(n, d)?;
        write_out(out, boxed(LanfaOperator(op)), "out")
    })
}

/// Operator read from a Matrix Market file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lanfa_operator_read(path: *const c_char, out: *mut *mut LanfaOperator) -> LanfaStatus {
    guard(|| {
        let p = text(path, "path")?;
        let op = read_matrix_market(p)?;
        write_out(out, boxed(LanfaOperator(op)), "out")
    })
}

/// Uniformly spaced spectrum on `[lmin, lmax]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lanfa_operator_uniform(n: usize, lmin: f64, lmax: f64, out: *mut *mut LanfaOperator) -> LanfaStatus {
    guard(|| write_out(out, boxed(LanfaOperator(gen_uniform(n, lmin, lmax)?)), "out"))
}

/// Strakos spectrum with largest eigenvalue `lambda1`, smallest `lambdan`
/// and clustering parameter `rho`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lanfa_operator_strakos(
    n: usize,
    lambda1: f64,
    lambdan: f64,
    rho: f64,
    out: *mut *mut LanfaOperator,
) -> LanfaStatus {
    guard(|| write_out(out, boxed(LanfaOperator(gen_strakos(n, lambda1, lambdan, rho)?)), "out"))
}

/// Wishart matrix `X X^T`, `X` of size `n x m`, from `seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lanfa_operator_wishart(n: usize, m: usize, seed: u64, out: *mut *mut LanfaOperator) -> LanfaStatus {
    guard(|| write_out(out, boxed(LanfaOperator(gen_wishart(n, m, seed)?)), "out"))
}

/// `n - 1` eigenvalues uniform on `[0, 1]` plus one at `kappa`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lanfa_operator_outlier(n: usize, kappa: f64, out: *mut *mut LanfaOperator) -> LanfaStatus {
    guard(|| write_out(out, boxed(LanfaOperator(gen_outlier(n, kappa)?)), "out"))
}

/// Dimension of the operator, or 0 for a null handle.
///
/// # Safety
/// `op` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lanfa_operator_dim(op: *const LanfaOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.dim())
}

/// `y = A x`.
///
/// # Safety
/// `x` and `y` must each hold `n` doubles, `n` the operator dimension.
#[no_mangle]
pub unsafe extern "C" fn lanfa_operator_apply(op: *const LanfaOperator, x: *const f64, y: *mut f64, n: usize) -> LanfaStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("op"))?;
        if n != op.0.dim() {
            return Err(Error::DimensionMismatch { expected: op.0.dim(), got: n }.into());
        }
        let v = op.0.apply(slice(x, n, "x")?);
        if y.is_null() {
            return Err(null("y"));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), y, n);
        Ok(())
    })
}

/// # Safety
/// `op` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lanfa_operator_free(op: *mut LanfaOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Runs `k` Lanczos steps from `b` (length `n`).
///
/// # Safety
/// `op` must be a live handle, `b` must hold `n` doubles and `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn lanfa_lanczos(
    op: *const LanfaOperator,
    b: *const f64,
    n: usize,
    k: usize,
    reorth: bool,
    precision: LanfaPrecision,
    out: *mut *mut LanfaFactorization,
) -> LanfaStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("op"))?;
        let b = slice(b, n, "b")?;
        let p = match precision {
            LanfaPrecision::Fp64 => Precision::Fp64,
            LanfaPrecision::Fp32 => Precision::Fp32,
        };
        let f = lanczos(&op.0, b, k, reorth, p)?;
        write_out(out, boxed(LanfaFactorization(f)), "out")
    })
}

/// Number of completed steps, or 0 for a null handle.
///
/// # Safety
/// `fact` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lanfa_factorization_steps(fact: *const LanfaFactorization) -> usize {
    fact.as_ref().map_or(0, |f| f.0.steps())
}

/// Writes the Ritz values in increasing order. `cap` is the capacity of
/// `out`; with too small a buffer nothing is written and `*written` holds
/// the required length.
///
/// # Safety
/// `fact` must be a live handle, `out` must hold `cap` doubles and
/// `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lanfa_factorization_ritz(
    fact: *const LanfaFactorization,
    out: *mut f64,
    cap: usize,
    written: *mut usize,
) -> LanfaStatus {
    guard(|| {
        let fact = fact.as_ref().ok_or_else(|| null("fact"))?;
        let r = fact.0.ritz_values()?;
        copy_sized(&r, out, cap, written)
    })
}

unsafe fn copy_sized<T: Copy>(v: &[T], out: *mut T, cap: usize, written: *mut usize) -> Result<(), Fail> {
    write_out(written, v.len(), "written")?;
    if v.len() > cap {
        return Err(Fail::Status(LanfaStatus::BufferTooSmall, format!("buffer holds {cap}, need {}", v.len())));
    }
    if !v.is_empty() {
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), out, v.len());
    }
    Ok(())
}

/// # Safety
/// `fact` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lanfa_factorization_free(fact: *mut LanfaFactorization) {
    if !fact.is_null() {
        drop(Box::from_raw(fact));
    }
}

/// Lanczos-FA approximation `||b|| Q f(T) e_1` of `f(A) b`, written to
/// `out` of length `n` (the operator dimension). `function` uses the
/// command-line syntax, e.g. `sqrt`, `invpow:2`, `step:0.5`.
///
/// # Safety
/// `fact` must be a live handle, `function` NUL-terminated and `out` must
/// hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn lanfa_fa(
    fact: *const LanfaFactorization,
    function: *const c_char,
    out: *mut f64,
    n: usize,
) -> LanfaStatus {
    guard(|| {
        let fact = fact.as_ref().ok_or_else(|| null("fact"))?;
        let f = parse_function(text(function, "function")?)?;
        let v = lanczos_fa(&fact.0, &f)?;
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: v.len(), got: n }.into());
        }
        let mut w = 0;
        copy_sized(&v, out, n, &mut w)
    })
}

/// Gauss quadrature estimate `||b||^2 e_1^T f(T) e_1` of `b^T f(A) b`.
///
/// # Safety
/// `fact` must be a live handle, `function` NUL-terminated and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn lanfa_quadform(fact: *const LanfaFactorization, function: *const c_char, out: *mut f64) -> LanfaStatus {
    guard(|| {
        let fact = fact.as_ref().ok_or_else(|| null("fact"))?;
        let f = parse_function(text(function, "function")?)?;
        write_out(out, quadform(&fact.0, &f)?, "out")
    })
}

/// Closed-form constant of the square-root bound on the Pac-Man contour
/// with `w = 0` and the slit radius tending to zero.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lanfa_sqrt_pacman_constant(k: usize, lambda_max: f64, out: *mut f64) -> LanfaStatus {
    guard(|| write_out(out, sqrt_pacman_constant(k, lambda_max)?, "out"))
}

/// Constant of the piecewise bounds on a double circle touching at `a`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lanfa_piecewise_constant(
    kind: LanfaPiecewise,
    a: f64,
    lambda_min: f64,
    lambda_max: f64,
    out: *mut f64,
) -> LanfaStatus {
    guard(|| {
        let kind = match kind {
            LanfaPiecewise::Abs => PiecewiseKind::Abs,
            LanfaPiecewise::Step => PiecewiseKind::Step,
            LanfaPiecewise::StepOverX => PiecewiseKind::StepOverX,
        };
        write_out(out, piecewise_constant(kind, a, lambda_min, lambda_max)?, "out")
    })
}

/// `2 ((sqrt(kappa) - 1) / (sqrt(kappa) + 1))^k`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lanfa_cg_bound(kappa: f64, k: usize, out: *mut f64) -> LanfaStatus {
    guard(|| write_out(out, cg_apriori_bound(kappa, k)?, "out"))
}

/// Iteration count after which some Galerkin residual on `[a, b] U [c, d]`
/// is below `eps`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lanfa_indefinite_iterations(a: f64, b: f64, c: f64, d: f64, eps: f64, out: *mut f64) -> LanfaStatus {
    guard(|| write_out(out, indefinite_iteration_bound(a, b, c, d, eps)?.k_bound, "out"))
}

unsafe fn settings(toml: *const c_char) -> Result<RunConfig, Fail> {
    if toml.is_null() {
        return Ok(RunConfig::default());
    }
    Ok(RunConfig::from_toml_str(text(toml, "settings")?)?)
}

/// Bound curve for `||f(A) b - lan_k||`, `k = 1..=kmax`. `settings` is
/// TOML with the keys of the command-line config file (`f`, `contour`,
/// `w`, `norm`, `sets`, `kmax`, ...), or null for defaults; problem keys
/// are ignored. Rows go to `rows` (capacity `cap`); `*written` receives
/// the row count, or the required capacity with `LANFA_STATUS_BUFFER_TOO_SMALL`.
///
/// # Safety
/// `op` must be a live handle, `b` must hold `n` doubles, `settings` must
/// be null or NUL-terminated, `rows` must hold `cap` rows and `written`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn lanfa_bound_curve(
    op: *const LanfaOperator,
    b: *const f64,
    n: usize,
    settings_toml: *const c_char,
    rows: *mut LanfaBoundRow,
    cap: usize,
    written: *mut usize,
) -> LanfaStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("op"))?;
        let b = slice(b, n, "b")?;
        let (cfg, _) = settings(settings_toml)?.resolve_bound(&op.0, false)?;
        let report = bound_curve(&op.0, b, &cfg)?;
        let out: Vec<LanfaBoundRow> = report
            .rows
            .iter()
            .map(|r| LanfaBoundRow {
                k: r.k,
                true_err: r.true_err,
                err_w: r.err_w_norm,
                res_w: r.res_w_norm_2,
                integral_term: r.integral_term,
                bound: r.bound_value,
                fp_term: r.fp_term.unwrap_or(f64::NAN),
                quad_err: r.quad_err_estimate,
            })
            .collect();
        copy_sized(&out, rows, cap, written)
    })
}

/// Bound curve for `|b^T f(A) b - ||b||^2 e_1^T f(T_k) e_1|`; arguments as
/// for [`lanfa_bound_curve`].
///
/// # Safety
/// As for [`lanfa_bound_curve`].
#[no_mangle]
pub unsafe extern "C" fn lanfa_quadform_curve(
    op: *const LanfaOperator,
    b: *const f64,
    n: usize,
    settings_toml: *const c_char,
    rows: *mut LanfaQuadformRow,
    cap: usize,
    written: *mut usize,
) -> LanfaStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("op"))?;
        let b = slice(b, n, "b")?;
        let (cfg, _) = settings(settings_toml)?.resolve_bound(&op.0, true)?;
        let report = quadform_curve(&op.0, b, &cfg)?;
        let out: Vec<LanfaQuadformRow> = report
            .rows
            .iter()
            .map(|r| LanfaQuadformRow {
                k: r.k,
                true_err: r.true_qf_err,
                res_w_sq: r.res_w_sq,
                integral_term: r.integral_term,
                bound: r.bound_value,
                quad_err: r.quad_err_estimate,
            })
            .collect();
        copy_sized(&out, rows, cap, written)
    })
}

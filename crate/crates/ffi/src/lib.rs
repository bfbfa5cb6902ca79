//! C ABI over the `pqbern` operator library.
//!
//! Every fallible function returns a [`PqbStatus`] and writes its result through
//! an out-pointer. On failure the message is kept per thread and can be read with
//! [`pqb_last_error`]. Handles are opaque and must be released with their `_free`
//! function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use pqbern::bivariate::{BiOperator, BiParams};
use pqbern::pq_core::{pq_binomial, pq_integer};
use pqbern::schedule::ParamSchedule;
use pqbern::target::TargetFunction;
use pqbern::univariate::{uni_basis, uni_central_moment, uni_moment_closed, UniOperator};
use pqbern::{Error, PQPair};

/// Result of every fallible call. Nonzero values leave the out-pointers untouched.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PqbStatus {
    Ok = 0,
    NullPointer = 1,
    /// `0 < q < p <= 1` violated.
    InvalidPair = 2,
    InvalidParameter = 3,
    /// Argument outside the domain, e.g. `x` outside `[0, 1]` or a moment order above 4.
    Domain = 4,
    IndexOutOfRange = 5,
    Parse = 6,
    /// The target function failed at a node, e.g. `sqrt` of a negative number.
    Eval = 7,
    BufferTooSmall = 8,
    Internal = 9,
}

/// A target function of `(x, y)`: corpus entry or parsed expression.
pub struct PqbFunction {
    inner: TargetFunction,
}

/// A bivariate operator with fixed degrees and parameter pairs.
pub struct PqbOperator {
    inner: BiOperator,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PqbStatus {
    match e {
        Error::InvalidPair { .. } => PqbStatus::InvalidPair,
        Error::InvalidParameter(_) => PqbStatus::InvalidParameter,
        Error::Domain(_) | Error::Hypothesis { .. } => PqbStatus::Domain,
        Error::IndexOutOfRange(_) => PqbStatus::IndexOutOfRange,
        Error::Parse(_) => PqbStatus::Parse,
        Error::Eval(_) => PqbStatus::Eval,
        _ => PqbStatus::Internal,
    }
}

fn fail(status: PqbStatus, msg: impl Into<String>) -> PqbStatus {
    set_error(msg.into());
    status
}

/// Runs `body`, mapping errors and panics to status codes.
fn guard(body: impl FnOnce() -> Result<(), PqbStatus>) -> PqbStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PqbStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(PqbStatus::Internal, "internal panic"),
    }
}

fn lift<T>(r: pqbern::Result<T>) -> Result<T, PqbStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn out_ref<'a, T>(ptr: *mut T) -> Result<&'a mut T, PqbStatus> {
    // SAFETY: callers pass either NULL or a pointer valid for writes.
    unsafe { ptr.as_mut() }.ok_or_else(|| fail(PqbStatus::NullPointer, "output pointer is NULL"))
}

fn in_ref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, PqbStatus> {
    // SAFETY: callers pass either NULL or a live handle from this library.
    unsafe { ptr.as_ref() }.ok_or_else(|| fail(PqbStatus::NullPointer, format!("{what} is NULL")))
}

fn in_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, PqbStatus> {
    if ptr.is_null() {
        return Err(fail(PqbStatus::NullPointer, format!("{what} is NULL")));
    }
    // SAFETY: non-NULL and NUL-terminated by contract.
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| fail(PqbStatus::InvalidParameter, format!("{what} is not UTF-8")))
}

fn pair(p: f64, q: f64) -> Result<PQPair, PqbStatus> {
    lift(PQPair::new(p, q))
}

/// Message of the last failure on this thread, or NULL. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn pqb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pqb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `[n]_{p,q}`.
///
/// # Safety
/// `out` must be NULL or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn pqb_pq_integer(n: u32, p: f64, q: f64, out: *mut f64) -> PqbStatus {
    guard(|| {
        let pq = pair(p, q)?;
        *out_ref(out)? = pq_integer(n, &pq);
        Ok(())
    })
}

/// The (p,q)-binomial coefficient `[n over k]_{p,q}`.
///
/// # Safety
/// `out` must be NULL or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn pqb_pq_binomial(
    n: u32,
    k: u32,
    p: f64,
    q: f64,
    out: *mut f64,
) -> PqbStatus {
    guard(|| {
        let pq = pair(p, q)?;
        *out_ref(out)? = lift(pq_binomial(n, k, &pq))?;
        Ok(())
    })
}

/// Basis weight `R_{n,k}(x)`.
///
/// # Safety
/// `out` must be NULL or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn pqb_uni_basis(
    n: u32,
    k: u32,
    x: f64,
    p: f64,
    q: f64,
    out: *mut f64,
) -> PqbStatus {
    guard(|| {
        let pq = pair(p, q)?;
        *out_ref(out)? = lift(uni_basis(n, k, &x, &pq))?;
        Ok(())
    })
}

/// All `n + 1` basis weights at `x` into `out[0..len]`; `len` must be at least `n + 1`.
///
/// # Safety
/// `out` must be NULL or valid for writing `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pqb_uni_basis_row(
    n: u32,
    x: f64,
    p: f64,
    q: f64,
    out: *mut f64,
    len: usize,
) -> PqbStatus {
    guard(|| {
        let op = lift(UniOperator::new(n, pair(p, q)?))?;
        let row = lift(op.weights(&x))?;
        if out.is_null() {
            return Err(fail(PqbStatus::NullPointer, "output buffer is NULL"));
        }
        if len < row.len() {
            return Err(fail(
                PqbStatus::BufferTooSmall,
                format!("need {} slots, got {len}", row.len()),
            ));
        }
        // SAFETY: `out` is non-NULL and valid for `len >= row.len()` writes.
        unsafe { std::slice::from_raw_parts_mut(out, row.len()) }.copy_from_slice(&row);
        Ok(())
    })
}

/// Image of `t^i`, `i <= 4`, under the univariate operator.
///
/// # Safety
/// `out` must be NULL or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn pqb_uni_moment(
    i: u32,
    n: u32,
    x: f64,
    p: f64,
    q: f64,
    out: *mut f64,
) -> PqbStatus {
    guard(|| {
        let pq = pair(p, q)?;
        *out_ref(out)? = lift(uni_moment_closed(i, n, &x, &pq))?;
        Ok(())
    })
}

/// Image of `(t - x)^r`, `r <= 4`, under the univariate operator.
///
/// # Safety
/// `out` must be NULL or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn pqb_uni_central_moment(
    r: u32,
    n: u32,
    x: f64,
    p: f64,
    q: f64,
    out: *mut f64,
) -> PqbStatus {
    guard(|| {
        let pq = pair(p, q)?;
        *out_ref(out)? = lift(uni_central_moment(r, n, &x, &pq))?;
        Ok(())
    })
}

/// `(p_n, q_n)` of a named schedule: `i`, `ii`, `iii` or `fixed:P,Q`.
///
/// # Safety
/// `schedule` must be NULL or a NUL-terminated string; `p` and `q` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn pqb_schedule_pair(
    schedule: *const c_char,
    n: u32,
    p: *mut f64,
    q: *mut f64,
) -> PqbStatus {
    guard(|| {
        let s: ParamSchedule = lift(in_str(schedule, "schedule")?.parse())?;
        let pq = lift(s.pair(n))?;
        let (p, q) = (out_ref(p)?, out_ref(q)?);
        *p = *pq.p();
        *q = *pq.q();
        Ok(())
    })
}

/// Parses an expression in `x` and `y`.
///
/// # Safety
/// `expr` must be NULL or a NUL-terminated string; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn pqb_function_parse(
    expr: *const c_char,
    out: *mut *mut PqbFunction,
) -> PqbStatus {
    guard(|| {
        let f = lift(TargetFunction::from_expr(in_str(expr, "expression")?))?;
        *out_ref(out)? = Box::into_raw(Box::new(PqbFunction { inner: f }));
        Ok(())
    })
}

/// Looks up a corpus function by name.
///
/// # Safety
/// `name` must be NULL or a NUL-terminated string; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn pqb_function_builtin(
    name: *const c_char,
    out: *mut *mut PqbFunction,
) -> PqbStatus {
    guard(|| {
        let name = in_str(name, "name")?;
        let f = TargetFunction::by_name(name).ok_or_else(|| {
            fail(
                PqbStatus::InvalidParameter,
                format!("unknown corpus function {name:?}"),
            )
        })?;
        *out_ref(out)? = Box::into_raw(Box::new(PqbFunction { inner: f }));
        Ok(())
    })
}

/// # Safety
/// `f` must be NULL or a live handle; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn pqb_function_eval(
    f: *const PqbFunction,
    x: f64,
    y: f64,
    out: *mut f64,
) -> PqbStatus {
    guard(|| {
        let f = in_ref(f, "function")?;
        *out_ref(out)? = lift(f.inner.eval(x, y).map_err(Error::from))?;
        Ok(())
    })
}

/// Releases a function handle. NULL is ignored.
///
/// # Safety
/// `f` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn pqb_function_free(f: *mut PqbFunction) {
    if !f.is_null() {
        // SAFETY: `f` came from `Box::into_raw` in this library and is freed once.
        drop(unsafe { Box::from_raw(f) });
    }
}

/// Operator of degrees `(n, m)` with pairs `(p1, q1)` in `x` and `(p2, q2)` in `y`.
///
/// # Safety
/// `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn pqb_operator_new(
    n: u32,
    m: u32,
    p1: f64,
    q1: f64,
    p2: f64,
    q2: f64,
    out: *mut *mut PqbOperator,
) -> PqbStatus {
    guard(|| {
        let params = lift(BiParams::new(pair(p1, q1)?, pair(p2, q2)?, n, m))?;
        let op = lift(BiOperator::new(params))?;
        *out_ref(out)? = Box::into_raw(Box::new(PqbOperator { inner: op }));
        Ok(())
    })
}

/// `B_{n,m} f(x, y)`.
///
/// # Safety
/// `op` and `f` must be NULL or live handles; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn pqb_operator_apply(
    op: *const PqbOperator,
    f: *const PqbFunction,
    x: f64,
    y: f64,
    out: *mut f64,
) -> PqbStatus {
    guard(|| {
        let op = in_ref(op, "operator")?;
        let f = in_ref(f, "function")?;
        let v = op
            .inner
            .apply(&x, &y, |s, t| f.inner.eval(*s, *t).map_err(Error::from));
        *out_ref(out)? = lift(v)?;
        Ok(())
    })
}

/// Releases an operator handle. NULL is ignored.
///
/// # Safety
/// `op` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn pqb_operator_free(op: *mut PqbOperator) {
    if !op.is_null() {
        // SAFETY: `op` came from `Box::into_raw` in this library and is freed once.
        drop(unsafe { Box::from_raw(op) });
    }
}

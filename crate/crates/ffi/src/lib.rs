//! C ABI for the exact splitting laboratory.
//!
//! Everything the library hands out is an opaque handle (`tl_matrix`,
//! `tl_decomposition`, `tl_operator`, `tl_function`) created through an
//! out-pointer and released with the matching `tl_*_free`. Every fallible
//! call returns a [`TlStatus`]; the nonzero values mirror the CLI exit
//! codes (2 hypothesis violated, 3 decomposition failed, 4 term
//! explosion, 5 invalid argument) plus FFI-specific codes for null
//! pointers and caught panics. After a failure,
//! [`tl_last_error_message`] returns a human-readable description for
//! the calling thread.
//!
//! The C prototypes live in `include/trotterlab.h`, which is written by
//! hand and locked to this file by a consistency test.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use trotterlab::experiments::{divergence_experiment, ExperimentError};
use trotterlab::funcspace::{bump_direction, VectorFunction};
use trotterlab::report::{divergence_json, Meta};
use trotterlab::spectral::{
    check_hypothesis, decompose, HypothesisError, SpectralDecomposition, SquareMatrix,
};
use trotterlab::transport::{
    apply, compose, from_semigroup, norm_bounds, operator_distance, trotter_operator,
    vanishing_edge, TransportError, TransportOperator,
};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TlStatus {
    /// The call succeeded.
    Ok = 0,
    /// The eigenvalue-gap hypothesis does not hold for the given pair.
    HypothesisViolated = 2,
    /// A matrix has no real eigendecomposition or is too ill-conditioned.
    DecompositionFailed = 3,
    /// An exact product would exceed the term cap.
    TermExplosion = 4,
    /// A value argument is out of range or dimensions do not match.
    InvalidArgument = 5,
    /// A required pointer argument was null.
    NullPointer = 6,
    /// A panic was caught at the boundary; state may be inconsistent.
    Panic = 7,
}

/// Opaque handle to a real square matrix.
pub struct TlMatrix(SquareMatrix);
/// Opaque handle to an eigendecomposition.
pub struct TlDecomposition(SpectralDecomposition);
/// Opaque handle to a finite matrix-weighted shift operator.
pub struct TlOperator(TransportOperator);
/// Opaque handle to a finite-term vector-valued function.
pub struct TlFunction(VectorFunction);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained NUL").expect("static"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Record the message and hand back the status, for `return Err(...)`.
fn fail(status: TlStatus, message: impl std::fmt::Display) -> TlStatus {
    set_error(message.to_string());
    status
}

/// Run a body that may use `?`, catching panics at the ABI boundary.
fn guard(body: impl FnOnce() -> Result<TlStatus, TlStatus>) -> TlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            fail(TlStatus::Panic, format!("caught panic: {msg}"))
        }
    }
}

/// # Safety
/// `ptr` must be null or valid for reads for the call's duration.
unsafe fn ref_arg<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, TlStatus> {
    unsafe { ptr.as_ref() }.ok_or_else(|| fail(TlStatus::NullPointer, format!("{name} is null")))
}

/// # Safety
/// `ptr` must be null or valid for writes for the call's duration.
unsafe fn out_arg<'a, T>(ptr: *mut T, name: &str) -> Result<&'a mut T, TlStatus> {
    unsafe { ptr.as_mut() }.ok_or_else(|| fail(TlStatus::NullPointer, format!("{name} is null")))
}

fn require_finite(name: &str, value: f64) -> Result<(), TlStatus> {
    if !value.is_finite() {
        return Err(fail(
            TlStatus::InvalidArgument,
            format!("{name} must be finite (got {value})"),
        ));
    }
    Ok(())
}

fn require_tol(tol: f64) -> Result<(), TlStatus> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(fail(
            TlStatus::InvalidArgument,
            format!("tol must be positive and finite (got {tol})"),
        ));
    }
    Ok(())
}

fn transport_status(e: &TransportError) -> TlStatus {
    match e {
        TransportError::TermExplosion { .. } => TlStatus::TermExplosion,
        _ => TlStatus::InvalidArgument,
    }
}

fn hypothesis_status(e: &HypothesisError) -> TlStatus {
    match e {
        HypothesisError::Decomposition { .. } => TlStatus::DecompositionFailed,
        _ => TlStatus::InvalidArgument,
    }
}

fn experiment_status(e: &ExperimentError) -> TlStatus {
    match e {
        ExperimentError::HypothesisViolated { .. } => TlStatus::HypothesisViolated,
        ExperimentError::Hypothesis(inner) => hypothesis_status(inner),
        ExperimentError::Transport(inner) => transport_status(inner),
        _ => TlStatus::InvalidArgument,
    }
}

/// The library version as a static NUL-terminated string; never freed.
#[no_mangle]
pub extern "C" fn tl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message from the most recent failed call on this thread, or null.
/// The caller owns the returned string and must release it with
/// [`tl_string_free`].
#[no_mangle]
pub extern "C" fn tl_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(c) => c.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Release a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library's
/// string-returning calls, released at most once.
#[no_mangle]
pub unsafe extern "C" fn tl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Create an `n`×`n` matrix from row-major entries.
///
/// # Safety
/// `entries` must point to `n * n` readable doubles and `out` must be
/// writable. On success `*out` owns the matrix; release it with
/// [`tl_matrix_free`].
#[no_mangle]
pub unsafe extern "C" fn tl_matrix_new(
    n: usize,
    entries: *const f64,
    out: *mut *mut TlMatrix,
) -> TlStatus {
    guard(|| {
        let out = unsafe { out_arg(out, "out") }?;
        if entries.is_null() {
            return Err(fail(TlStatus::NullPointer, "entries is null"));
        }
        if n == 0 {
            return Err(fail(TlStatus::InvalidArgument, "n must be at least 1"));
        }
        let len = n
            .checked_mul(n)
            .ok_or_else(|| fail(TlStatus::InvalidArgument, "n * n overflows"))?;
        let data = unsafe { slice::from_raw_parts(entries, len) };
        let m = SquareMatrix::from_row_slice(n, data)
            .map_err(|e| fail(TlStatus::InvalidArgument, e))?;
        *out = Box::into_raw(Box::new(TlMatrix(m)));
        Ok(TlStatus::Ok)
    })
}

/// Release a matrix handle. Null is a no-op.
///
/// # Safety
/// `m` must be null or a handle from this library, released at most once.
#[no_mangle]
pub unsafe extern "C" fn tl_matrix_free(m: *mut TlMatrix) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Eigendecompose a matrix with the given tolerance.
///
/// # Safety
/// `m` must be a valid matrix handle and `out` writable. On success
/// `*out` owns the decomposition; release it with
/// [`tl_decomposition_free`].
#[no_mangle]
pub unsafe extern "C" fn tl_decompose(
    m: *const TlMatrix,
    tol: f64,
    out: *mut *mut TlDecomposition,
) -> TlStatus {
    guard(|| {
        let out = unsafe { out_arg(out, "out") }?;
        let m = unsafe { ref_arg(m, "m") }?;
        require_tol(tol)?;
        let d = decompose(&m.0, tol).map_err(|e| fail(TlStatus::DecompositionFailed, e))?;
        *out = Box::into_raw(Box::new(TlDecomposition(d)));
        Ok(TlStatus::Ok)
    })
}

/// Dimension of the decomposed matrix; 0 if `d` is null.
///
/// # Safety
/// `d` must be null or a valid decomposition handle.
#[no_mangle]
pub unsafe extern "C" fn tl_decomposition_n(d: *const TlDecomposition) -> usize {
    match unsafe { d.as_ref() } {
        Some(d) => d.0.n(),
        None => {
            set_error("d is null".to_string());
            0
        }
    }
}

/// Copy the eigenvalues, ascending, into `out` (length ≥ n).
///
/// # Safety
/// `d` must be a valid decomposition handle and `out` must point to at
/// least `tl_decomposition_n(d)` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tl_decomposition_eigenvalues(
    d: *const TlDecomposition,
    out: *mut f64,
) -> TlStatus {
    guard(|| {
        let d = unsafe { ref_arg(d, "d") }?;
        if out.is_null() {
            return Err(fail(TlStatus::NullPointer, "out is null"));
        }
        let dst = unsafe { slice::from_raw_parts_mut(out, d.0.n()) };
        dst.copy_from_slice(d.0.eigenvalues());
        Ok(TlStatus::Ok)
    })
}

/// Release a decomposition handle. Null is a no-op.
///
/// # Safety
/// `d` must be null or a handle from this library, released at most once.
#[no_mangle]
pub unsafe extern "C" fn tl_decomposition_free(d: *mut TlDecomposition) {
    if !d.is_null() {
        drop(unsafe { Box::from_raw(d) });
    }
}

/// Check the eigenvalue-gap hypothesis for the pair `(a, b)`. Writes the
/// gap and the verdict; an unsatisfied gap is still [`TlStatus::Ok`].
///
/// # Safety
/// `a` and `b` must be valid matrix handles; `gap_out` and
/// `satisfied_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_check_gap(
    a: *const TlMatrix,
    b: *const TlMatrix,
    tol: f64,
    gap_out: *mut f64,
    satisfied_out: *mut bool,
) -> TlStatus {
    guard(|| {
        let gap_out = unsafe { out_arg(gap_out, "gap_out") }?;
        let satisfied_out = unsafe { out_arg(satisfied_out, "satisfied_out") }?;
        let a = unsafe { ref_arg(a, "a") }?;
        let b = unsafe { ref_arg(b, "b") }?;
        require_tol(tol)?;
        let report =
            check_hypothesis(&a.0, &b.0, tol).map_err(|e| fail(hypothesis_status(&e), e))?;
        *gap_out = report.gap;
        *satisfied_out = report.satisfied;
        Ok(TlStatus::Ok)
    })
}

/// The exact solution operator at time `t` for the decomposed system.
///
/// # Safety
/// `d` must be a valid decomposition handle and `out` writable. On
/// success `*out` owns the operator; release it with
/// [`tl_operator_free`].
#[no_mangle]
pub unsafe extern "C" fn tl_semigroup_operator(
    d: *const TlDecomposition,
    t: f64,
    out: *mut *mut TlOperator,
) -> TlStatus {
    guard(|| {
        let out = unsafe { out_arg(out, "out") }?;
        let d = unsafe { ref_arg(d, "d") }?;
        require_finite("t", t)?;
        *out = Box::into_raw(Box::new(TlOperator(from_semigroup(&d.0, t))));
        Ok(TlStatus::Ok)
    })
}

/// The exact splitting product `[S(t/m) T(t/m)]^m`.
///
/// # Safety
/// `da` and `db` must be valid decomposition handles and `out` writable.
/// On success `*out` owns the operator; release it with
/// [`tl_operator_free`].
#[no_mangle]
pub unsafe extern "C" fn tl_trotter_operator(
    da: *const TlDecomposition,
    db: *const TlDecomposition,
    t: f64,
    m: usize,
    out: *mut *mut TlOperator,
) -> TlStatus {
    guard(|| {
        let out = unsafe { out_arg(out, "out") }?;
        let da = unsafe { ref_arg(da, "da") }?;
        let db = unsafe { ref_arg(db, "db") }?;
        require_finite("t", t)?;
        if m == 0 {
            return Err(fail(TlStatus::InvalidArgument, "m must be at least 1"));
        }
        let op = trotter_operator(&da.0, &db.0, t, m).map_err(|e| fail(transport_status(&e), e))?;
        *out = Box::into_raw(Box::new(TlOperator(op)));
        Ok(TlStatus::Ok)
    })
}

/// Compose two operators: the result acts as `a` after `b`.
///
/// # Safety
/// `a` and `b` must be valid operator handles and `out` writable. On
/// success `*out` owns the operator; release it with
/// [`tl_operator_free`].
#[no_mangle]
pub unsafe extern "C" fn tl_operator_compose(
    a: *const TlOperator,
    b: *const TlOperator,
    out: *mut *mut TlOperator,
) -> TlStatus {
    guard(|| {
        let out = unsafe { out_arg(out, "out") }?;
        let a = unsafe { ref_arg(a, "a") }?;
        let b = unsafe { ref_arg(b, "b") }?;
        let op = compose(&a.0, &b.0).map_err(|e| fail(transport_status(&e), e))?;
        *out = Box::into_raw(Box::new(TlOperator(op)));
        Ok(TlStatus::Ok)
    })
}

/// Number of shift terms in the operator; 0 if `op` is null.
///
/// # Safety
/// `op` must be null or a valid operator handle.
#[no_mangle]
pub unsafe extern "C" fn tl_operator_term_count(op: *const TlOperator) -> usize {
    match unsafe { op.as_ref() } {
        Some(op) => op.0.term_count(),
        None => {
            set_error("op is null".to_string());
            0
        }
    }
}

/// Dimension the operator acts on; 0 if `op` is null.
///
/// # Safety
/// `op` must be null or a valid operator handle.
#[no_mangle]
pub unsafe extern "C" fn tl_operator_n(op: *const TlOperator) -> usize {
    match unsafe { op.as_ref() } {
        Some(op) => op.0.n(),
        None => {
            set_error("op is null".to_string());
            0
        }
    }
}

/// Support certificate: inputs vanishing on `x ≤ a` map to outputs
/// vanishing on `x ≤ *out`.
///
/// # Safety
/// `op` must be a valid operator handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_operator_vanishing_edge(
    op: *const TlOperator,
    a: f64,
    out: *mut f64,
) -> TlStatus {
    guard(|| {
        let out = unsafe { out_arg(out, "out") }?;
        let op = unsafe { ref_arg(op, "op") }?;
        require_finite("a", a)?;
        *out = vanishing_edge(&op.0, a).map_err(|e| fail(transport_status(&e), e))?;
        Ok(TlStatus::Ok)
    })
}

/// Two-sided operator-norm bracket on the sup-normed function space.
///
/// # Safety
/// `op` must be a valid operator handle; `lower_out` and `upper_out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_operator_norm_bounds(
    op: *const TlOperator,
    restarts: usize,
    seed: u64,
    lower_out: *mut f64,
    upper_out: *mut f64,
) -> TlStatus {
    guard(|| {
        let lower_out = unsafe { out_arg(lower_out, "lower_out") }?;
        let upper_out = unsafe { out_arg(upper_out, "upper_out") }?;
        let op = unsafe { ref_arg(op, "op") }?;
        let bounds =
            norm_bounds(&op.0, restarts, seed).map_err(|e| fail(transport_status(&e), e))?;
        *lower_out = bounds.lower;
        *upper_out = bounds.upper;
        Ok(TlStatus::Ok)
    })
}

/// Term-matched sup distance between two operators.
///
/// # Safety
/// `a` and `b` must be valid operator handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_operator_distance(
    a: *const TlOperator,
    b: *const TlOperator,
    out: *mut f64,
) -> TlStatus {
    guard(|| {
        let out = unsafe { out_arg(out, "out") }?;
        let a = unsafe { ref_arg(a, "a") }?;
        let b = unsafe { ref_arg(b, "b") }?;
        *out = operator_distance(&a.0, &b.0).map_err(|e| fail(transport_status(&e), e))?;
        Ok(TlStatus::Ok)
    })
}

/// Apply an operator to a function, producing a new function.
///
/// # Safety
/// `op` and `f` must be valid handles and `out` writable. On success
/// `*out` owns the function; release it with [`tl_function_free`].
#[no_mangle]
pub unsafe extern "C" fn tl_operator_apply(
    op: *const TlOperator,
    f: *const TlFunction,
    out: *mut *mut TlFunction,
) -> TlStatus {
    guard(|| {
        let out = unsafe { out_arg(out, "out") }?;
        let op = unsafe { ref_arg(op, "op") }?;
        let f = unsafe { ref_arg(f, "f") }?;
        let g = apply(&op.0, &f.0).map_err(|e| fail(transport_status(&e), e))?;
        *out = Box::into_raw(Box::new(TlFunction(g)));
        Ok(TlStatus::Ok)
    })
}

/// Release an operator handle. Null is a no-op.
///
/// # Safety
/// `op` must be null or a handle from this library, released at most once.
#[no_mangle]
pub unsafe extern "C" fn tl_operator_free(op: *mut TlOperator) {
    if !op.is_null() {
        drop(unsafe { Box::from_raw(op) });
    }
}

/// The unit bump input aligned with the decomposition's top eigenvector.
///
/// # Safety
/// `d` must be a valid decomposition handle and `out` writable. On
/// success `*out` owns the function; release it with
/// [`tl_function_free`].
#[no_mangle]
pub unsafe extern "C" fn tl_bump_direction(
    d: *const TlDecomposition,
    out: *mut *mut TlFunction,
) -> TlStatus {
    guard(|| {
        let out = unsafe { out_arg(out, "out") }?;
        let d = unsafe { ref_arg(d, "d") }?;
        *out = Box::into_raw(Box::new(TlFunction(bump_direction(&d.0))));
        Ok(TlStatus::Ok)
    })
}

/// Dimension of the function's values; 0 if `f` is null.
///
/// # Safety
/// `f` must be null or a valid function handle.
#[no_mangle]
pub unsafe extern "C" fn tl_function_n(f: *const TlFunction) -> usize {
    match unsafe { f.as_ref() } {
        Some(f) => f.0.n(),
        None => {
            set_error("f is null".to_string());
            0
        }
    }
}

/// Evaluate the function at `x`, writing `n` components into `out`.
///
/// # Safety
/// `f` must be a valid function handle and `out` must point to at least
/// `tl_function_n(f)` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tl_function_eval(f: *const TlFunction, x: f64, out: *mut f64) -> TlStatus {
    guard(|| {
        let f = unsafe { ref_arg(f, "f") }?;
        if out.is_null() {
            return Err(fail(TlStatus::NullPointer, "out is null"));
        }
        require_finite("x", x)?;
        let value = f.0.eval(x);
        let dst = unsafe { slice::from_raw_parts_mut(out, f.0.n()) };
        for (d, v) in dst.iter_mut().zip(value.iter()) {
            *d = *v;
        }
        Ok(TlStatus::Ok)
    })
}

/// Release a function handle. Null is a no-op.
///
/// # Safety
/// `f` must be null or a handle from this library, released at most once.
#[no_mangle]
pub unsafe extern "C" fn tl_function_free(f: *mut TlFunction) {
    if !f.is_null() {
        drop(unsafe { Box::from_raw(f) });
    }
}

/// Run the divergence experiment and return its JSON report (no
/// timestamp, so identical inputs give identical bytes). The string is
/// owned by the caller; release it with [`tl_string_free`].
///
/// # Safety
/// `a` and `b` must be valid matrix handles, `m_list` must point to
/// `m_len` readable counts, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_divergence_report_json(
    a: *const TlMatrix,
    b: *const TlMatrix,
    t: f64,
    m_list: *const usize,
    m_len: usize,
    points_per_unit: usize,
    restarts: usize,
    seed: u64,
    tol: f64,
    out: *mut *mut c_char,
) -> TlStatus {
    guard(|| {
        let out = unsafe { out_arg(out, "out") }?;
        let a = unsafe { ref_arg(a, "a") }?;
        let b = unsafe { ref_arg(b, "b") }?;
        if m_list.is_null() {
            return Err(fail(TlStatus::NullPointer, "m_list is null"));
        }
        require_tol(tol)?;
        require_finite("t", t)?;
        if t <= 0.0 {
            return Err(fail(TlStatus::InvalidArgument, "t must be positive"));
        }
        if m_len == 0 {
            return Err(fail(TlStatus::InvalidArgument, "m_len must be at least 1"));
        }
        if points_per_unit == 0 {
            return Err(fail(
                TlStatus::InvalidArgument,
                "points_per_unit must be at least 1",
            ));
        }
        let ms = unsafe { slice::from_raw_parts(m_list, m_len) };
        if ms.contains(&0) {
            return Err(fail(TlStatus::InvalidArgument, "counts must be at least 1"));
        }
        let report = divergence_experiment(&a.0, &b.0, t, ms, points_per_unit, restarts, seed, tol)
            .map_err(|e| fail(experiment_status(&e), e))?;
        let m_spec = ms
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let meta = Meta::new("report-divergence")
            .flag("t", t)
            .flag("m", m_spec)
            .flag("points-per-unit", points_per_unit)
            .flag("restarts", restarts)
            .flag("seed", seed)
            .flag("tol", tol)
            .flag("format", "json")
            .with_timestamp(None);
        let json = divergence_json(&report, &meta);
        let c = CString::new(json)
            .map_err(|_| fail(TlStatus::InvalidArgument, "report contained NUL"))?;
        *out = c.into_raw();
        Ok(TlStatus::Ok)
    })
}

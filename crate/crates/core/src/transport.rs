//! The closed algebra of transport operators: finite sums `Σₖ Mₖ∘shift(sₖ)`
//! acting on vector functions by `(Op f)(x) = Σₖ Mₖ f(x + sₖ)`.
//!
//! Solution operators of constant-coefficient hyperbolic systems live in
//! this algebra (one matrix-weighted shift per eigenvalue), and the algebra
//! is closed under composition: shifts add, matrices multiply. That makes
//! splitting products `[S(t/m) T(t/m)]^m` *exactly* computable — the only
//! floating-point effects are entry rounding, never discretization.
//!
//! Three design rules keep the certificates trustworthy:
//!
//! - **Canonical term lists.** Terms are kept sorted ascending by shift;
//!   runs of shifts with consecutive gaps ≤ `merge_tol` coalesce into one
//!   term anchored at the run's minimum, so algebraically equal shifts
//!   produced by different composition orders land on one term.
//! - **No magnitude-based dropping.** A term is purged only when every
//!   entry is below 1e−300 (an exact zero for all practical purposes);
//!   dropping small terms could fake the vanishing phenomena under study.
//! - **Hard growth cap.** Products that would exceed [`TERM_CAP`] raw terms
//!   fail loudly ([`TransportError::TermExplosion`]) instead of truncating.
//!
//! [`vanishing_edge`] turns the support-propagation argument into a
//! machine-checkable certificate: if the input vanishes on `x ≤ a`, the
//! output vanishes on `x ≤ a − max_k sₖ` — exact shift bookkeeping, not
//! sampling. [`norm_bounds`] brackets the operator norm on the sup-normed
//! function space from both sides.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::funcspace::{robust_norm, VectorFunction};
use crate::spectral::{SpectralDecomposition, SquareMatrix};

/// Raw (pre-merge) term budget for splitting products.
pub const TERM_CAP: usize = 1_000_000;

/// Brute-force oracle bound: the multi-index expansion has `n^(2m)` raw
/// terms, so the oracle refuses larger `m`.
pub const ORACLE_MAX_M: usize = 4;

/// Baseline shift-merging tolerance; scaled up by the expected shift
/// magnitude when an operator is built from a semigroup.
const BASE_MERGE_TOL: f64 = 1e-9;

/// Purge threshold: a term whose entries are all strictly below this is
/// treated as the zero matrix. Effectively exact-zero-only.
const PURGE_THRESHOLD: f64 = 1e-300;

/// Errors from operator construction and composition.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransportError {
    #[error("operator dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("operator has no terms")]
    EmptyOperator,
    /// The exact product grew past [`TERM_CAP`]; carries the raw pairwise
    /// term count the next factor would have needed.
    #[error(
        "exact product exceeds the {cap}-term growth cap: the next factor \
         needs {count} raw terms ({completed} of {factors} composed)"
    )]
    TermExplosion {
        count: usize,
        cap: usize,
        completed: usize,
        factors: usize,
    },
    #[error("brute-force expansion supports at most m = {max}, got {m}")]
    MTooLarge { m: usize, max: usize },
    #[error("term shift must be finite")]
    NonFiniteShift,
}

/// One `M∘shift(s)` summand of a transport operator.
#[derive(Debug, Clone)]
pub struct OperatorTerm {
    shift: f64,
    matrix: DMatrix<f64>,
}

impl OperatorTerm {
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// Finite sum `Σₖ Mₖ∘shift(sₖ)` with canonically ordered, merged terms.
#[derive(Debug, Clone)]
pub struct TransportOperator {
    n: usize,
    /// Sorted ascending by shift; consecutive shifts differ by more than
    /// `merge_tol`; no all-below-purge-threshold matrices.
    terms: Vec<OperatorTerm>,
    merge_tol: f64,
}

/// Two-sided bracket on the operator norm over the sup-normed space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBounds {
    /// Certified lower bound: the value `‖Σₖ Mₖ vₖ‖` of an explicit witness
    /// configuration of unit vectors (realizable by a sup-norm-1 function
    /// because the shifts are distinct).
    pub lower: f64,
    /// Triangle-inequality upper bound `Σₖ ‖Mₖ‖₂`.
    pub upper: f64,
}

impl TransportOperator {
    /// Build an operator from raw `(shift, matrix)` terms; terms are
    /// canonically sorted/merged and zero matrices purged.
    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (f64, SquareMatrix)>,
        merge_tol: f64,
    ) -> Result<Self, TransportError> {
        assert!(n >= 1, "dimension must be at least 1");
        assert!(
            merge_tol > 0.0 && merge_tol.is_finite(),
            "merge_tol must be positive"
        );
        let mut pairs = Vec::new();
        for (shift, matrix) in terms {
            if !shift.is_finite() {
                return Err(TransportError::NonFiniteShift);
            }
            if matrix.n() != n {
                return Err(TransportError::DimensionMismatch {
                    left: n,
                    right: matrix.n(),
                });
            }
            pairs.push((shift, matrix.as_dmatrix().clone()));
        }
        Ok(TransportOperator {
            n,
            terms: canonical_terms(pairs, merge_tol),
            merge_tol,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Terms in canonical (ascending-shift) order.
    pub fn terms(&self) -> &[OperatorTerm] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn merge_tol(&self) -> f64 {
        self.merge_tol
    }

    fn max_shift(&self) -> Option<f64> {
        self.terms.last().map(|t| t.shift)
    }
}

/// Canonical term list: sort ascending by shift, coalesce runs whose
/// consecutive gaps are ≤ `merge_tol` (anchored at the run minimum,
/// matrices summed), purge effective zeros.
fn canonical_terms(mut pairs: Vec<(f64, DMatrix<f64>)>, merge_tol: f64) -> Vec<OperatorTerm> {
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite shifts"));
    let mut out: Vec<OperatorTerm> = Vec::new();
    let mut iter = pairs.into_iter();
    let Some((first_shift, first_matrix)) = iter.next() else {
        return out;
    };
    let mut anchor = first_shift;
    let mut prev = first_shift;
    let mut acc = first_matrix;
    let flush = |anchor: f64, acc: DMatrix<f64>, out: &mut Vec<OperatorTerm>| {
        if acc.iter().any(|&x| x.abs() >= PURGE_THRESHOLD) {
            out.push(OperatorTerm {
                shift: anchor,
                matrix: acc,
            });
        }
    };
    for (shift, matrix) in iter {
        if shift - prev <= merge_tol {
            acc += matrix;
        } else {
            flush(anchor, std::mem::replace(&mut acc, matrix), &mut out);
            anchor = shift;
        }
        prev = shift;
    }
    flush(anchor, acc, &mut out);
    out
}

/// The identity: a single unshifted identity-matrix term.
pub fn identity_operator(n: usize) -> TransportOperator {
    assert!(n >= 1, "dimension must be at least 1");
    TransportOperator {
        n,
        terms: vec![OperatorTerm {
            shift: 0.0,
            matrix: DMatrix::identity(n, n),
        }],
        merge_tol: BASE_MERGE_TOL,
    }
}

fn semigroup_merge_tol(t: f64, max_abs_lambda: f64) -> f64 {
    BASE_MERGE_TOL * 1.0f64.max(t.abs() * max_abs_lambda)
}

/// The exact solution operator at time `t` of the system with the
/// decomposed coefficient matrix: `Σᵢ Pᵢ∘shift(λᵢ t)`.
///
/// Negative `t` is allowed — these operators form a group, not just a
/// semigroup. Coincident shifts (repeated eigenvalues, or `t = 0`) merge
/// by matrix addition, so `t = 0` returns the identity.
pub fn from_semigroup(d: &SpectralDecomposition, t: f64) -> TransportOperator {
    let n = d.n();
    let max_lambda = d.eigenvalues().iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    let merge_tol = semigroup_merge_tol(t, max_lambda);
    let mut pairs = Vec::with_capacity(n);
    for i in 0..n {
        let r = d.right_eigenvector(i);
        let l = d.left_eigenvector(i);
        pairs.push((d.eigenvalues()[i] * t, r * l.transpose()));
    }
    TransportOperator {
        n,
        terms: canonical_terms(pairs, merge_tol),
        merge_tol,
    }
}

/// Exact composition: `(a∘b) f = a (b f)`, i.e. all pairwise terms
/// `(s_a + s_b, M_a · M_b)`, canonically merged. The result's `merge_tol`
/// is the larger of the two inputs'.
pub fn compose(
    a: &TransportOperator,
    b: &TransportOperator,
) -> Result<TransportOperator, TransportError> {
    if a.n != b.n {
        return Err(TransportError::DimensionMismatch {
            left: a.n,
            right: b.n,
        });
    }
    let merge_tol = a.merge_tol.max(b.merge_tol);
    let mut pairs = Vec::with_capacity(a.terms.len() * b.terms.len());
    for ta in &a.terms {
        for tb in &b.terms {
            let shift = ta.shift + tb.shift;
            if !shift.is_finite() {
                return Err(TransportError::NonFiniteShift);
            }
            pairs.push((shift, &ta.matrix * &tb.matrix));
        }
    }
    Ok(TransportOperator {
        n: a.n,
        terms: canonical_terms(pairs, merge_tol),
        merge_tol,
    })
}

/// The splitting product `[S(t/m) T(t/m)]^m`, composed exactly by
/// sequential left-composition (never repeated squaring — sequential
/// products keep partial shift sums on the lattice `(integer) · t/m`,
/// maximizing exact collisions).
///
/// Fails with [`TransportError::TermExplosion`] if the raw pairwise
/// product would exceed [`TERM_CAP`] terms at any step.
pub fn trotter_operator(
    da: &SpectralDecomposition,
    db: &SpectralDecomposition,
    t: f64,
    m: usize,
) -> Result<TransportOperator, TransportError> {
    assert!(m >= 1, "m must be at least 1");
    if da.n() != db.n() {
        return Err(TransportError::DimensionMismatch {
            left: da.n(),
            right: db.n(),
        });
    }
    let tau = t / m as f64;
    let step = compose(&from_semigroup(da, tau), &from_semigroup(db, tau))?;
    let mut acc = step.clone();
    for done in 1..m {
        let projected = acc.terms.len().saturating_mul(step.terms.len());
        if projected > TERM_CAP {
            return Err(TransportError::TermExplosion {
                count: projected,
                cap: TERM_CAP,
                completed: done,
                factors: m,
            });
        }
        acc = compose(&acc, &step)?;
    }
    Ok(acc)
}

/// Apply the operator to a function: exact term-by-term transport,
/// `(profile, s_f) · c ↦ (profile, s_f + s_op) · (M c)` over all pairs.
/// Coefficient vectors that come out exactly zero are dropped.
pub fn apply(op: &TransportOperator, f: &VectorFunction) -> Result<VectorFunction, TransportError> {
    if op.n != f.n() {
        return Err(TransportError::DimensionMismatch {
            left: op.n,
            right: f.n(),
        });
    }
    let mut out = VectorFunction::zero(op.n);
    for top in &op.terms {
        for tf in f.terms() {
            let coeff: DVector<f64> = &top.matrix * tf.coeff();
            if coeff.iter().all(|&c| c == 0.0) {
                continue;
            }
            out.push_term(tf.profile().clone(), tf.shift() + top.shift, coeff)
                .expect("validated inputs produce valid terms");
        }
    }
    Ok(out)
}

/// Support-propagation certificate: if `g(x) = 0` for all `x ≤ a`, then
/// `(Op g)(x) = 0` for all `x ≤ vanishing_edge(op, a) = a − max_k sₖ`,
/// because every sampled point `x + sₖ` then lies in the vanishing region.
/// This is exact shift arithmetic — no sampling, no tolerance.
pub fn vanishing_edge(op: &TransportOperator, a: f64) -> Result<f64, TransportError> {
    let max_shift = op.max_shift().ok_or(TransportError::EmptyOperator)?;
    Ok(a - max_shift)
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0f64, |a, &s| a.max(s))
}

fn normalize_or(v: DVector<f64>, fallback: impl FnOnce() -> DVector<f64>) -> DVector<f64> {
    let norm = robust_norm(&v);
    if norm > 0.0 && norm.is_finite() {
        v / norm
    } else {
        fallback()
    }
}

fn weighted_image(terms: &[OperatorTerm], vs: &[DVector<f64>]) -> DVector<f64> {
    let n = terms[0].matrix.nrows();
    let mut s = DVector::zeros(n);
    for (t, v) in terms.iter().zip(vs) {
        s += &t.matrix * v;
    }
    s
}

/// Coordinate ascent on `‖Σₖ Mₖ vₖ‖` over unit vectors `vₖ`.
///
/// Each sweep sets `w = s/‖s‖` and updates every `vₖ` to the normalized
/// `Mₖᵀ w`. The value never decreases: with the new configuration,
/// `‖s'‖ ≥ ⟨w, s'⟩ = Σₖ ‖Mₖᵀw‖ ≥ Σₖ ⟨Mₖᵀw, vₖ⟩ = ⟨w, s⟩ = ‖s‖`.
fn ascend(terms: &[OperatorTerm], mut vs: Vec<DVector<f64>>) -> f64 {
    let mut s = weighted_image(terms, &vs);
    let mut value = robust_norm(&s);
    for _ in 0..200 {
        let norm = robust_norm(&s);
        if norm == 0.0 || !norm.is_finite() {
            return value;
        }
        let w = &s / norm;
        for (k, term) in terms.iter().enumerate() {
            let g = term.matrix.tr_mul(&w);
            let gn = robust_norm(&g);
            if gn > 0.0 && gn.is_finite() {
                vs[k] = g / gn;
            }
        }
        s = weighted_image(terms, &vs);
        let next = robust_norm(&s);
        if next - value <= 1e-13 * value.max(1.0) {
            return value.max(next);
        }
        value = next;
    }
    value
}

/// Bracket the operator norm on the sup-normed function space.
///
/// `upper = Σₖ ‖Mₖ‖₂` by the triangle inequality. `lower` is the best
/// found `‖Σₖ Mₖ vₖ‖` over unit vectors `vₖ`: since shifts are pairwise
/// distinct, a continuous function of sup-norm 1 can take the value `vₖ`
/// at `x* + sₖ` for every k simultaneously, so each configuration is a
/// genuine operator-norm witness. Ascent runs from a deterministic start
/// (the strongest term's top singular pair, which guarantees
/// `lower ≥ maxₖ ‖Mₖ‖₂`) plus `restarts` seeded random starts.
pub fn norm_bounds(
    op: &TransportOperator,
    restarts: usize,
    seed: u64,
) -> Result<NormBounds, TransportError> {
    if op.terms.is_empty() {
        return Err(TransportError::EmptyOperator);
    }
    let n = op.n;
    let norms: Vec<f64> = op.terms.iter().map(|t| spectral_norm(&t.matrix)).collect();
    let upper: f64 = norms.iter().sum();

    // Deterministic witness start: top singular pair of the strongest term.
    let k_star = norms
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite norms"))
        .map(|(k, _)| k)
        .expect("nonempty");
    let svd = op.terms[k_star].matrix.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let top_idx = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite singular values"))
        .map(|(i, _)| i)
        .expect("nonempty");
    let v_top = v_t.row(top_idx).transpose();
    let w0 = normalize_or(&op.terms[k_star].matrix * &v_top, || {
        DVector::from_fn(n, |i, _| if i == 0 { 1.0 } else { 0.0 })
    });
    let start: Vec<DVector<f64>> = op
        .terms
        .iter()
        .map(|t| {
            normalize_or(t.matrix.tr_mul(&w0), || {
                DVector::from_fn(n, |i, _| if i == 0 { 1.0 } else { 0.0 })
            })
        })
        .collect();
    let mut lower = ascend(&op.terms, start);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        let vs: Vec<DVector<f64>> = (0..op.terms.len())
            .map(|_| {
                normalize_or(
                    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0)),
                    || DVector::from_fn(n, |i, _| if i == 0 { 1.0 } else { 0.0 }),
                )
            })
            .collect();
        lower = lower.max(ascend(&op.terms, vs));
    }

    Ok(NormBounds {
        lower: lower.min(upper),
        upper,
    })
}

/// Brute-force splitting product: expands `[S(t/m) T(t/m)]^m` over all
/// multi-indices `(i₁,j₁,…,i_m,j_m)` without reusing [`compose`], then
/// merges with the same canonical rule. `n^(2m)` raw terms — a cross-check
/// oracle for small n and m, capped at `m ≤` [`ORACLE_MAX_M`].
pub fn naive_trotter_oracle(
    da: &SpectralDecomposition,
    db: &SpectralDecomposition,
    t: f64,
    m: usize,
) -> Result<TransportOperator, TransportError> {
    assert!(m >= 1, "m must be at least 1");
    if m > ORACLE_MAX_M {
        return Err(TransportError::MTooLarge {
            m,
            max: ORACLE_MAX_M,
        });
    }
    if da.n() != db.n() {
        return Err(TransportError::DimensionMismatch {
            left: da.n(),
            right: db.n(),
        });
    }
    let n = da.n();
    let tau = t / m as f64;

    let projections = |d: &SpectralDecomposition| -> Vec<DMatrix<f64>> {
        (0..n)
            .map(|i| {
                let r = d.right_eigenvector(i);
                let l = d.left_eigenvector(i);
                r * l.transpose()
            })
            .collect()
    };
    let pa = projections(da);
    let pb = projections(db);

    let total = (n as u64).pow(2 * m as u32);
    let mut pairs = Vec::with_capacity(total as usize);
    for idx in 0..total {
        let mut rem = idx;
        let mut shift = 0.0;
        let mut matrix = DMatrix::<f64>::identity(n, n);
        for _ in 0..m {
            let i = (rem % n as u64) as usize;
            rem /= n as u64;
            let j = (rem % n as u64) as usize;
            rem /= n as u64;
            shift += da.eigenvalues()[i] * tau + db.eigenvalues()[j] * tau;
            matrix = matrix * &pa[i] * &pb[j];
        }
        pairs.push((shift, matrix));
    }

    let max_la = da.eigenvalues().iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    let max_lb = db.eigenvalues().iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    let merge_tol = semigroup_merge_tol(tau, max_la).max(semigroup_merge_tol(tau, max_lb));
    Ok(TransportOperator {
        n,
        terms: canonical_terms(pairs, merge_tol),
        merge_tol,
    })
}

/// Maximum deviation between two operators under shift matching: terms
/// whose shifts agree within the larger merge tolerance are compared
/// entrywise; unmatched terms count at their full largest-entry magnitude.
pub fn operator_distance(
    a: &TransportOperator,
    b: &TransportOperator,
) -> Result<f64, TransportError> {
    if a.n != b.n {
        return Err(TransportError::DimensionMismatch {
            left: a.n,
            right: b.n,
        });
    }
    let tol = a.merge_tol.max(b.merge_tol);
    let max_abs = |m: &DMatrix<f64>| m.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    let mut worst = 0.0f64;
    let (mut i, mut j) = (0, 0);
    while i < a.terms.len() && j < b.terms.len() {
        let ta = &a.terms[i];
        let tb = &b.terms[j];
        if (ta.shift - tb.shift).abs() <= tol {
            let diff = ta
                .matrix
                .iter()
                .zip(tb.matrix.iter())
                .fold(0.0f64, |acc, (&x, &y)| acc.max((x - y).abs()));
            worst = worst.max(diff);
            i += 1;
            j += 1;
        } else if ta.shift < tb.shift {
            worst = worst.max(max_abs(&ta.matrix));
            i += 1;
        } else {
            worst = worst.max(max_abs(&tb.matrix));
            j += 1;
        }
    }
    for term in &a.terms[i..] {
        worst = worst.max(max_abs(&term.matrix));
    }
    for term in &b.terms[j..] {
        worst = worst.max(max_abs(&term.matrix));
    }
    Ok(worst)
}

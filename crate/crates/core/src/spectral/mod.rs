//! Spectral decomposition of small dense real matrices with biorthogonal
//! left/right eigenvector systems.
//!
//! The transport algebra in this crate is built from rank-one spectral
//! projections `P_i = r_i l_i^T` of an invertible, real-diagonalizable
//! ("hyperbolic") coefficient matrix. This module produces those
//! ingredients: [`decompose`] computes eigenvalues in ascending order with
//! unit right eigenvectors and the matching left family, [`spectral_projection`]
//! and [`reconstruct`] expose the projection calculus, and
//! [`check_hypothesis`] verifies the eigenvalue-gap condition that the
//! splitting counterexample needs: the largest eigenvalue of a sum
//! exceeding the sum of the largest eigenvalues of its parts.
//!
//! Left eigenvectors are never solved for independently: they are the rows
//! of the inverse of the right-eigenvector column matrix, so biorthogonality
//! `⟨l_j, r_i⟩ = δ_ij` holds to linear-solve accuracy by construction.

mod eigen;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use eigen::{eigen_system, EigenFailure};

/// Default relative tolerance for spectral checks, scaled by the matrix
/// max-norm where applicable. Comfortable slack above double-precision
/// eigensolver accuracy for the small dimensions this crate targets.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Errors from [`SquareMatrix`] construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    /// A matrix needs at least one row and one column.
    #[error("matrix must have at least one row and one column")]
    Empty,
    /// Row `row` has a different number of entries than the first row.
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        got: usize,
        expected: usize,
    },
    /// Flat constructor got the wrong number of entries.
    #[error("expected {expected} entries for a {n}x{n} matrix, got {got}")]
    WrongLength {
        n: usize,
        expected: usize,
        got: usize,
    },
    /// NaN or infinity at the given position.
    #[error("entry ({row},{col}) is not a finite number")]
    NonFinite { row: usize, col: usize },
    /// Binary operation on matrices of different dimensions.
    #[error("cannot combine a {left}x{left} matrix with a {right}x{right} matrix")]
    DimensionMismatch { left: usize, right: usize },
}

/// Errors from [`decompose`] and the projection accessors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    /// An eigenvalue has an imaginary part too large to ignore; the matrix
    /// is not real-diagonalizable.
    #[error(
        "matrix is not hyperbolic: eigenvalue {re:.6e} + {im:.6e}i has an imaginary \
         part larger than the tolerance {threshold:.3e}"
    )]
    NotHyperbolic { re: f64, im: f64, threshold: f64 },
    /// The right-eigenvector matrix is numerically singular.
    #[error(
        "matrix is not diagonalizable: eigenvector basis condition estimate {cond:.3e} \
         exceeds {limit:.3e} (the 1/tol cutoff is a tool convention, not a \
         mathematical boundary)"
    )]
    NotDiagonalizable { cond: f64, limit: f64 },
    /// An eigenvalue is zero up to tolerance; the generator construction
    /// requires an invertible matrix.
    #[error(
        "matrix is not invertible: eigenvalue {value:.6e} lies within {threshold:.3e} \
         of zero"
    )]
    NotInvertible { value: f64, threshold: f64 },
    /// The QR iteration ran out of budget (practically unreachable for the
    /// small dimensions this crate targets).
    #[error("eigenvalue iteration did not converge")]
    IterationLimit,
    /// Eigenvalue index outside `0..n`.
    #[error("eigenvalue index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
}

/// Dense real square matrix with finite entries, the coefficient data for
/// every generator in this crate.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    data: DMatrix<f64>,
}

impl SquareMatrix {
    /// Build from a list of rows. All rows must have the same length as
    /// there are rows, and every entry must be finite.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::RaggedRow {
                    row: i,
                    got: row.len(),
                    expected: n,
                });
            }
        }
        let data = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::validated(data)
    }

    /// Build from `n*n` entries in row-major order.
    pub fn from_row_slice(n: usize, entries: &[f64]) -> Result<Self, MatrixError> {
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        if entries.len() != n * n {
            return Err(MatrixError::WrongLength {
                n,
                expected: n * n,
                got: entries.len(),
            });
        }
        Self::validated(DMatrix::from_row_slice(n, n, entries))
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(entries: &[f64]) -> Result<Self, MatrixError> {
        if entries.is_empty() {
            return Err(MatrixError::Empty);
        }
        let n = entries.len();
        Self::validated(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                entries[i]
            } else {
                0.0
            }
        }))
    }

    /// The n-dimensional identity.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "identity requires n >= 1");
        SquareMatrix {
            data: DMatrix::identity(n, n),
        }
    }

    fn validated(data: DMatrix<f64>) -> Result<Self, MatrixError> {
        for i in 0..data.nrows() {
            for j in 0..data.ncols() {
                if !data[(i, j)].is_finite() {
                    return Err(MatrixError::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(SquareMatrix { data })
    }

    pub(crate) fn from_dmatrix(data: DMatrix<f64>) -> Self {
        debug_assert_eq!(data.nrows(), data.ncols());
        SquareMatrix { data }
    }

    /// Dimension n.
    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    /// Entry at (row, col). Panics if out of range.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[(row, col)]
    }

    /// Entrywise sum; fails on dimension mismatch.
    pub fn add(&self, other: &SquareMatrix) -> Result<SquareMatrix, MatrixError> {
        if self.n() != other.n() {
            return Err(MatrixError::DimensionMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(SquareMatrix {
            data: &self.data + &other.data,
        })
    }

    /// Scalar multiple. The scale must be finite.
    pub fn scale(&self, c: f64) -> SquareMatrix {
        assert!(c.is_finite(), "scale factor must be finite");
        SquareMatrix {
            data: &self.data * c,
        }
    }

    /// Max-norm: the largest absolute entry. Thresholds in [`decompose`]
    /// are relative to this.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
    }

    pub(crate) fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.data
    }
}

/// Eigenvalues in ascending order with unit right eigenvectors and the
/// biorthogonal left family of an invertible hyperbolic matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    source: SquareMatrix,
    eigenvalues: Vec<f64>,
    /// Column i is the unit right eigenvector r_i.
    right: DMatrix<f64>,
    /// Row i is the left eigenvector l_i^T; `left = right⁻¹`.
    left: DMatrix<f64>,
    tol: f64,
}

impl SpectralDecomposition {
    /// Dimension n.
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues sorted ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Largest eigenvalue λₙ.
    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("decomposition is nonempty")
    }

    /// Smallest eigenvalue λ₁.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Unit right eigenvector r_i (0-based, ascending eigenvalue order).
    pub fn right_eigenvector(&self, i: usize) -> DVector<f64> {
        self.right.column(i).into_owned()
    }

    /// Left eigenvector l_i, biorthogonal to the right family.
    pub fn left_eigenvector(&self, i: usize) -> DVector<f64> {
        self.left.row(i).transpose()
    }

    /// The matrix this decomposition came from.
    pub fn source(&self) -> &SquareMatrix {
        &self.source
    }

    /// Tolerance the decomposition was validated against.
    pub fn tol(&self) -> f64 {
        self.tol
    }
}

/// Which matrix of a splitting pair a decomposition failure refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummandRole {
    /// The first summand of the pair.
    First,
    /// The second summand.
    Second,
    /// Their sum, the generator the splitting approximates.
    Sum,
}

impl std::fmt::Display for SummandRole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SummandRole::First => write!(f, "first summand"),
            SummandRole::Second => write!(f, "second summand"),
            SummandRole::Sum => write!(f, "sum"),
        }
    }
}

/// Errors from [`check_hypothesis`]: dimension mismatch or a decomposition
/// failure tagged with the matrix it happened on.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HypothesisError {
    #[error("summands have different dimensions: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("decomposition of the {role} failed: {source}")]
    Decomposition {
        role: SummandRole,
        source: SpectralError,
    },
}

/// Decompositions of a pair and their sum together with the eigenvalue-gap
/// verdict: `satisfied` iff the sum's top eigenvalue exceeds the summands'
/// top eigenvalues combined, by more than `tol`.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub decomp_a: SpectralDecomposition,
    pub decomp_b: SpectralDecomposition,
    pub decomp_c: SpectralDecomposition,
    /// λₙ(sum) − λₙ(first) − λₙ(second).
    pub gap: f64,
    pub satisfied: bool,
}

/// Eigendecomposition with validation.
///
/// Checks run in a fixed order so every rejection has one canonical reason:
/// complex spectrum first (`NotHyperbolic`), then eigenvector-basis
/// conditioning (`NotDiagonalizable`), then zero eigenvalues
/// (`NotInvertible`). Thresholds on eigenvalues are `tol * max_abs(m)`;
/// the basis conditioning cutoff is `1/tol`.
///
/// Right eigenvectors are normalized to unit length with a deterministic
/// sign: the component of largest magnitude (lowest index on ties) is made
/// positive. Eigenvalue ties keep discovery order (stable sort).
///
/// # Panics
/// If `tol` is not a positive finite number.
pub fn decompose(m: &SquareMatrix, tol: f64) -> Result<SpectralDecomposition, SpectralError> {
    assert!(tol > 0.0 && tol.is_finite(), "tol must be positive");
    let n = m.n();
    let scale = m.max_abs();
    let eigen_threshold = tol * scale;

    let sys = eigen_system(m.as_dmatrix()).map_err(|e| match e {
        EigenFailure::NoConvergence => SpectralError::IterationLimit,
    })?;

    // Reject complex spectra before looking at anything else.
    for i in 0..n {
        if sys.im[i].abs() > eigen_threshold {
            return Err(SpectralError::NotHyperbolic {
                re: sys.re[i],
                im: sys.im[i],
                threshold: eigen_threshold,
            });
        }
    }

    // Conditioning of the right-eigenvector basis, via singular values.
    let svd = sys.basis.clone().svd(false, false);
    let sigma_max = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    let sigma_min = svd
        .singular_values
        .iter()
        .fold(f64::INFINITY, |a, &s| a.min(s));
    let limit = 1.0 / tol;
    let cond = if sigma_min > 0.0 {
        sigma_max / sigma_min
    } else {
        f64::INFINITY
    };
    if cond.is_nan() || cond > limit {
        return Err(SpectralError::NotDiagonalizable { cond, limit });
    }

    for i in 0..n {
        if sys.re[i].abs() <= eigen_threshold {
            return Err(SpectralError::NotInvertible {
                value: sys.re[i],
                threshold: eigen_threshold,
            });
        }
    }

    // Ascending eigenvalue order; stable sort keeps discovery order on ties.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        sys.re[a]
            .partial_cmp(&sys.re[b])
            .expect("finite eigenvalues")
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| sys.re[i]).collect();
    let mut right = DMatrix::<f64>::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut col = sys.basis.column(i).into_owned();
        let norm = col.norm();
        if norm == 0.0 {
            return Err(SpectralError::NotDiagonalizable {
                cond: f64::INFINITY,
                limit,
            });
        }
        col /= norm;
        // Deterministic sign: largest-|component| entry positive, first on ties.
        let mut lead = 0;
        for j in 1..n {
            if col[j].abs() > col[lead].abs() {
                lead = j;
            }
        }
        if col[lead] < 0.0 {
            col = -col;
        }
        for j in 0..n {
            // `+ 0.0` folds any -0.0 produced by the flip into +0.0.
            right[(j, k)] = col[j] + 0.0;
        }
    }

    let left = right
        .clone()
        .lu()
        .try_inverse()
        .ok_or(SpectralError::NotDiagonalizable { cond, limit })?;

    Ok(SpectralDecomposition {
        source: m.clone(),
        eigenvalues,
        right,
        left,
        tol,
    })
}

/// Rank-one spectral projection `P_i = r_i l_i^T` (0-based, ascending
/// eigenvalue order). Projections are idempotent, mutually annihilating,
/// and sum to the identity.
pub fn spectral_projection(
    d: &SpectralDecomposition,
    i: usize,
) -> Result<SquareMatrix, SpectralError> {
    let n = d.n();
    if i >= n {
        return Err(SpectralError::IndexOutOfRange { index: i, n });
    }
    let r = d.right.column(i);
    let l = d.left.row(i);
    Ok(SquareMatrix::from_dmatrix(r * l))
}

/// Rebuild the source matrix as `Σ λ_i P_i`; agreement with the source is
/// the decomposition's round-trip test.
pub fn reconstruct(d: &SpectralDecomposition) -> SquareMatrix {
    let n = d.n();
    let mut acc = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let r = d.right.column(i);
        let l = d.left.row(i);
        acc += d.eigenvalues[i] * (r * l);
    }
    SquareMatrix::from_dmatrix(acc)
}

/// Decompose `a`, `b`, and `a + b` and compare top eigenvalues.
///
/// The report's `gap` is `λₙ(a+b) − λₙ(a) − λₙ(b)`; `satisfied` requires
/// `gap > tol`. A zero or negative gap is a valid *answer*, not an error;
/// only decomposition failures (tagged with the offending matrix) and
/// dimension mismatches are errors.
pub fn check_hypothesis(
    a: &SquareMatrix,
    b: &SquareMatrix,
    tol: f64,
) -> Result<HypothesisReport, HypothesisError> {
    if a.n() != b.n() {
        return Err(HypothesisError::DimensionMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    let c = a.add(b).expect("dimensions checked above");

    let tag = |role: SummandRole| {
        move |source: SpectralError| HypothesisError::Decomposition { role, source }
    };
    let decomp_a = decompose(a, tol).map_err(tag(SummandRole::First))?;
    let decomp_b = decompose(b, tol).map_err(tag(SummandRole::Second))?;
    let decomp_c = decompose(&c, tol).map_err(tag(SummandRole::Sum))?;

    let gap = decomp_c.max_eigenvalue() - decomp_a.max_eigenvalue() - decomp_b.max_eigenvalue();
    Ok(HypothesisReport {
        satisfied: gap > tol,
        decomp_a,
        decomp_b,
        decomp_c,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sm(n: usize, entries: &[f64]) -> SquareMatrix {
        SquareMatrix::from_row_slice(n, entries).unwrap()
    }

    /// Random orthogonal matrix via QR of a Gaussian-ish sample.
    fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let raw = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        raw.qr().q()
    }

    /// Random invertible hyperbolic matrix with a well-conditioned
    /// eigenbasis, built as R Λ R⁻¹ with R = Q1 · diag(mild) · Q2.
    fn random_hyperbolic(n: usize, rng: &mut ChaCha8Rng) -> (SquareMatrix, Vec<f64>) {
        let mut lambda: Vec<f64> = (0..n)
            .map(|k| {
                let base = 0.6 + 1.1 * k as f64;
                let sign = if rng.random_range(0..2) == 0 {
                    -1.0
                } else {
                    1.0
                };
                sign * (base + rng.random_range(0.0..0.4))
            })
            .collect();
        lambda.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q1 = random_orthogonal(n, rng);
        let q2 = random_orthogonal(n, rng);
        let stretch = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                rng.random_range(0.8..1.25)
            } else {
                0.0
            }
        });
        let basis = &q1 * stretch * &q2;
        let inv = basis.clone().lu().try_inverse().unwrap();
        let diag = DMatrix::from_fn(n, n, |i, j| if i == j { lambda[i] } else { 0.0 });
        let m = &basis * diag * inv;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| m[(i, j)]).collect())
            .collect();
        (SquareMatrix::from_rows(&rows).unwrap(), lambda)
    }

    #[test]
    fn swap_matrix_spectrum() {
        let d = decompose(&sm(2, &[0.0, 1.0, 1.0, 0.0]), DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(d.eigenvalues()[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.eigenvalues()[1], 1.0, epsilon = 1e-12);
        let r1 = d.right_eigenvector(1);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(r1[0], inv_sqrt2, epsilon = 1e-12);
        assert_abs_diff_eq!(r1[1], inv_sqrt2, epsilon = 1e-12);
    }

    #[test]
    fn anisotropic_swap_spectrum() {
        let d = decompose(&sm(2, &[0.0, 1.0, 4.0, 0.0]), DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(d.eigenvalues()[0], -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.eigenvalues()[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn summed_matrix_spectrum_is_sqrt10() {
        let d = decompose(&sm(2, &[0.0, 2.0, 5.0, 0.0]), DEFAULT_TOL).unwrap();
        let s10 = 10.0f64.sqrt();
        assert_abs_diff_eq!(d.eigenvalues()[0], -s10, epsilon = 1e-12);
        assert_abs_diff_eq!(d.eigenvalues()[1], s10, epsilon = 1e-12);
    }

    #[test]
    fn diagonal_matrix_decomposition() {
        let d = decompose(&SquareMatrix::diagonal(&[2.0, -3.0]).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(d.eigenvalues(), &[-3.0, 2.0]);
        // Eigenvalue -3 sits in slot 0 and belongs to coordinate 1.
        let r0 = d.right_eigenvector(0);
        assert_eq!((r0[0], r0[1]), (0.0, 1.0));
        let r1 = d.right_eigenvector(1);
        assert_eq!((r1[0], r1[1]), (1.0, 0.0));
        for i in 0..2 {
            let l = d.left_eigenvector(i);
            let r = d.right_eigenvector(i);
            assert_abs_diff_eq!((l - r).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn rotation_matrix_rejected_as_not_hyperbolic() {
        let err = decompose(&sm(2, &[0.0, -1.0, 1.0, 0.0]), DEFAULT_TOL).unwrap_err();
        assert!(
            matches!(err, SpectralError::NotHyperbolic { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn nilpotent_block_rejected_as_not_diagonalizable() {
        let err = decompose(&sm(2, &[0.0, 1.0, 0.0, 0.0]), DEFAULT_TOL).unwrap_err();
        assert!(
            matches!(err, SpectralError::NotDiagonalizable { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn singular_matrix_rejected_as_not_invertible() {
        let err = decompose(&sm(2, &[1.0, 0.0, 0.0, 0.0]), DEFAULT_TOL).unwrap_err();
        assert!(
            matches!(err, SpectralError::NotInvertible { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn zero_matrix_rejected_as_not_invertible() {
        let err = decompose(&sm(2, &[0.0; 4]), DEFAULT_TOL).unwrap_err();
        assert!(
            matches!(err, SpectralError::NotInvertible { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn projection_of_diagonal_matrix() {
        let d = decompose(&SquareMatrix::diagonal(&[2.0, -3.0]).unwrap(), DEFAULT_TOL).unwrap();
        let p0 = spectral_projection(&d, 0).unwrap();
        for (i, j, want) in [(0, 0, 0.0), (0, 1, 0.0), (1, 0, 0.0), (1, 1, 1.0)] {
            assert_abs_diff_eq!(p0.get(i, j), want, epsilon = 1e-14);
        }
    }

    #[test]
    fn projection_of_swap_matrix_is_averaging() {
        let d = decompose(&sm(2, &[0.0, 1.0, 1.0, 0.0]), DEFAULT_TOL).unwrap();
        let p1 = spectral_projection(&d, 1).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(p1.get(i, j), 0.5, epsilon = 1e-13);
            }
        }
        // Idempotence and annihilation of the complementary projection.
        let p0 = spectral_projection(&d, 0).unwrap();
        let pd = p1.as_dmatrix();
        assert_abs_diff_eq!((pd * pd - pd).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((pd * p0.as_dmatrix()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn projections_sum_to_identity() {
        let d = decompose(&sm(2, &[0.0, 2.0, 5.0, 0.0]), DEFAULT_TOL).unwrap();
        let mut sum = DMatrix::<f64>::zeros(2, 2);
        for i in 0..2 {
            sum += spectral_projection(&d, i).unwrap().as_dmatrix();
        }
        assert_abs_diff_eq!((sum - DMatrix::identity(2, 2)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn projection_index_out_of_range() {
        let d = decompose(&sm(2, &[0.0, 1.0, 1.0, 0.0]), DEFAULT_TOL).unwrap();
        let err = spectral_projection(&d, 2).unwrap_err();
        assert_eq!(err, SpectralError::IndexOutOfRange { index: 2, n: 2 });
    }

    #[test]
    fn reconstruct_round_trips() {
        for m in [
            sm(2, &[0.0, 1.0, 4.0, 0.0]),
            SquareMatrix::diagonal(&[5.0, -5.0]).unwrap(),
        ] {
            let d = decompose(&m, DEFAULT_TOL).unwrap();
            let back = reconstruct(&d);
            for i in 0..2 {
                for j in 0..2 {
                    assert_abs_diff_eq!(back.get(i, j), m.get(i, j), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn reconstruct_random_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let q = random_orthogonal(3, &mut rng);
        let lambda = [1.5, -2.25, 0.75];
        let diag = DMatrix::from_fn(3, 3, |i, j| if i == j { lambda[i] } else { 0.0 });
        let m = &q * diag * q.transpose();
        let rows: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| m[(i, j)]).collect())
            .collect();
        let mat = SquareMatrix::from_rows(&rows).unwrap();
        let back = reconstruct(&decompose(&mat, DEFAULT_TOL).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(back.get(i, j), mat.get(i, j), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn hypothesis_gap_for_default_pair() {
        let a = sm(2, &[0.0, 1.0, 1.0, 0.0]);
        let b = sm(2, &[0.0, 1.0, 4.0, 0.0]);
        let report = check_hypothesis(&a, &b, DEFAULT_TOL).unwrap();
        assert!(report.satisfied);
        assert_abs_diff_eq!(report.gap, 10.0f64.sqrt() - 3.0, epsilon = 1e-12);
    }

    #[test]
    fn commuting_diagonal_pair_has_zero_gap() {
        let a = SquareMatrix::diagonal(&[1.0, -1.0]).unwrap();
        let b = SquareMatrix::diagonal(&[2.0, -2.0]).unwrap();
        let report = check_hypothesis(&a, &b, DEFAULT_TOL).unwrap();
        assert!(!report.satisfied);
        assert_abs_diff_eq!(report.gap, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn cancelling_pair_fails_on_the_sum() {
        let a = sm(2, &[0.0, 1.0, 1.0, 0.0]);
        let b = a.scale(-1.0);
        let err = check_hypothesis(&a, &b, DEFAULT_TOL).unwrap_err();
        match err {
            HypothesisError::Decomposition { role, source } => {
                assert_eq!(role, SummandRole::Sum);
                assert!(matches!(source, SpectralError::NotInvertible { .. }));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let a = sm(2, &[0.0, 1.0, 1.0, 0.0]);
        let b = sm(1, &[1.0]);
        assert!(matches!(
            check_hypothesis(&a, &b, DEFAULT_TOL),
            Err(HypothesisError::DimensionMismatch { left: 2, right: 1 })
        ));
    }

    #[test]
    fn positive_scaling_scales_eigenvalues() {
        let m = sm(2, &[0.0, 1.0, 1.0, 0.0]);
        let d1 = decompose(&m, DEFAULT_TOL).unwrap();
        let d3 = decompose(&m.scale(3.0), DEFAULT_TOL).unwrap();
        for i in 0..2 {
            assert_abs_diff_eq!(
                d3.eigenvalues()[i],
                3.0 * d1.eigenvalues()[i],
                epsilon = 1e-12
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn random_hyperbolic_invariants(n in 2usize..=4, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (m, lambda) = random_hyperbolic(n, &mut rng);
            let d = decompose(&m, DEFAULT_TOL).unwrap();

            // Eigenvalues recovered in order.
            for (got, want) in d.eigenvalues().iter().zip(lambda.iter()) {
                prop_assert!((got - want).abs() < 1e-9, "eigenvalue {got} vs {want}");
            }

            // Unit right eigenvectors satisfying the eigen-relation.
            let scale = m.max_abs();
            for i in 0..n {
                let r = d.right_eigenvector(i);
                prop_assert!((r.norm() - 1.0).abs() < 1e-12);
                let res = (m.as_dmatrix() * &r - d.eigenvalues()[i] * &r).norm();
                prop_assert!(res < 1e-10 * scale.max(1.0), "eigen residual {res}");
                let l = d.left_eigenvector(i);
                let lres = (m.as_dmatrix().transpose() * &l - d.eigenvalues()[i] * &l).norm();
                prop_assert!(lres < 1e-8 * scale.max(1.0) * l.norm(), "left residual {lres}");
            }

            // Biorthogonality and completeness.
            let mut completeness = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let dot = d.left_eigenvector(j).dot(&d.right_eigenvector(i));
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((dot - want).abs() < 1e-10, "biorthogonality ({i},{j}) = {dot}");
                }
                completeness += spectral_projection(&d, i).unwrap().as_dmatrix();
            }
            prop_assert!((completeness - DMatrix::identity(n, n)).norm() < 1e-10);

            // Reconstruction.
            let back = reconstruct(&d);
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((back.get(i, j) - m.get(i, j)).abs() < 1e-10 * scale.max(1.0));
                }
            }
        }
    }
}

//! Exact finite-term representation of the function space the operators
//! act on: bounded, uniformly continuous maps `ℝ → ℝⁿ` under the
//! sup-Euclidean norm.
//!
//! A [`VectorFunction`] is a finite sum of terms `profile(x + shift) · coeff`
//! with closed-form scalar profiles, so evaluation (and differentiation) is
//! exact at every real point — there is no sampling grid behind the values.
//! Sampling enters only in [`sup_distance`], which estimates sup-norms on a
//! bounded window and is documented as a *lower bound* that tightens as the
//! grid refines. Exact statements about where a function vanishes come from
//! support arithmetic ([`support_interval`]), never from sampling.
//!
//! Terms are deliberately never merged or reordered here; algebraic
//! simplification belongs to the operator layer, which keeps function
//! values bit-stable under term bookkeeping.

use nalgebra::DVector;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::spectral::SpectralDecomposition;

/// Errors from function construction and sup-norm estimation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuncspaceError {
    /// Coefficient vector length does not match the function dimension.
    #[error("coefficient has dimension {got}, expected {expected}")]
    CoeffDimension { expected: usize, got: usize },
    /// Two functions of different dimensions were combined.
    #[error("function dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    /// A shift, coefficient, or profile parameter is NaN or infinite.
    #[error("{what} must be finite")]
    NonFinite { what: &'static str },
    /// A Gaussian profile needs a strictly positive width.
    #[error("gaussian width must be positive, got {width}")]
    BadWidth { width: f64 },
    /// Interval endpoints out of order or NaN.
    #[error("invalid interval [{lo}, {hi}]")]
    BadInterval { lo: f64, hi: f64 },
    /// `support_interval` on a function with an unbounded-support term.
    #[error("function has a term with unbounded support")]
    UnboundedSupport,
    /// Sup-norm estimation needs a bounded window when any term has
    /// unbounded support.
    #[error("a bounded domain must be supplied when unbounded-support profiles are present")]
    UnboundedDomain,
    /// Unparseable profile string.
    #[error("cannot parse profile spec {spec:?} (expected bump | sine:<freq> | gaussian:<center>:<width>)")]
    BadProfileSpec { spec: String },
}

/// Closed-form scalar building block of a [`VectorFunction`].
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarProfile {
    /// Smooth bump supported on (0,1): `exp(4 − 1/(x(1−x)))` inside, 0
    /// outside, normalized so the maximum is exactly 1 at x = ½.
    Bump,
    /// `sin(frequency · x)`; frequency 0 gives the zero (constant) function.
    Sine { frequency: f64 },
    /// `exp(−((x−center)/width)²)`, maximum 1 at the center.
    Gaussian { center: f64, width: f64 },
}

impl ScalarProfile {
    /// Profile value at `x`; total on ℝ, no sampling involved.
    pub fn value(&self, x: f64) -> f64 {
        match self {
            ScalarProfile::Bump => bump_value(x),
            ScalarProfile::Sine { frequency } => (frequency * x).sin(),
            ScalarProfile::Gaussian { center, width } => {
                let z = (x - center) / width;
                (-z * z).exp()
            }
        }
    }

    /// First derivative at `x`, in closed form.
    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            ScalarProfile::Bump => bump_derivative(x),
            ScalarProfile::Sine { frequency } => frequency * (frequency * x).cos(),
            ScalarProfile::Gaussian { center, width } => {
                let z = (x - center) / width;
                -2.0 * z / width * (-z * z).exp()
            }
        }
    }

    /// Support as a compact interval, or `None` when unbounded.
    pub fn compact_support(&self) -> Option<(f64, f64)> {
        match self {
            ScalarProfile::Bump => Some((0.0, 1.0)),
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), FuncspaceError> {
        match *self {
            ScalarProfile::Bump => Ok(()),
            ScalarProfile::Sine { frequency } => {
                if frequency.is_finite() {
                    Ok(())
                } else {
                    Err(FuncspaceError::NonFinite {
                        what: "sine frequency",
                    })
                }
            }
            ScalarProfile::Gaussian { center, width } => {
                if !center.is_finite() {
                    return Err(FuncspaceError::NonFinite {
                        what: "gaussian center",
                    });
                }
                if !width.is_finite() {
                    return Err(FuncspaceError::NonFinite {
                        what: "gaussian width",
                    });
                }
                if width <= 0.0 {
                    return Err(FuncspaceError::BadWidth { width });
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for ScalarProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarProfile::Bump => write!(f, "bump"),
            ScalarProfile::Sine { frequency } => write!(f, "sine:{frequency}"),
            ScalarProfile::Gaussian { center, width } => {
                write!(f, "gaussian:{center}:{width}")
            }
        }
    }
}

impl FromStr for ScalarProfile {
    type Err = FuncspaceError;

    /// Parse `bump`, `sine:<freq>`, or `gaussian:<center>:<width>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FuncspaceError::BadProfileSpec {
            spec: s.to_string(),
        };
        let mut parts = s.split(':');
        let head = parts.next().ok_or_else(bad)?;
        let profile = match head {
            "bump" => {
                if parts.next().is_some() {
                    return Err(bad());
                }
                ScalarProfile::Bump
            }
            "sine" => {
                let freq: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                if parts.next().is_some() {
                    return Err(bad());
                }
                ScalarProfile::Sine { frequency: freq }
            }
            "gaussian" => {
                let center: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                let width: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                if parts.next().is_some() {
                    return Err(bad());
                }
                ScalarProfile::Gaussian { center, width }
            }
            _ => return Err(bad()),
        };
        profile.validate()?;
        Ok(profile)
    }
}

fn bump_value(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let q = x * (1.0 - x);
    (4.0 - 1.0 / q).exp()
}

fn bump_derivative(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let q = x * (1.0 - x);
    let arg = 4.0 - 1.0 / q;
    // Near the support edges exp underflows to an exact zero while 1/q²
    // overflows; the true product tends to zero, so cut it off before the
    // arithmetic can manufacture 0·∞. exp(−700) · q⁻² < 1e−298 here.
    if arg < -700.0 {
        return 0.0;
    }
    arg.exp() * (1.0 - 2.0 * x) / (q * q)
}

/// One `profile(x + shift) · coeff` summand.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionTerm {
    profile: ScalarProfile,
    shift: f64,
    coeff: DVector<f64>,
}

impl FunctionTerm {
    pub fn profile(&self) -> &ScalarProfile {
        &self.profile
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn coeff(&self) -> &DVector<f64> {
        &self.coeff
    }

    /// The x-interval where this term can be nonzero, if compact: the
    /// profile support translated by −shift.
    fn compact_support(&self) -> Option<(f64, f64)> {
        self.profile
            .compact_support()
            .map(|(lo, hi)| (lo - self.shift, hi - self.shift))
    }
}

/// Finite sum `f(x) = Σₖ profileₖ(x + shiftₖ) · coeffₖ`, evaluated exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFunction {
    n: usize,
    terms: Vec<FunctionTerm>,
}

impl VectorFunction {
    /// The zero function in dimension `n` (no terms).
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        VectorFunction {
            n,
            terms: Vec::new(),
        }
    }

    /// Single-term function; validates the profile, shift, and coefficient.
    pub fn single_term(
        profile: ScalarProfile,
        shift: f64,
        coeff: DVector<f64>,
    ) -> Result<Self, FuncspaceError> {
        let mut f = VectorFunction::zero(coeff.len().max(1));
        f.push_term(profile, shift, coeff)?;
        Ok(f)
    }

    /// Append a term. Terms are stored verbatim — no merging, no reordering,
    /// and zero coefficients are kept (dropping them is the operator
    /// layer's business).
    pub fn push_term(
        &mut self,
        profile: ScalarProfile,
        shift: f64,
        coeff: DVector<f64>,
    ) -> Result<(), FuncspaceError> {
        profile.validate()?;
        if !shift.is_finite() {
            return Err(FuncspaceError::NonFinite { what: "term shift" });
        }
        if coeff.len() != self.n {
            return Err(FuncspaceError::CoeffDimension {
                expected: self.n,
                got: coeff.len(),
            });
        }
        if coeff.iter().any(|c| !c.is_finite()) {
            return Err(FuncspaceError::NonFinite {
                what: "term coefficient",
            });
        }
        self.terms.push(FunctionTerm {
            profile,
            shift,
            coeff,
        });
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[FunctionTerm] {
        &self.terms
    }

    /// Exact value at `x`.
    pub fn eval(&self, x: f64) -> DVector<f64> {
        let mut acc = DVector::zeros(self.n);
        for term in &self.terms {
            let v = term.profile.value(x + term.shift);
            if v != 0.0 {
                acc.axpy(v, &term.coeff, 1.0);
            }
        }
        acc
    }

    /// Exact derivative f′(x), term-by-term in closed form.
    pub fn eval_derivative(&self, x: f64) -> DVector<f64> {
        let mut acc = DVector::zeros(self.n);
        for term in &self.terms {
            let v = term.profile.derivative(x + term.shift);
            if v != 0.0 {
                acc.axpy(v, &term.coeff, 1.0);
            }
        }
        acc
    }

    /// Term-list concatenation: `(f ⊎ g)(x) = f(x) + g(x)`.
    pub fn concat(&self, other: &VectorFunction) -> Result<VectorFunction, FuncspaceError> {
        if self.n != other.n {
            return Err(FuncspaceError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(VectorFunction { n: self.n, terms })
    }

    /// Scale every coefficient by `c`.
    pub fn scale(&self, c: f64) -> VectorFunction {
        assert!(c.is_finite(), "scale factor must be finite");
        VectorFunction {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|t| FunctionTerm {
                    profile: t.profile.clone(),
                    shift: t.shift,
                    coeff: &t.coeff * c,
                })
                .collect(),
        }
    }

    fn has_unbounded_term(&self) -> bool {
        self.terms
            .iter()
            .any(|t| t.profile.compact_support().is_none())
    }
}

/// Closed x-interval, possibly with infinite endpoints; the `empty` flag
/// distinguishes the support of the zero function from the point {0}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
    empty: bool,
}

impl Interval {
    /// Interval [lo, hi]; endpoints may be ±∞ but not NaN, and must be
    /// ordered.
    pub fn new(lo: f64, hi: f64) -> Result<Self, FuncspaceError> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(FuncspaceError::BadInterval { lo, hi });
        }
        Ok(Interval {
            lo,
            hi,
            empty: false,
        })
    }

    /// The empty support convention: lo = hi = 0, flagged.
    pub fn empty() -> Self {
        Interval {
            lo: 0.0,
            hi: 0.0,
            empty: true,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Smallest interval containing both; empty intervals are neutral.
    pub fn hull(&self, other: &Interval) -> Interval {
        if self.empty {
            return *other;
        }
        if other.empty {
            return *self;
        }
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
            empty: false,
        }
    }

    /// Symmetric padding by a nonnegative amount.
    pub fn pad(&self, amount: f64) -> Interval {
        assert!(amount >= 0.0 && amount.is_finite());
        if self.empty {
            // Padding the empty convention gives a window around 0.
            return Interval {
                lo: -amount,
                hi: amount,
                empty: false,
            };
        }
        Interval {
            lo: self.lo - amount,
            hi: self.hi + amount,
            empty: false,
        }
    }
}

/// Smallest closed interval outside which `f` is identically zero.
///
/// Terms with a zero coefficient vector are ignored; any remaining term
/// with unbounded support is an error. The zero function returns the
/// empty-flagged convention interval.
pub fn support_interval(f: &VectorFunction) -> Result<Interval, FuncspaceError> {
    let mut acc = Interval::empty();
    for term in &f.terms {
        if term.coeff.iter().all(|&c| c == 0.0) {
            continue;
        }
        let (lo, hi) = term
            .compact_support()
            .ok_or(FuncspaceError::UnboundedSupport)?;
        acc = acc.hull(&Interval {
            lo,
            hi,
            empty: false,
        });
    }
    Ok(acc)
}

/// Deterministic sampling grid on a bounded interval: a uniform mesh with
/// `points_per_unit` density plus the given extra abscissae (clipped to the
/// interval), sorted with exact duplicates removed.
pub fn sample_grid(domain: &Interval, points_per_unit: usize, extra: &[f64]) -> Vec<f64> {
    assert!(domain.is_bounded(), "sampling needs a bounded interval");
    assert!(points_per_unit >= 1);
    let lo = domain.lo;
    let hi = domain.hi;
    let len = hi - lo;
    let intervals = ((len * points_per_unit as f64).ceil() as usize).max(1);
    let mut grid = Vec::with_capacity(intervals + 1 + extra.len());
    for i in 0..=intervals {
        grid.push(lo + len * (i as f64) / (intervals as f64));
    }
    for &x in extra {
        if x >= lo && x <= hi {
            grid.push(x);
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid points"));
    grid.dedup();
    grid
}

fn resolve_domain(
    f: &VectorFunction,
    g: &VectorFunction,
    domain: Option<Interval>,
) -> Result<Interval, FuncspaceError> {
    let unbounded_terms = f.has_unbounded_term() || g.has_unbounded_term();
    match domain {
        Some(d) if d.is_bounded() => Ok(d),
        Some(_) if unbounded_terms => Err(FuncspaceError::UnboundedDomain),
        None if unbounded_terms => Err(FuncspaceError::UnboundedDomain),
        explicit => {
            // All supports compact: the padded support hull is the honest
            // window (the difference vanishes outside it). An explicit
            // unbounded domain is clipped to the same hull.
            let hull = support_interval(f)?.hull(&support_interval(g)?).pad(1.0);
            match explicit {
                Some(d) => {
                    Interval::new(d.lo.max(hull.lo), d.hi.min(hull.hi).max(d.lo.max(hull.lo)))
                }
                None => Ok(hull),
            }
        }
    }
}

/// Euclidean norm with max-component scaling.
///
/// Splitting products at large subdivision counts carry coefficients
/// beyond 1e154, whose squares overflow to infinity even though the norm
/// itself is representable; scaling by the largest component keeps the
/// intermediate squares near 1. Exact zero stays exactly zero, and NaN
/// components propagate.
pub(crate) fn robust_norm(v: &DVector<f64>) -> f64 {
    let mut scale = 0.0f64;
    for &x in v.iter() {
        if x.is_nan() {
            return f64::NAN;
        }
        scale = scale.max(x.abs());
    }
    if scale == 0.0 || scale.is_infinite() {
        return scale;
    }
    let mut sum = 0.0f64;
    for &x in v.iter() {
        let r = x / scale;
        sum += r * r;
    }
    scale * sum.sqrt()
}

/// Grid-sampled sup of `‖f(x) − g(x)‖₂` over the domain.
///
/// The grid is uniform at `points_per_unit` density plus every compact
/// term's support endpoints and midpoint, so support boundaries are always
/// probed. The result is a certified *lower bound* on the true sup-norm
/// distance that converges to it as the grid refines; it is never an upper
/// bound.
///
/// Without an explicit domain the padded union of compact supports is
/// used; unbounded-support profiles require a bounded domain.
pub fn sup_distance(
    f: &VectorFunction,
    g: &VectorFunction,
    domain: Option<Interval>,
    points_per_unit: usize,
) -> Result<f64, FuncspaceError> {
    if f.n != g.n {
        return Err(FuncspaceError::DimensionMismatch {
            left: f.n,
            right: g.n,
        });
    }
    let dom = resolve_domain(f, g, domain)?;
    let mut extra = Vec::new();
    for term in f.terms.iter().chain(g.terms.iter()) {
        if let Some((lo, hi)) = term.compact_support() {
            extra.push(lo);
            extra.push(hi);
            extra.push(0.5 * (lo + hi));
        }
    }
    let grid = sample_grid(&dom, points_per_unit, &extra);
    let mut best = 0.0f64;
    for &x in &grid {
        let d = robust_norm(&(f.eval(x) - g.eval(x)));
        best = best.max(d);
    }
    Ok(best)
}

/// The canonical counterexample input: a unit bump pointing along the top
/// eigenvector (largest eigenvalue) of the decomposition.
pub fn bump_direction(d: &SpectralDecomposition) -> VectorFunction {
    let coeff = d.right_eigenvector(d.n() - 1);
    VectorFunction::single_term(ScalarProfile::Bump, 0.0, coeff)
        .expect("unit eigenvector is a valid coefficient")
}

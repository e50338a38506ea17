//! Exact shift-operator laboratory for operator-splitting experiments on
//! first-order hyperbolic systems.
//!
//! Constant-coefficient hyperbolic systems `∂ₜu = 𝒜 ∂ₓu` are solved exactly
//! by transport along characteristics: the solution operator is a finite sum
//! of matrix-weighted shifts. That sum is closed under composition, so
//! Lie–Trotter products `[S(t/m) T(t/m)]^m` can be composed *exactly* —
//! no spatial grid, no time-stepping error — and compared against the exact
//! solution operator of the summed system. The crate provides:
//!
//! - [`spectral`]: eigendecomposition with biorthogonal left/right
//!   eigenvector systems and the eigenvalue-gap check that separates the
//!   divergent examples from the benign ones.
//! - [`funcspace`]: exact finite-term representation of the bounded
//!   uniformly continuous functions the operators act on.
//! - [`transport`]: the shift-operator algebra — construction from spectral
//!   data, exact composition, Trotter products, support-edge certificates,
//!   and operator-norm bounds.
//! - [`experiments`]: the measurement suite — divergence reports with
//!   machine-checkable vanishing certificates, commuting positive controls,
//!   generator and PDE residual tables, and stability probes.
//! - [`report`]: deterministic JSON/CSV/gnuplot emission.
//! - [`cli`]: the `trotterlab` command-line surface.

pub mod cli;
pub mod experiments;
pub mod funcspace;
pub mod report;
pub mod spectral;
pub mod transport;

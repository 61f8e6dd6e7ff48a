//! Dirichlet solutions of the invariant Laplacian on the unit ball and the
//! sharp gradient bound attached to them.
//!
//! The operator acting on functions of `x` in the unit ball of R^n is
//!
//! ```text
//! L u = (1 - |x|^2) [ (1 - |x|^2)/4 * lap(u) + alpha * <x, grad u> + alpha (n/2 - 1 - alpha) u ]
//! ```
//!
//! with `n >= 3` and `alpha > -1/2` so that the Dirichlet problem is solvable.
//! Solutions are reproduced from boundary data by a Poisson-type kernel with a
//! power-law profile; everything in this crate is built from that kernel:
//!
//! * [`specfun`]: gamma, hypergeometric and Gegenbauer evaluation underlying
//!   every closed form,
//! * [`kernel`]: the kernel itself, its axis gradient, total mass, and a
//!   finite-difference check that the operator annihilates it,
//! * [`quadrature`]: surface integrals of zonal functions, reduced to weighted
//!   one-dimensional rules with panels adapted to kernel steepness and to the
//!   level-crossing singularities of `|kernel - a|^s`,
//! * [`extremal`]: the optimal-constant distance `G_p(r)` from the kernel to
//!   constants in the dual norm, its closed forms at `p = 1, 2, inf`, and the
//!   sharp gradient bound constant at the origin,
//! * [`poisson`]: solving the Dirichlet problem for zonal data (direct
//!   quadrature and spherical-harmonic series), plus bound verification and
//!   the cap data that exhaust the `p = 1` bound,
//! * [`oracle`]: slow brute-force evaluators (grid minimization, adaptive
//!   quadrature, finite differences) kept independent of the fast paths,
//! * [`verify`]: the self-check battery wired into both the CLI and the
//!   acceptance test suite.
//!
//! All numerics are f64. Functions taking [`ModelParams`] assume the
//! parameter invariants hold; constructing `ModelParams` enforces them.

pub mod extremal;
pub mod kernel;
pub mod oracle;
mod params;
pub mod poisson;
pub mod quadrature;
pub mod specfun;
pub mod verify;

pub use params::ModelParams;

/// Error type shared by every fallible operation in the crate.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Parameter combination outside the solvable range.
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    /// Input outside an operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A series failed to meet its stopping rule within the term cap.
    #[error("series did not converge within {max_terms} terms (z = {z})")]
    NonConvergence { max_terms: usize, z: f64 },
    /// Root bracketing or iteration failure in the optimal-constant solve.
    #[error("root finding failed: {0}")]
    RootFinding(String),
    /// An eigenvalue ratio denominator too close to zero to divide by.
    #[error("degenerate eigenvalue denominator: {0}")]
    DegenerateEigenvalue(String),
}

pub type Result<T> = std::result::Result<T, Error>;

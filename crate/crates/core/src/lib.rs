//! Exact enumeration engine for quarter-plane lattice walks with boundary
//! interactions.
//!
//! The computational model is the ring of truncated Laurent series in `t`
//! whose coefficients are windowed Laurent polynomials in `x` over
//! arbitrary-precision rationals. On top of that ring sit the kernel-method
//! tools (step generators, functional equations, kernel roots, symmetry
//! groups), canonical factorization with its winding-number index, Weierstrass
//! preparation by Hensel lifting, and end-to-end solver pipelines. Every
//! pipeline output is checked against a brute-force dynamic-programming
//! oracle; the oracle is the ground truth for all series coefficients.
//!
//! All arithmetic is exact; there is no floating-point mode.

pub mod bivar;
pub mod catalog;
pub mod expr;
pub mod factor;
pub mod kernel;
pub mod laurent;
pub mod number;
pub mod oracle;
pub mod orbit;
pub mod series;
pub mod solve;
pub mod verify;

pub use bivar::BivarLaurent;
pub use laurent::LaurentPoly;
pub use number::Rat;
pub use series::TSeries;

/// Errors surfaced by the series ring and the solver layers.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Inversion attempted on a series whose leading structure is not a unit
    /// in the windowed ring.
    #[error("series is not a unit: {0}")]
    NotAUnit(String),
    /// Square root attempted on a series whose leading monomial is not an
    /// admissible square.
    #[error("series is not a square: {0}")]
    NotASquare(String),
    /// `log_unit` requires the leading monomial 1 and an ascending remainder.
    #[error("series is not normalized for log: {0}")]
    NotNormalized(String),
    /// `exp_series` argument fails both convergence conditions.
    #[error("exponential sum does not converge windowwise: {0}")]
    Divergent(String),
    /// Substitution argument violates the composition law.
    #[error("invalid substitution: {0}")]
    InvalidSubstitution(String),
    /// A coefficient was requested outside the certified-exact inner window.
    #[error("x-degree {degree} lies outside the exact window [{lo}, {hi}]")]
    WindowExceeded { degree: i64, lo: i64, hi: i64 },
    /// Weierstrass preparation needs a nonzero polynomial at t = 0.
    #[error("polynomial vanishes identically at t = 0; divide by a power of t first")]
    DegenerateAtTZero,
    /// An elimination pivot is not invertible in the windowed ring.
    #[error("elimination pivot is not a unit: {0}")]
    PivotNotUnit(String),
    /// The normalized equation has extra free unknowns (positive index).
    #[error("index obstruction: {extra} extra unknown(s) beyond Q(0,0)")]
    IndexObstruction { extra: i64 },
    /// A conformal-map window is too small for the requested degrees.
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    /// Catalog or expression input failed to parse.
    #[error("parse error: {0}")]
    Parse(String),
    /// No solver pipeline is implemented for the requested model.
    #[error("no pipeline implemented for model {0}")]
    NoPipeline(String),
    /// Internal consistency check failed; indicates a bug, never expected.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Exponential moment problems on the half-line and on compact intervals.
//!
//! The crate evaluates the fundamental exponential polynomial `Φ_Λ` of a set
//! of distinct real frequencies, its derivative basis `b_j = j! Φ^(N-j)`, and
//! the exponential moments `ĉ_j = ∫ b_j dμ` of a nonnegative measure. Those
//! sequences are certified to be classical moment sequences by checking
//! positive semidefiniteness of their Hankel forms, exactly or in floating
//! point, and a representing atomic measure is recovered through the
//! orthogonal-polynomial recurrence and the Gauss rule.
//!
//! Module map:
//! - [`numerics`]: exact rationals, Pochhammer symbols, Bareiss determinants.
//! - [`expcore`]: frequencies, `Φ`, its Taylor series and the basis `b_j`.
//! - [`hankel`]: Hankel forms, PSD certification, the Chammam product formula.
//! - [`measures`]: measures and their exponential/power moments.
//! - [`recover`]: Stieltjes/Hausdorff solvability and measure recovery.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod expcore;
pub mod hankel;
pub mod measures;
pub mod numerics;
mod quadrature;
pub mod recover;

use std::fmt;

pub use expcore::{ExpBasisValues, Frequencies, PhiSeries};
pub use hankel::{HankelForm, PsdReport};
pub use measures::{AtomicMeasure, Domain, Measure, MomentSequence};
pub use numerics::{Rational, RationalMatrix};
pub use recover::{JacobiCoefficients, SolvabilityReport, TransferReport};

/// Pipeline stage a recovery failure is attributed to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Moments,
    Solvability,
    Jacobi,
    Gauss,
    Domain,
    Residual,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Moments => "moments",
            Stage::Solvability => "solvability",
            Stage::Jacobi => "jacobi",
            Stage::Gauss => "gauss",
            Stage::Domain => "domain",
            Stage::Residual => "residual",
        };
        f.write_str(name)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("frequencies must be pairwise distinct (gap {gap:e} below {threshold:e})")]
    RepeatedFrequencies { gap: f64, threshold: f64 },
    #[error("invalid frequencies: {0}")]
    InvalidFrequencies(String),
    #[error("exponent overflow: λ·x = {0} exceeds the f64 range")]
    Overflow(f64),
    #[error("Taylor series not converged after {terms} terms")]
    SeriesTruncation { terms: usize },
    #[error("index out of range: {0}")]
    IndexRange(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("division by zero: {0}")]
    ZeroDivision(String),
    #[error("{0}")]
    Domain(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("quadrature did not reach the requested accuracy (estimate {estimate:?})")]
    Quadrature { estimate: Vec<f64> },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("[{stage}] {message}")]
    Stage { stage: Stage, message: String },
}

impl Error {
    pub(crate) fn stage(stage: Stage, message: impl Into<String>) -> Self {
        Error::Stage { stage, message: message.into() }
    }

    /// Stage tag for recovery failures, `None` for plain input errors.
    pub fn stage_tag(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

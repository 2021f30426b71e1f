use thiserror::Error;

use crate::algebra::K0Class;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operands do not fit together (block sizes, matrix shapes, owners).
    #[error("structural mismatch: {0}")]
    Shape(String),

    /// An input failed its defining identity (projection, unitary, positivity, ...).
    #[error("{what} failed validation (residual {residual:.3e})")]
    Validation { what: String, residual: f64 },

    /// A computed quantity contradicts a structural fact; indicates numerically broken input.
    #[error("internal consistency violated: {0}")]
    Consistency(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The range of a map does not exhaust the target; carries the class of the defect.
    #[error("range is a proper summand of the target; defect class {defect}")]
    RangeDefect {
        defect: K0Class,
        projection: Box<crate::algebra::AlgMatrix>,
    },

    /// The square-root series would need more than `limit` terms; `last_term` is
    /// the norm of the summand at the limit.
    #[error("square-root series not converged after {limit} terms (last summand {last_term:.3e}); use the oracle method")]
    Convergence { limit: usize, last_term: f64 },
}

use thiserror::Error;

/// Errors raised by the analysis pipeline. Mathematical verdicts (a failed
/// identity, an infeasible complement) are reported through result types, not
/// through this enum; these variants signal misuse or inconsistent input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("linalg: dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("linalg: action matrix {index} does not preserve the subspace")]
    ActionNotInvariant { index: usize },

    #[error("tensor: {0}")]
    Tensor(String),

    #[error("tensor: matrix is singular")]
    Singular,

    #[error("metric: {0}")]
    Metric(String),

    #[error("data: shape mismatch: {0}")]
    Shape(String),

    #[error("data: parse error: {0}")]
    Parse(String),

    #[error("filtration: index ({r}, {s}) outside stored range (r <= {r_max}, s <= {s_max})")]
    OutOfRange {
        r: i32,
        s: i32,
        r_max: i32,
        s_max: i32,
    },

    #[error("{module}: precondition failed: {reason}")]
    Precondition {
        module: &'static str,
        reason: String,
    },

    #[error("{module}: linear system infeasible: {reason}")]
    Infeasible {
        module: &'static str,
        reason: String,
    },

    #[error("nomizu: Jacobi identity fails on basis triple {triple:?}")]
    Jacobi { triple: (usize, usize, usize) },

    #[error("nomizu: {0}")]
    Closure(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

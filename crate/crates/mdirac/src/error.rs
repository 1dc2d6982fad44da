//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by constructors, validators, and field operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("spacetime index {0} out of range 0..=3")]
    IndexOutOfRange(usize),

    #[error("matrix not hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrices do not commute (residual {0:.3e})")]
    NotCommuting(f64),

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("matrix is singular or too ill-conditioned to invert")]
    SingularMatrix,

    #[error("y must be nonzero for the Jordan-block pair")]
    ZeroY,

    #[error("bad partition: p={p} + q={q} != l={l}")]
    BadPartition { p: usize, q: usize, l: usize },

    #[error("pair is not in canonical class: {0}")]
    NotCanonical(String),

    #[error("matrix not antihermitian (deviation {0:.3e})")]
    NotAntihermitian(f64),

    #[error("generator not in the Lie algebra (deviation {0:.3e})")]
    NotInLieAlgebra(f64),

    #[error("field is not a solution (residual {0:.3e})")]
    NotASolution(f64),

    #[error("N, K must be hermitian for lagrangian densities (deviation {0:.3e})")]
    NonHermitianPair(f64),

    #[error("term budget exceeded: {count} terms > budget {budget}")]
    TermBudgetExceeded { count: usize, budget: usize },

    #[error("rank-deficient sample: smallest singular value ratio {0:.3e}")]
    RankDeficient(f64),

    #[error("matrix not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("joint diagonalization failed to converge")]
    JointDiagonalizationFailed,

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
}

pub type Result<T> = std::result::Result<T, Error>;

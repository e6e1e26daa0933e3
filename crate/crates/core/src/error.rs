use thiserror::Error;

use crate::prescribe::AdmissibilityReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("eigensolver did not converge after {iterations} QR sweeps (dim {dim})")]
    EigNoConvergence { dim: usize, iterations: usize },

    #[error("matrix of dimension {dim} exceeds eigensolver cap {cap}")]
    EigTooLarge { dim: usize, cap: usize },

    #[error("matrix is not Hermitian positive semidefinite (min eigenvalue {min_eig:e}, tolerance {tol:e})")]
    Indefinite { min_eig: f64, tol: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("zero starting vector")]
    ZeroStart,

    #[error(
        "block Arnoldi breakdown at step {step} (rank {rank} < {p}); breakdown is not supported"
    )]
    BlockBreakdown { step: usize, rank: usize, p: usize },

    #[error("invalid normalizing quantity: {0}")]
    InvalidNormalizingQuantity(String),

    #[error("inadmissible prescription:\n{0}")]
    Inadmissible(AdmissibilityReport),

    #[error("incompatible prescription at step {step}: {reason}")]
    Incompatible { step: usize, reason: String },

    #[error("end-of-cycle stagnation in cycle {cycle} cannot be constructed")]
    EndOfCycleStagnation { cycle: usize },

    #[error("singular block Vandermonde for solvents {indices:?} (condition {cond:e})")]
    SingularVandermonde { indices: Vec<usize>, cond: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

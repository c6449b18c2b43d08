use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("not Hermitian (max |rho_ij - conj(rho_ji)| = {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("not positive semi-definite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("coefficients ({c1}, {c2}, {c3}) lie outside the Bell-diagonal tetrahedron")]
    OutsideTetrahedron { c1: f64, c2: f64, c3: f64 },

    #[error("state is not Bell-diagonal (off-family magnitude {0:e})")]
    NotBellDiagonal(f64),

    #[error("mixture weights must be non-negative and sum to 1 (sum = {0})")]
    InvalidWeights(f64),

    #[error("operator on arm {arm} is not unitary (defect {defect:e})")]
    NotUnitary { arm: u8, defect: f64 },

    #[error("measurement direction {0} is not a unit vector")]
    NotUnitVector(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("setting list does not span the two-qubit operator space (rank {0} < 16)")]
    RankDeficient(usize),

    #[error("unknown plate id {0:?} (expected H1..H4 or Q1..Q4)")]
    UnknownPlate(String),

    #[error("optimizer did not converge after {iterations} iterations (best value {best_value})")]
    NotConverged { iterations: usize, best_value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{n_qubits} qubits exceeds the {cap}-qubit cap for {what}")]
    CapExceeded {
        n_qubits: usize,
        cap: usize,
        what: &'static str,
    },

    #[error("matrix is not Hermitian (max deviation {max_dev:.3e})")]
    NotHermitian { max_dev: f64 },

    #[error("state vector is not normalized (squared norm {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("operator has zero Frobenius norm; Pauli coefficients are undefined")]
    ZeroOperator,

    #[error("operator is not traceless (identity coefficient {coeff:.3e})")]
    NotTraceless { coeff: f64 },

    #[error("negative outcome probability {p:.3e}; density matrix is not positive semidefinite")]
    NegativeProbability { p: f64 },

    #[error("alpha = {alpha} rejected: {reason}")]
    InvalidAlpha { alpha: f64, reason: String },

    #[error("Monte-Carlo estimate failed its stability check: {0}")]
    Divergence(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::state::MAX_QUBITS;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {n} out of range (1..={MAX_QUBITS})")]
    QubitCount { n: usize },

    #[error("operand acts on {left} qubits, expected {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("site {site} out of range for {n_qubits} qubits")]
    SiteOutOfRange { site: usize, n_qubits: usize },

    #[error("duplicate factor on site {site}")]
    DuplicateSite { site: usize },

    #[error("layer '{label}' has non-commuting generator terms {a} and {b}")]
    NonCommutingGenerator { label: String, a: String, b: String },

    #[error("layer '{label}' generator term {term} does not commute with symmetry tag {tag}")]
    TagViolation { label: String, term: String, tag: String },

    #[error("parameter vector has length {got}, ansatz expects {expected}")]
    ParamLength { got: usize, expected: usize },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("dense solve limited to {max} qubits, got {n}")]
    DenseTooLarge { n: usize, max: usize },

    #[error("Lanczos did not converge within {max_iter} iterations (last Ritz change {last_change:e})")]
    LanczosNoConvergence { max_iter: usize, last_change: f64 },

    #[error("natural gradient solve failed: {0}")]
    SolveFailed(String),

    #[error("ground-state energy is zero; normalized energy undefined")]
    ZeroGroundEnergy,
}

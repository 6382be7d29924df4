use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cutoff {cutoff} too small for amplitude {amplitude}: Poisson tail {tail:e} exceeds {tolerance:e}")]
    Truncation {
        amplitude: f64,
        cutoff: usize,
        tail: f64,
        tolerance: f64,
    },
    #[error("Fock space dimension overflows: cutoff {cutoff}, {modes} modes")]
    DimensionOverflow { cutoff: usize, modes: usize },
    #[error("mode spec mismatch: {0}")]
    ModeMismatch(String),
    #[error("mode index {mode} out of range for {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },
    #[error("partial trace must keep at least one mode")]
    EmptyKeep,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("state leaks above the cutoff (tail mass {tail:e} exceeds {tolerance:e})")]
    Leakage { tail: f64, tolerance: f64 },
    #[error("outcome probability vanishes; fidelity undefined")]
    DegenerateOutcome,
    #[error(
        "quadrature did not converge: doubling changed {quantity} by {change:e} (limit {limit:e})"
    )]
    QuadratureNotConverged {
        quantity: &'static str,
        change: f64,
        limit: f64,
    },
    #[error("no correction assignment reaches ideal fidelity (best {best_fidelity})")]
    CorrectionWiring { best_fidelity: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

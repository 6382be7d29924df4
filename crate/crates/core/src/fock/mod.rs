//! Truncated multimode Fock-space linear algebra.

mod dyad;
mod mode;
mod operator;
mod optics;
mod projectors;
mod vector;

pub use dyad::{DyadEnsemble, DyadTerm};
pub use mode::{cutoff_for_amplitude, poisson_tail, ModeSpec, DEFAULT_TAIL_TOLERANCE};
pub use operator::FockOperator;
pub use optics::{
    beam_splitter, beam_splitter_leakage, coherent_ket, coherent_ket_with_tolerance, phase_shifter,
};
pub use projectors::{parity_projectors, BellOutcome, ParityProjectors};
pub use vector::FockVector;

//! Teleportation with entangled coherent states (ECS) and entangled photon pairs (EPP)
//! under photon loss and detector inefficiency.
//!
//! The crate has two independent routes to every teleportation quantity:
//!
//! * [`teleport::analytic`] evaluates per-outcome probabilities and fidelities in the
//!   non-orthogonal coherent-state qubit basis and averages them over the Bloch sphere;
//! * [`teleport::oracle`] simulates the same protocols by brute force in a truncated
//!   Fock space ([`fock`]), with detector inefficiency modelled as a loss channel in
//!   front of ideal photon-number-resolving detectors.
//!
//! All numerics are generic over [`Real`]; the `*64` aliases below fix `f64`.

pub mod entanglement;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod loss;
pub mod quadrature;
pub mod scalar;
pub mod teleport;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type Complex64 = C<f64>;
pub type FockVector64 = fock::FockVector<f64>;
pub type FockOperator64 = fock::FockOperator<f64>;
pub type DyadEnsemble64 = fock::DyadEnsemble<f64>;
pub type LossParams64 = loss::LossParams<f64>;
pub type EcsChannel64 = loss::EcsChannel<f64>;
pub type EppChannel64 = loss::EppChannel<f64>;
pub type InputQubit64 = teleport::InputQubit<f64>;
pub type OutcomeRecord64 = teleport::OutcomeRecord<f64>;
pub type OracleResult64 = teleport::oracle::OracleResult<f64>;

//! Photon-number-resolving parity measurement after the Bell beam splitter.

use std::fmt;

use num_traits::{One, Zero};

use super::mode::ModeSpec;
use super::operator::FockOperator;
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Bell-measurement outcome label. The numeric codes follow the usual
/// `Φ⁺ = 1, Φ⁻ = 2, Ψ⁺ = 3, Ψ⁻ = 4` convention; `Error` is the all-vacuum click pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
    Error,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 5] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
        BellOutcome::Error,
    ];

    /// `1..=4`, or `None` for the error outcome.
    pub fn code(self) -> Option<u8> {
        match self {
            BellOutcome::PhiPlus => Some(1),
            BellOutcome::PhiMinus => Some(2),
            BellOutcome::PsiPlus => Some(3),
            BellOutcome::PsiMinus => Some(4),
            BellOutcome::Error => None,
        }
    }

    /// Which projector a detector click pattern `(n_A, n_B)` falls into.
    ///
    /// Returns `None` when both detectors fire (the complement of the five projectors).
    pub fn classify(n_a: usize, n_b: usize) -> Option<BellOutcome> {
        match (n_a, n_b) {
            (0, 0) => Some(BellOutcome::Error),
            (n, 0) if n % 2 == 0 => Some(BellOutcome::PhiPlus),
            (_, 0) => Some(BellOutcome::PhiMinus),
            (0, n) if n % 2 == 0 => Some(BellOutcome::PsiPlus),
            (0, _) => Some(BellOutcome::PsiMinus),
            _ => None,
        }
    }

    /// Ψ-type outcomes fire in port B, Φ-type in port A.
    pub fn is_psi(self) -> bool {
        matches!(self, BellOutcome::PsiPlus | BellOutcome::PsiMinus)
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.code() {
            Some(c) => write!(f, "{c}"),
            None => write!(f, "e"),
        }
    }
}

/// The five measurement projectors plus the both-detectors-fire complement.
#[derive(Debug, Clone)]
pub struct ParityProjectors<T> {
    pub phi_plus: FockOperator<T>,
    pub phi_minus: FockOperator<T>,
    pub psi_plus: FockOperator<T>,
    pub psi_minus: FockOperator<T>,
    pub error: FockOperator<T>,
    pub complement: FockOperator<T>,
}

impl<T: Real> ParityProjectors<T> {
    pub fn get(&self, outcome: BellOutcome) -> &FockOperator<T> {
        match outcome {
            BellOutcome::PhiPlus => &self.phi_plus,
            BellOutcome::PhiMinus => &self.phi_minus,
            BellOutcome::PsiPlus => &self.psi_plus,
            BellOutcome::PsiMinus => &self.psi_minus,
            BellOutcome::Error => &self.error,
        }
    }

    pub fn sum(&self) -> FockOperator<T> {
        BellOutcome::ALL
            .iter()
            .fold(self.complement.clone(), |acc, &o| acc.add(self.get(o)))
    }
}

/// `O₁…O₄`, `O_e` and the complement on a two-mode spec (mode 0 = port A, mode 1 = port B).
pub fn parity_projectors<T: Real>(spec: ModeSpec) -> Result<ParityProjectors<T>> {
    if spec.mode_count() != 2 {
        return Err(Error::ModeMismatch(format!(
            "parity projectors need two modes, got {}",
            spec.mode_count()
        )));
    }
    let build = |target: Option<BellOutcome>| {
        FockOperator::diagonal(spec, |occ| {
            if BellOutcome::classify(occ[0], occ[1]) == target {
                C::<T>::one()
            } else {
                C::zero()
            }
        })
    };
    Ok(ParityProjectors {
        phi_plus: build(Some(BellOutcome::PhiPlus)),
        phi_minus: build(Some(BellOutcome::PhiMinus)),
        psi_plus: build(Some(BellOutcome::PsiPlus)),
        psi_minus: build(Some(BellOutcome::PsiMinus)),
        error: build(Some(BellOutcome::Error)),
        complement: build(None),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockVector;

    #[test]
    fn phi_minus_keeps_odd_photons_in_port_a() {
        let spec = ModeSpec::new(2, 4).unwrap();
        let p = parity_projectors::<f64>(spec).unwrap();
        let one = FockVector::basis(spec, &[1, 0]).unwrap();
        let two = FockVector::basis(spec, &[2, 0]).unwrap();
        assert_eq!(p.phi_minus.apply(&one), one);
        assert!(p.phi_minus.apply(&two).norm() == 0.0);
    }

    #[test]
    fn projectors_resolve_identity_exactly() {
        let spec = ModeSpec::new(2, 7).unwrap();
        let p = parity_projectors::<f64>(spec).unwrap();
        assert_eq!(p.sum(), FockOperator::identity(spec));
    }

    #[test]
    fn classify_labels() {
        assert_eq!(BellOutcome::classify(0, 0), Some(BellOutcome::Error));
        assert_eq!(BellOutcome::classify(0, 3), Some(BellOutcome::PsiMinus));
        assert_eq!(BellOutcome::classify(4, 0), Some(BellOutcome::PhiPlus));
        assert_eq!(BellOutcome::classify(1, 1), None);
        assert_eq!(BellOutcome::PsiMinus.to_string(), "4");
        assert_eq!(BellOutcome::Error.to_string(), "e");
    }
}

//! Normalized times at which teleportation fidelity crosses a reference.

use crate::error::Result;
use crate::quadrature::QuadratureSpec;
use crate::scalar::Real;

use super::analytic::{check_eta, ecs_fidelity_excess, epp_metrics};
use super::CLASSICAL_LIMIT;

/// Which crossing to locate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdKind<T> {
    /// Photon-pair fidelity falls to the classical limit.
    EppClassical,
    /// ECS fidelity at amplitude `alpha` falls to the classical limit.
    EcsClassical { alpha: T },
    /// ECS fidelity at amplitude `alpha` overtakes the photon-pair fidelity.
    Crossover { alpha: T },
}

/// Bracket scan step.
pub const SCAN_STEP: f64 = 0.01;
/// Bisection stops once the bracket is narrower than this.
pub const ROOT_TOLERANCE: f64 = 1e-12;

/// Smallest root in `(0, 1)` of the difference selected by `kind`, or `None` when the
/// scan over `r = 0.01, 0.02, …, 0.99` finds no sign change.
pub fn threshold_r<T: Real>(
    kind: ThresholdKind<T>,
    eta: T,
    quad: QuadratureSpec,
) -> Result<Option<T>> {
    check_eta(eta)?;
    let classical = T::lit(CLASSICAL_LIMIT);
    let f = |r: T| -> Result<T> {
        match kind {
            ThresholdKind::EppClassical => Ok(epp_metrics(r, eta)?.fidelity - classical),
            ThresholdKind::EcsClassical { alpha } => ecs_fidelity_excess(alpha, r, eta, quad),
            // F_ecs − F_epp = (F_ecs − 2/3) + (r² − 1/3)
            ThresholdKind::Crossover { alpha } => {
                Ok(ecs_fidelity_excess(alpha, r, eta, quad)? + r * r - T::one() / T::lit(3.0))
            }
        }
    };
    first_root(f)
}

fn first_root<T: Real>(mut f: impl FnMut(T) -> Result<T>) -> Result<Option<T>> {
    let steps = (1.0 / SCAN_STEP).round() as usize;
    let at = |i: usize| T::from_usize_lossy(i) / T::from_usize_lossy(steps);
    let mut lo = at(1);
    let mut f_lo = f(lo)?;
    if f_lo == T::zero() {
        return Ok(Some(lo));
    }
    for i in 2..steps {
        let hi = at(i);
        let f_hi = f(hi)?;
        if f_hi == T::zero() {
            return Ok(Some(hi));
        }
        if (f_lo < T::zero()) != (f_hi < T::zero()) {
            return bisect(&mut f, lo, f_lo, hi).map(Some);
        }
        lo = hi;
        f_lo = f_hi;
    }
    Ok(None)
}

fn bisect<T: Real>(
    f: &mut impl FnMut(T) -> Result<T>,
    mut lo: T,
    mut f_lo: T,
    mut hi: T,
) -> Result<T> {
    let tol = T::tol(ROOT_TOLERANCE);
    let half = T::lit(0.5);
    while hi - lo > tol {
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == T::zero() {
            return Ok(mid);
        }
        if (f_mid < T::zero()) == (f_lo < T::zero()) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epp_threshold_is_inverse_sqrt_three() {
        for eta in [0.3, 1.0] {
            let r = threshold_r::<f64>(ThresholdKind::EppClassical, eta, QuadratureSpec::default())
                .unwrap()
                .unwrap();
            assert!((r - 1.0 / 3f64.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn ecs_threshold_at_unit_amplitude() {
        let r = threshold_r(
            ThresholdKind::EcsClassical { alpha: 1.0 },
            1.0,
            QuadratureSpec::default(),
        )
        .unwrap()
        .unwrap();
        assert!(r > 0.7 && r < 0.8, "{r}");
    }

    #[test]
    fn small_amplitude_has_no_crossover() {
        let r = threshold_r(
            ThresholdKind::Crossover { alpha: 0.5 },
            1.0,
            QuadratureSpec::default(),
        )
        .unwrap();
        assert_eq!(r, None);
    }

    #[test]
    fn scan_finds_linear_root() {
        let r = first_root(|x: f64| Ok(x - 0.4321)).unwrap().unwrap();
        assert!((r - 0.4321).abs() < 1e-12);
        assert_eq!(first_root(|x: f64| Ok(x + 1.0)).unwrap(), None);
    }
}

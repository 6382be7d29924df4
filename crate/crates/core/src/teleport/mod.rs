//! Teleportation through lossy ECS and EPP channels.

pub mod analytic;
pub mod oracle;
pub mod threshold;

use crate::error::{Error, Result};
use crate::fock::BellOutcome;
use crate::scalar::{cis, Real, C};

/// Average fidelity reachable without entanglement.
pub const CLASSICAL_LIMIT: f64 = 2.0 / 3.0;

/// Input qubit `a|tα⟩ + b|−tα⟩ = cos(u/2)e^{iv/2}|+⟩ + sin(u/2)e^{−iv/2}|−⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputQubit<T> {
    pub u: T,
    pub v: T,
    pub a: C<T>,
    pub b: C<T>,
    pub t_alpha: T,
}

impl<T: Real> InputQubit<T> {
    /// Fails when `tα = 0`, where `|tα⟩` and `|−tα⟩` coincide.
    pub fn new(u: T, v: T, alpha: T, r: T) -> Result<Self> {
        if !(alpha > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "amplitude must be positive, got {alpha}"
            )));
        }
        let t_alpha = (T::one() - r * r).max(T::zero()).sqrt() * alpha;
        Self::with_amplitude(u, v, t_alpha)
    }

    pub fn with_amplitude(u: T, v: T, t_alpha: T) -> Result<Self> {
        let x = T::lit(-2.0) * t_alpha * t_alpha;
        let two = T::lit(2.0);
        let plus_sq = two + two * x.exp();
        let minus_sq = -two * x.exp_m1();
        if !(minus_sq > T::zero()) {
            return Err(Error::DegenerateOutcome);
        }
        let n_plus = T::one() / plus_sq.sqrt();
        let n_minus = T::one() / minus_sq.sqrt();
        let half = T::lit(0.5);
        let e_plus = cis(v * half) * (n_plus * (u * half).cos());
        let e_minus = cis(-v * half) * (n_minus * (u * half).sin());
        Ok(Self {
            u,
            v,
            a: e_plus + e_minus,
            b: e_plus - e_minus,
            t_alpha,
        })
    }

    /// Polarization amplitudes `(cos(u/2)e^{iv/2}, sin(u/2)e^{−iv/2})` on `(H, V)`.
    pub fn polarization(u: T, v: T) -> [C<T>; 2] {
        let half = T::lit(0.5);
        [
            cis(v * half) * (u * half).cos(),
            cis(-v * half) * (u * half).sin(),
        ]
    }

    /// `⟨tα|−tα⟩`
    pub fn overlap(&self) -> T {
        (T::lit(-2.0) * self.t_alpha * self.t_alpha).exp()
    }

    /// `|a|² + |b|² + 2s·Re(a*b)`, equal to 1.
    pub fn norm_sqr(&self) -> T {
        self.a.norm_sqr()
            + self.b.norm_sqr()
            + T::lit(2.0) * self.overlap() * (self.a.conj() * self.b).re
    }
}

/// Probability `p` (unnormalized) and conditional fidelity `f` of one Bell outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeRecord<T> {
    pub outcome: BellOutcome,
    pub p: T,
    /// Present only for retained outcomes with `p > 0`.
    pub f: Option<T>,
}

impl<T: Real> OutcomeRecord<T> {
    pub fn new(outcome: BellOutcome, p: T, pf: Option<T>) -> Self {
        let f = pf.and_then(|pf| if p > T::zero() { Some(pf / p) } else { None });
        Self { outcome, p, f }
    }

    /// `p·f`, zero when `f` is absent.
    pub fn weighted_fidelity(&self) -> T {
        self.f.map_or(T::zero(), |f| f * self.p)
    }
}

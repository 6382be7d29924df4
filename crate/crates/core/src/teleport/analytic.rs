//! Closed-form teleportation through the lossy odd ECS and the lossy photon pair.
//!
//! Per-outcome quantities are written in the non-orthogonal basis `{|tα⟩, |−tα⟩}` and
//! averaged over the Bloch sphere with [`QuadratureSpec`]. The fully integrated closed
//! forms ([`closed_form_f_ecs`], [`closed_form_p_ecs`]) are cross-checked against those
//! averages.

use crate::error::{Error, Result};
use crate::fock::BellOutcome;
use crate::loss::{ecs_norm_sq, EcsParity, LossParams};
use crate::quadrature::QuadratureSpec;
use crate::scalar::Real;

use super::{InputQubit, OutcomeRecord};

pub(crate) fn check_eta<T: Real>(eta: T) -> Result<()> {
    if eta > T::zero() && eta <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "detection efficiency η = {eta} outside (0, 1]"
        )))
    }
}

/// `(p, p·f)` for the Ψ⁻ outcome; Φ⁻ is identical.
fn ecs_outcome_raw<T: Real>(alpha: T, loss: LossParams<T>, eta: T, q: &InputQubit<T>) -> (T, T) {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let beta2 = q.t_alpha * q.t_alpha;
    let n2 = ecs_norm_sq(alpha, EcsParity::Odd);
    // D = e^{−2ηβ²} sinh(2ηβ²)
    let d = -(-four * eta * beta2).exp_m1() / two;
    let c2 = (-four * beta2 * (T::one() - eta)).exp();
    let cross = (-four * alpha * alpha * loss.r_sq()).exp() * c2;
    let s = q.overlap();
    let (a, b) = (q.a, q.b);
    let m = a.conj() * (a + b * s);
    let l = b.conj() * (a * s + b);
    let pf = n2 * d * (l.norm_sqr() + m.norm_sqr() + two * cross * (m.conj() * l).re);
    let p = n2 * d * (a.norm_sqr() + b.norm_sqr() + two * cross * s * (a.conj() * b).re);
    (p, pf)
}

/// Φ⁻ and Ψ⁻ records for an odd-ECS channel at normalized time `r` and detector
/// efficiency `eta`. Both carry the same `p` and `f`.
pub fn ecs_outcome<T: Real>(
    alpha: T,
    r: T,
    eta: T,
    qubit: &InputQubit<T>,
) -> Result<[OutcomeRecord<T>; 2]> {
    check_eta(eta)?;
    let loss = LossParams::new(r)?;
    let expected = loss.t() * alpha;
    if (qubit.t_alpha - expected).abs() > T::tol(1e-12) * (T::one() + expected) {
        return Err(Error::InvalidParameter(format!(
            "qubit built for amplitude {} but the channel has tα = {expected}",
            qubit.t_alpha
        )));
    }
    let (p, pf) = ecs_outcome_raw(alpha, loss, eta, qubit);
    Ok([
        OutcomeRecord::new(BellOutcome::PhiMinus, p, Some(pf)),
        OutcomeRecord::new(BellOutcome::PsiMinus, p, Some(pf)),
    ])
}

/// Sphere-averaged fidelity and success probability of the odd ECS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcsAverages<T> {
    pub fidelity: T,
    pub success: T,
}

/// `F = ⟨Σp_j f_j / Σp_j⟩` and `P = ⟨Σp_j⟩` over `j ∈ {Φ⁻, Ψ⁻}`.
pub fn ecs_averages<T: Real>(
    alpha: T,
    r: T,
    eta: T,
    quad: QuadratureSpec,
) -> Result<EcsAverages<T>> {
    check_eta(eta)?;
    let loss = LossParams::new(r)?;
    let [fidelity, per_outcome] = quad.sphere_average(|u, v| {
        let q = InputQubit::new(u, v, alpha, r)?;
        let (p, pf) = ecs_outcome_raw(alpha, loss, eta, &q);
        if !(p > T::zero()) {
            return Err(Error::DegenerateOutcome);
        }
        Ok::<_, Error>([pf / p, p])
    })?;
    Ok(EcsAverages {
        fidelity,
        success: per_outcome * T::lit(2.0),
    })
}

pub fn avg_fidelity_ecs<T: Real>(alpha: T, r: T, eta: T, quad: QuadratureSpec) -> Result<T> {
    Ok(ecs_averages(alpha, r, eta, quad)?.fidelity)
}

pub fn success_prob_ecs<T: Real>(alpha: T, r: T, eta: T, quad: QuadratureSpec) -> Result<T> {
    Ok(ecs_averages(alpha, r, eta, quad)?.success)
}

/// [`ecs_averages`] at `quad` and at `quad.doubled()`; fails if either quantity moves by
/// more than `limit`. Returns the finer result.
pub fn ecs_averages_checked<T: Real>(
    alpha: T,
    r: T,
    eta: T,
    quad: QuadratureSpec,
    limit: T,
) -> Result<EcsAverages<T>> {
    let coarse = ecs_averages(alpha, r, eta, quad)?;
    let fine = ecs_averages(alpha, r, eta, quad.doubled())?;
    for (quantity, a, b) in [
        ("fidelity", coarse.fidelity, fine.fidelity),
        ("success probability", coarse.success, fine.success),
    ] {
        let change = (a - b).abs();
        if change > limit {
            return Err(Error::QuadratureNotConverged {
                quantity,
                change: change.to_f64_lossy(),
                limit: limit.to_f64_lossy(),
            });
        }
    }
    Ok(fine)
}

/// `(arctanh x − x)/x³`, by series near zero.
fn atanh_remainder<T: Real>(x: T) -> T {
    if x.abs() < T::lit(0.1) {
        let x2 = x * x;
        let mut term = T::one();
        let mut sum = T::zero();
        for k in 0..16 {
            sum += term / T::from_usize_lossy(2 * k + 3);
            term *= x2;
        }
        sum
    } else {
        (x.atanh() - x) / (x * x * x)
    }
}

/// The five auxiliary quantities of the integrated fidelity, all taken to a common
/// power of `S = e^{−2α²}` so no exponent is positive except in `n`.
///
/// The fidelity is `F = 2n(l−m)/c + 2n(d²(l−m) + 2c²m)·(arctanh(d/c) − d/c)/(c³(d/c)³)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityParts<T> {
    pub l: T,
    pub m: T,
    pub n: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> FidelityParts<T> {
    /// Direct evaluation in powers of `S`; overflows once `e^{4α²}`-sized terms appear.
    pub fn direct(alpha: T, r: T, eta: T) -> Self {
        let s = (T::lit(-2.0) * alpha * alpha).exp();
        let sp = |e: T| s.powf(e);
        let (one, two) = (T::one(), T::lit(2.0));
        let r2 = r * r;
        let l = T::lit(3.0) * sp(two * (one + eta)) - T::lit(5.0) * sp(two * (r2 + eta))
            + T::lit(5.0) * sp(two * (two + r2 * eta))
            - T::lit(3.0) * sp(two * (one + r2 * (one + eta)));
        let m = (sp(two) + sp(two * r2)) * (sp(two * eta) - sp(two * (one + r2 * eta)));
        let n = sp(-two * (one + r2 * eta)) / T::lit(16.0);
        let c = sp(two) - sp(-two * (r2 - one) * (eta - one));
        let d = -sp(one + r2) + sp(-(r2 - one) * (two * eta - one));
        Self { l, m, n, c, d }
    }

    /// The parts multiplied through by `S^{2t²(1−η)}`, which leaves `F` unchanged.
    pub fn scaled(alpha: T, r: T, eta: T) -> Self {
        let e = T::lit(-2.0) * alpha * alpha;
        let (one, two) = (T::one(), T::lit(2.0));
        let r2 = r * r;
        let t2 = one - r2;
        let sp = |x: T| (e * x).exp();
        let k = two * t2 * (one - eta);
        let l = T::lit(3.0) * sp(two * (one + eta) + k) - T::lit(5.0) * sp(two * (r2 + eta) + k)
            + T::lit(5.0) * sp(two * (two + r2 * eta) + k)
            - T::lit(3.0) * sp(two * (one + r2 * (one + eta)) + k);
        let m = (sp(two) + sp(two * r2))
            * sp(two * eta + k)
            * -(e * (two + two * r2 * eta - two * eta)).exp_m1();
        let n = sp(-two * (one + r2 * eta)) / T::lit(16.0);
        let c = (e * (two + k)).exp_m1();
        let d = sp(t2) - sp(one + r2 + k);
        Self { l, m, n, c, d }
    }

    pub fn fidelity(&self) -> T {
        let Self { l, m, n, c, d } = *self;
        let two = T::lit(2.0);
        let x = d / c;
        // 2n(l−m)/c · arctanh(x)/x + 4nm/c · (arctanh x − x)/x³
        let g = atanh_remainder(x);
        two * n * (l - m) / c * (T::one() + x * x * g) + T::lit(4.0) * n * m / c * g
    }
}

/// Integrated average fidelity of the odd ECS.
pub fn closed_form_f_ecs<T: Real>(alpha: T, r: T, eta: T) -> Result<T> {
    check_eta(eta)?;
    LossParams::new(r)?;
    if !(alpha > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "amplitude must be positive, got {alpha}"
        )));
    }
    let f = closed_form_f_scaled(alpha, r, eta);
    if f.is_finite() {
        Ok(f)
    } else {
        Err(Error::DegenerateOutcome)
    }
}

/// `n`, `l` and `m` only ever appear as `n·l` and `n·m`; fold them before exponentiating.
fn closed_form_f_scaled<T: Real>(alpha: T, r: T, eta: T) -> T {
    let e = T::lit(-2.0) * alpha * alpha;
    let (one, two) = (T::one(), T::lit(2.0));
    let r2 = r * r;
    let t2 = one - r2;
    let sp = |x: T| (e * x).exp();
    let k = two * t2 * (one - eta);
    // 16·n·l and 16·n·m after the common rescaling
    let nl = T::lit(3.0) * sp(two * t2) - T::lit(5.0) + T::lit(5.0) * sp(two + k)
        - T::lit(3.0) * sp(two - two * eta * t2);
    let nm = (one + sp(two * t2)) * -(e * (two - two * eta * t2)).exp_m1();
    let c = (e * (two + k)).exp_m1();
    let d = sp(t2) - sp(one + r2 + k);
    let x = d / c;
    let g = atanh_remainder(x);
    let sixteenth = T::lit(1.0 / 16.0);
    two * (nl - nm) * sixteenth / c * (one + x * x * g) + T::lit(4.0) * nm * sixteenth / c * g
}

/// Integrated success probability of the odd ECS, both retained outcomes together:
/// `½ · (1 − e^{−4α²t²η})/(1 − e^{−4α²t²}) · (1 − e^{−4α²(1 + t²(1−η))})/(1 − e^{−4α²})`.
pub fn closed_form_p_ecs<T: Real>(alpha: T, r: T, eta: T) -> Result<T> {
    check_eta(eta)?;
    let loss = LossParams::new(r)?;
    if !(alpha > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "amplitude must be positive, got {alpha}"
        )));
    }
    let a4 = T::lit(-4.0) * alpha * alpha;
    let t2 = loss.t_sq();
    let first = if t2 * alpha * alpha > T::zero() {
        (a4 * t2 * eta).exp_m1() / (a4 * t2).exp_m1()
    } else {
        eta
    };
    let second = (a4 * (T::one() + t2 * (T::one() - eta))).exp_m1() / a4.exp_m1();
    Ok(T::lit(0.5) * first * second)
}

/// One retained outcome's share of [`closed_form_p_ecs`].
pub fn closed_form_p_ecs_per_outcome<T: Real>(alpha: T, r: T, eta: T) -> Result<T> {
    Ok(closed_form_p_ecs(alpha, r, eta)? * T::lit(0.5))
}

/// `F − 2/3` for the odd ECS, accurate where `F` itself rounds to `2/3`.
///
/// With `x = cos²(u/2)`, `y = sin²(u/2)`, `d = y − x`, `s = ⟨tα|−tα⟩`, `K` the surviving
/// coherence factor and `w = 1/(1−s²)`, the per-point pair is
/// `pf = pf₀ + 2s²w(1−K)xy` and `p = 1 + sw(1−K)(s+d)`, where
/// `pf₀ = (1+K)/2 + 2(1−K)xy·cos²v` averages to `2/3 + K/3` exactly. The remainder is then
/// `s²w(1−K)·avg([2xy − pf₀ + pf₀(1−K)w·d(d+s)]/p)`. For `s > 1/2` the plain average is
/// used instead.
pub fn ecs_fidelity_excess<T: Real>(alpha: T, r: T, eta: T, quad: QuadratureSpec) -> Result<T> {
    check_eta(eta)?;
    let loss = LossParams::new(r)?;
    let beta = loss.t() * alpha;
    let beta2 = beta * beta;
    if !(beta2 > T::zero()) {
        return Err(Error::DegenerateOutcome);
    }
    let (one, two, four) = (T::one(), T::lit(2.0), T::lit(4.0));
    let s = (-two * beta2).exp();
    if s > T::lit(0.5) {
        return Ok(avg_fidelity_ecs(alpha, r, eta, quad)? - T::lit(2.0 / 3.0));
    }
    let ln_k = -four * alpha * alpha * loss.r_sq() - four * beta2 * (one - eta);
    let k = ln_k.exp();
    let k1 = -ln_k.exp_m1();
    let w = one / -(-four * beta2).exp_m1();
    let [rest] = quad.sphere_average(|u: T, v: T| {
        let su = u.sin();
        let xy = su * su / four;
        let d = -u.cos();
        let cv = v.cos();
        let pf0 = (one + k) / two + two * k1 * xy * cv * cv;
        let p = one + s * w * k1 * (s + d);
        Ok::<_, Error>([(two * xy - pf0 + pf0 * k1 * w * d * (d + s)) / p])
    })?;
    Ok(k / T::lit(3.0) + s * s * w * k1 * rest)
}

/// `α → 0` limit of [`closed_form_p_ecs`]: `(2η + r²(η−1)η − η²)/2`.
pub fn p_ecs_small_alpha<T: Real>(r: T, eta: T) -> T {
    let r2 = r * r;
    (T::lit(2.0) * eta + r2 * (eta - T::one()) * eta - eta * eta) * T::lit(0.5)
}

/// Fidelity and success probability of photon-pair teleportation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EppMetrics<T> {
    pub fidelity: T,
    pub success: T,
}

/// `F = 1 − r²`, `P = η²(1 − r²)/2`.
pub fn epp_metrics<T: Real>(r: T, eta: T) -> Result<EppMetrics<T>> {
    check_eta(eta)?;
    let loss = LossParams::new(r)?;
    let t2 = loss.t_sq();
    Ok(EppMetrics {
        fidelity: t2,
        success: eta * eta * t2 * T::lit(0.5),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ideal_channel_teleports_perfectly() {
        for &(alpha, u, v) in &[(0.5, 0.3, 1.2), (1.0, 2.0, 4.0), (2.0, PI, 0.0)] {
            let q = InputQubit::new(u, v, alpha, 0.0).unwrap();
            let [phi, psi] = ecs_outcome(alpha, 0.0, 1.0, &q).unwrap();
            assert!((psi.f.unwrap() - 1.0).abs() < 1e-10);
            assert_eq!(phi.p, psi.p);
        }
    }

    #[test]
    fn coherent_input_probability() {
        // a = 1, b = 0 is the qubit |tα⟩ itself
        let alpha: f64 = 1.0;
        let mut q = InputQubit::new(0.0, 0.0, alpha, 0.0).unwrap();
        q.a = num_complex::Complex::new(1.0, 0.0);
        q.b = num_complex::Complex::new(0.0, 0.0);
        let [_, psi] = ecs_outcome(alpha, 0.0, 1.0, &q).unwrap();
        let n2 = 1.0 / (2.0 * (1.0 - (-4.0 * alpha * alpha).exp()));
        let want = n2 * (-2.0 * alpha * alpha).exp() * (2.0 * alpha * alpha).sinh();
        assert!((psi.p - want).abs() < 1e-15);
        assert!((psi.f.unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn qubit_must_match_channel() {
        let q = InputQubit::new(0.1, 0.2, 1.0, 0.5).unwrap();
        assert!(ecs_outcome(1.0, 0.3, 1.0, &q).is_err());
        assert!(ecs_outcome(1.0, 0.5, 0.0, &q).is_err());
    }

    #[test]
    fn perfect_detection_succeeds_half_the_time() {
        let quad = QuadratureSpec::default();
        for &(alpha, r) in &[(0.3f64, 0.0f64), (0.8, 0.3), (2.0, 0.6)] {
            let p = success_prob_ecs(alpha, r, 1.0, quad).unwrap();
            assert!((p - 0.5).abs() < 1e-12, "{alpha} {r} {p}");
        }
    }

    #[test]
    fn closed_form_fidelity_matches_quadrature() {
        let quad = QuadratureSpec::default();
        for &(alpha, r, eta) in &[
            (1.0f64, 0.5f64, 1.0f64),
            (0.5, 0.3, 0.6),
            (1.5, 0.6, 0.9),
            (1.0, 0.0, 0.8),
            (2.0, 0.1, 1.0),
        ] {
            let quadrature = avg_fidelity_ecs(alpha, r, eta, quad).unwrap();
            let closed = closed_form_f_ecs(alpha, r, eta).unwrap();
            assert!(
                (quadrature - closed).abs() < 1e-10,
                "{alpha} {r} {eta}: {quadrature} vs {closed}"
            );
        }
    }

    #[test]
    fn scaled_and_direct_parts_agree() {
        let (alpha, r, eta) = (0.9f64, 0.4, 0.7);
        let a = FidelityParts::direct(alpha, r, eta).fidelity();
        let b = FidelityParts::scaled(alpha, r, eta).fidelity();
        let c = closed_form_f_ecs(alpha, r, eta).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((b - c).abs() < 1e-12);
    }

    #[test]
    fn closed_form_survives_large_amplitude() {
        let f = closed_form_f_ecs(6.0f64, 0.5, 0.9).unwrap();
        assert!(f.is_finite() && f > 0.0 && f < 1.0);
        let p = closed_form_p_ecs(6.0f64, 0.5, 0.9).unwrap();
        assert!(p.is_finite() && p > 0.4 && p <= 0.5);
    }

    #[test]
    fn closed_form_success_matches_quadrature() {
        let quad = QuadratureSpec::default();
        for &(alpha, r, eta) in &[
            (1.0f64, 0.5f64, 0.7f64),
            (0.5, 0.3, 0.6),
            (1.5, 0.6, 0.9),
            (1.0, 0.0, 0.8),
        ] {
            let quadrature = success_prob_ecs(alpha, r, eta, quad).unwrap();
            let closed = closed_form_p_ecs(alpha, r, eta).unwrap();
            assert!((quadrature - closed).abs() < 1e-12);
        }
        assert_eq!(closed_form_p_ecs(1.0f64, 0.4, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn success_small_amplitude_limit() {
        for &(r, eta) in &[(0.5f64, 0.7f64), (0.2, 0.3), (0.9, 1.0)] {
            let p = closed_form_p_ecs(1e-3, r, eta).unwrap();
            assert!((p - p_ecs_small_alpha(r, eta)).abs() < 1e-4);
        }
    }

    #[test]
    fn epp_values() {
        let m = epp_metrics(1.0 / 3f64.sqrt(), 0.4).unwrap();
        assert!((m.fidelity - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            epp_metrics(0.0, 1.0).unwrap(),
            EppMetrics {
                fidelity: 1.0,
                success: 0.5
            }
        );
        assert_eq!(epp_metrics(0.0, 0.5).unwrap().success, 0.125);
    }

    #[test]
    fn doubling_check_passes_at_default_resolution() {
        let r = ecs_averages_checked(1.0, 0.5, 0.8, QuadratureSpec::default(), 1e-8);
        assert!(r.is_ok());
        let coarse = QuadratureSpec::new(8, 8).unwrap();
        assert!(matches!(
            ecs_averages_checked(0.5, 0.6, 0.6, coarse, 0.0),
            Err(Error::QuadratureNotConverged { .. })
        ));
    }
}

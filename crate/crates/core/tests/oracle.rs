use std::f64::consts::PI;

use ecs_epp::fock::{coherent_ket, BellOutcome, DyadEnsemble, ModeSpec};
use ecs_epp::loss::{damping_kraus, LossParams};
use ecs_epp::quadrature::QuadratureSpec;
use ecs_epp::teleport::analytic::{ecs_outcome, epp_metrics};
use ecs_epp::teleport::oracle::{
    bell_state_overlaps, resolve_correction_wiring, simulate, simulate_ecs_end_to_end, ChannelKind,
    CorrectionWiring, DetectorModel, ProtocolConfig, CORRECTION_WIRING,
};
use ecs_epp::teleport::InputQubit;

fn odd(alpha: f64, r: f64, eta: f64, u: f64, v: f64) -> ProtocolConfig<f64> {
    ProtocolConfig::new(ChannelKind::EcsOdd, alpha, r, eta, u, v).unwrap()
}

#[test]
fn analytic_matches_oracle_at_reference_point() {
    let (alpha, r, eta, u, v) = (1.0, 0.4, 0.8, PI / 3.0, PI / 5.0);
    let res = simulate(&odd(alpha, r, eta, u, v)).unwrap();
    let q = InputQubit::new(u, v, alpha, r).unwrap();
    let [phi, psi] = ecs_outcome(alpha, r, eta, &q).unwrap();
    for rec in [phi, psi] {
        let o = res.record(rec.outcome);
        assert!(
            (o.p - rec.p).abs() < 1e-7,
            "{:?}: {} vs {}",
            rec.outcome,
            o.p,
            rec.p
        );
        assert!((o.weighted_fidelity() - rec.weighted_fidelity()).abs() < 1e-7);
    }
}

#[test]
fn analytic_matches_oracle_without_channel_loss() {
    let (alpha, u, v) = (1.0, 1.2, 4.0);
    let res = simulate(&odd(alpha, 0.4, 1.0, u, v)).unwrap();
    let q = InputQubit::new(u, v, alpha, 0.4).unwrap();
    let [_, psi] = ecs_outcome(alpha, 0.4, 1.0, &q).unwrap();
    let o = res.record(BellOutcome::PsiMinus);
    assert!((o.p - psi.p).abs() < 1e-7);
    assert!((o.f.unwrap() - psi.f.unwrap()).abs() < 1e-7);
}

#[test]
fn retained_outcomes_are_symmetric() {
    for &(alpha, r, eta) in &[(0.5, 0.3, 0.6), (1.2, 0.0, 0.9), (0.8, 0.6, 1.0)] {
        let res = simulate(&odd(alpha, r, eta, 2.1, 0.7)).unwrap();
        let a = res.record(BellOutcome::PhiMinus);
        let b = res.record(BellOutcome::PsiMinus);
        assert!((a.p - b.p).abs() < 1e-12);
        assert!((a.f.unwrap() - b.f.unwrap()).abs() < 1e-12);
    }
}

#[test]
fn probabilities_are_complete() {
    for &(alpha, r, eta) in &[
        (0.5, 0.0, 1.0),
        (1.0, 0.3, 1.0),
        (1.5, 0.6, 1.0),
        (1.0, 0.3, 0.6),
    ] {
        let res = simulate(&odd(alpha, r, eta, 0.4, 5.0)).unwrap();
        assert!(
            (res.total_probability - 1.0).abs() < 1e-8,
            "{alpha} {r} {eta}: {}",
            res.total_probability
        );
    }
}

#[test]
fn kraus_detector_matches_binomial_weights() {
    let cfg = odd(1.0, 0.3, 0.7, 0.9, 2.2);
    let povm = simulate(&cfg).unwrap();
    let kraus = simulate(&cfg.with_detector(DetectorModel::KrausBranches)).unwrap();
    for (a, b) in povm.outcomes.iter().zip(&kraus.outcomes) {
        assert!((a.p - b.p).abs() < 1e-10);
        assert!((a.weighted_fidelity() - b.weighted_fidelity()).abs() < 1e-10);
    }
    assert!((povm.complement - kraus.complement).abs() < 1e-10);
}

#[test]
fn end_to_end_channel_matches_closed_form_channel() {
    let cfg = odd(1.0, 0.5, 0.8, 1.3, 3.9);
    let closed = simulate(&cfg).unwrap();
    let full = simulate_ecs_end_to_end(&cfg).unwrap();
    for (a, b) in closed.outcomes.iter().zip(&full.outcomes) {
        assert!((a.p - b.p).abs() < 1e-8);
        assert!((a.weighted_fidelity() - b.weighted_fidelity()).abs() < 1e-8);
    }
}

#[test]
fn correction_wiring_is_resolved_and_frozen() {
    assert_eq!(
        resolve_correction_wiring(ChannelKind::EcsOdd, 1.0).unwrap(),
        CORRECTION_WIRING
    );
    assert_eq!(
        resolve_correction_wiring(ChannelKind::EcsEven, 1.0).unwrap(),
        CORRECTION_WIRING
    );
    assert_eq!(
        resolve_correction_wiring(ChannelKind::Epp, 1.0).unwrap(),
        CORRECTION_WIRING
    );
    let swapped =
        simulate(&odd(1.0, 0.0, 1.0, 1.0, 1.0).with_wiring(CorrectionWiring::Swapped)).unwrap();
    let worst = swapped
        .retained
        .iter()
        .map(|&o| swapped.record(o).f.unwrap())
        .fold(1.0, f64::min);
    assert!(worst < 1.0 - 1e-3);
}

#[test]
fn coherent_bell_states_map_to_distinct_signatures() {
    let sig = bell_state_overlaps(1.0f64, 0.2).unwrap();
    // Φ⁻ → odd photons in port A, Ψ⁻ → odd photons in port B
    assert!((sig.masses[1][1] - 1.0).abs() < 1e-10);
    assert!((sig.masses[3][3] - 1.0).abs() < 1e-10);
    // even states split between their even-photon projector and the vacuum
    let beta2 = (1.0f64 - 0.04) * 1.0;
    for (j, i) in [(0, 0), (2, 2)] {
        assert!((sig.masses[j][i] + sig.masses[j][4] - 1.0).abs() < 1e-10);
        assert!(sig.masses[j][4] <= 2.0 * (-2.0 * beta2).exp());
    }
    for j in 0..4 {
        assert!(sig.masses[j][5] < 1e-12);
    }
}

#[test]
fn detector_loss_damps_cross_terms() {
    // |β⟩⟨−β| with β = √2·α through transmission η carries e^{−2β²(1−η)} = e^{−4α²(1−η)}
    let (alpha, eta) = (1.0f64, 0.5f64);
    let beta = 2f64.sqrt() * alpha;
    let spec = ModeSpec::single(30).unwrap();
    let mut e = DyadEnsemble::new(spec);
    let l = e.push_ket(coherent_ket(beta, spec).unwrap()).unwrap();
    let r = e.push_ket(coherent_ket(-beta, spec).unwrap()).unwrap();
    e.push_term(num_complex::Complex::new(1.0, 0.0), l, r)
        .unwrap();
    let kraus = damping_kraus(LossParams::from_transmission(eta.sqrt()).unwrap(), spec).unwrap();
    let out = e.apply_kraus(0, &kraus, 1e-14).unwrap().to_operator();
    let tb = eta.sqrt() * beta;
    let expected = coherent_ket(tb, spec)
        .unwrap()
        .outer(&coherent_ket(-tb, spec).unwrap())
        .scale(num_complex::Complex::new(
            (-4.0 * alpha * alpha * (1.0 - eta)).exp(),
            0.0,
        ));
    assert!(out.matrix().max_abs_diff(&expected) < 1e-8);
}

#[test]
fn epp_oracle_values() {
    let run = |r: f64, eta: f64| {
        let mut f = Vec::new();
        for &(u, v) in &[(0.2, 0.1), (1.5, 2.0), (2.9, 4.4)] {
            let res = simulate(&ProtocolConfig::new(ChannelKind::Epp, 0.0, r, eta, u, v).unwrap())
                .unwrap();
            f.push((res.fidelity().unwrap(), res.success_probability()));
        }
        f
    };
    for (fid, p) in run(0.5, 1.0) {
        assert!((fid - 0.75).abs() < 1e-12);
        assert!((p - 0.375).abs() < 1e-12);
    }
    for (fid, p) in run(0.5, 0.8) {
        assert!((fid - 0.75).abs() < 1e-12);
        assert!((p - 0.24).abs() < 1e-12);
    }
    let m = epp_metrics(0.5f64, 0.8).unwrap();
    assert!((m.success - 0.24).abs() < 1e-15);
}

#[test]
fn ecs_fidelity_drops_with_detector_loss() {
    let mut last = f64::INFINITY;
    for eta in [1.0, 0.9, 0.7, 0.5] {
        let f = simulate(&odd(1.0, 0.0, eta, 1.1, 0.3))
            .unwrap()
            .fidelity()
            .unwrap();
        assert!(f < last);
        last = f;
    }
}

fn oracle_average(kind: ChannelKind, alpha: f64) -> (f64, f64) {
    let quad = QuadratureSpec::new(8, 8).unwrap();
    let [f, p] = quad
        .sphere_average(|u, v| {
            let res = simulate(&ProtocolConfig::new(kind, alpha, 0.0, 1.0, u, v)?)?;
            Ok::<_, ecs_epp::Error>([res.fidelity().unwrap(), res.success_probability()])
        })
        .unwrap();
    (f, p)
}

#[test]
fn even_channel_matches_fidelity_with_lower_success() {
    let (f_odd, p_odd) = oracle_average(ChannelKind::EcsOdd, 0.7);
    let (f_even, p_even) = oracle_average(ChannelKind::EcsEven, 0.7);
    assert!((f_odd - f_even).abs() < 1e-6);
    assert!(p_even < p_odd);
    // without loss both retained even outcomes together succeed with
    // (1 − e^{−4α²})(1 − s)/(2(1 + e^{−4α²})(1 + s)), s = e^{−2α²}
    let (e4, s) = ((-4.0f64 * 0.49).exp(), (-2.0f64 * 0.49).exp());
    let want = (1.0 - e4) * (1.0 - s) / (2.0 * (1.0 + e4) * (1.0 + s));
    assert!((p_even - want).abs() < 1e-8, "{p_even} vs {want}");
}

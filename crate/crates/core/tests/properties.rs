use std::f64::consts::PI;

use ecs_epp::entanglement::{ecs_negativity_closed, ecs_negativity_numeric, epp_negativity_closed};
use ecs_epp::fock::{
    beam_splitter, phase_shifter, DyadEnsemble, FockOperator, FockVector, ModeSpec,
};
use ecs_epp::linalg::{hermitian_eigenvalues, partial_trace, partial_transpose, CMatrix};
use ecs_epp::loss::{
    apply_damping, damping_kraus, ecs_decohered, epp_decohered, EcsParity, LossParams,
};
use ecs_epp::teleport::analytic::{closed_form_p_ecs, ecs_outcome, epp_metrics};
use ecs_epp::teleport::oracle::{simulate, ChannelKind, ProtocolConfig};
use ecs_epp::teleport::InputQubit;
use ecs_epp::Complex64;
use proptest::prelude::*;

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len).prop_map(|v| {
        v.into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect()
    })
}

fn density(dim: usize) -> impl Strategy<Value = CMatrix<f64>> {
    complex_vec(dim * dim).prop_map(move |g| {
        let g = CMatrix::from_fn(dim, dim, |i, j| g[i * dim + j]);
        let rho = g.matmul(&g.adjoint());
        let tr = rho.trace().re.max(1e-12);
        rho.scale(Complex64::new(1.0 / tr, 0.0))
    })
}

fn sum_n(spec: ModeSpec) -> FockOperator<f64> {
    FockOperator::diagonal(spec, |occ| Complex64::new((occ[0] + occ[1]) as f64, 0.0))
}

proptest! {
    #[test]
    fn beam_splitter_is_unitary_and_number_conserving(theta in -PI..PI, cutoff in 1usize..7) {
        let spec = ModeSpec::new(2, cutoff).unwrap();
        let u = beam_splitter(spec, 0, 1, theta).unwrap();
        prop_assert!(u.unitarity_deviation() <= 1e-10);
        let n = sum_n(spec);
        let comm = u.compose(&n).sub(&n.compose(&u));
        prop_assert!(comm.matrix().max_abs() <= 1e-10);
    }

    #[test]
    fn phase_shifter_is_unitary(phi in -PI..PI, cutoff in 1usize..10) {
        let u = phase_shifter(ModeSpec::single(cutoff).unwrap(), 0, phi).unwrap();
        prop_assert!(u.unitarity_deviation() <= 1e-12);
    }

    #[test]
    fn partial_trace_inverts_tensor(a in density(2), b in density(3)) {
        let ab = a.kron(&b);
        prop_assert!(partial_trace(&ab, &[2, 3], &[0]).unwrap().max_abs_diff(&a) <= 1e-12);
        prop_assert!(partial_trace(&ab, &[2, 3], &[1]).unwrap().max_abs_diff(&b) <= 1e-12);
    }

    #[test]
    fn partial_transpose_keeps_trace_and_hermiticity(rho in density(6)) {
        let pt = partial_transpose(&rho, &[2, 3], &[1]).unwrap();
        prop_assert_eq!(pt.trace(), rho.trace());
        prop_assert!(pt.hermiticity_deviation() == 0.0);
        let back = partial_transpose(&pt, &[2, 3], &[1]).unwrap();
        prop_assert_eq!(back, rho);
    }

    #[test]
    fn dyads_reconstruct_dense_operator(
        kets in prop::collection::vec(complex_vec(9), 3),
        weights in complex_vec(4),
    ) {
        let spec = ModeSpec::new(2, 2).unwrap();
        let mut e = DyadEnsemble::new(spec);
        for k in &kets {
            e.push_ket(FockVector::from_amplitudes(spec, k.clone()).unwrap()).unwrap();
        }
        let pairs = [(0, 0), (0, 1), (1, 2), (2, 2)];
        let mut dense = CMatrix::zeros(9, 9);
        for (&(l, r), &w) in pairs.iter().zip(&weights) {
            e.push_term(w, l, r).unwrap();
            dense.add_scaled_in_place(&CMatrix::outer(&kets[l], &kets[r]), w);
        }
        prop_assert!(e.to_operator().matrix().max_abs_diff(&dense) <= 1e-10);
    }

    #[test]
    fn dyad_kraus_matches_dense_damping(ket in complex_vec(9), r in 0.0..=1.0f64, mode in 0usize..2) {
        let spec = ModeSpec::new(2, 2).unwrap();
        let v = FockVector::from_amplitudes(spec, ket).unwrap();
        let loss = LossParams::new(r).unwrap();
        let single = ModeSpec::single(2).unwrap();
        let kraus = damping_kraus(loss, single).unwrap();
        let via_dyads = DyadEnsemble::pure(v.clone()).apply_kraus(mode, &kraus, 0.0).unwrap().to_operator();
        let dense = apply_damping(&FockOperator::projector(&v), mode, loss).unwrap();
        prop_assert!(via_dyads.max_abs_diff(&dense) <= 1e-10);
    }

    #[test]
    fn damping_is_a_semigroup(rho in density(16), t1 in 0.0..=1.0f64, t2 in 0.0..=1.0f64) {
        let spec = ModeSpec::new(2, 3).unwrap();
        let rho = FockOperator::from_matrix(spec, rho).unwrap();
        let l1 = LossParams::from_transmission(t1).unwrap();
        let l2 = LossParams::from_transmission(t2).unwrap();
        let l12 = LossParams::from_transmission(t1 * t2).unwrap();
        let twice = apply_damping(&apply_damping(&rho, 1, l1).unwrap(), 1, l2).unwrap();
        let once = apply_damping(&rho, 1, l12).unwrap();
        prop_assert!(twice.max_abs_diff(&once) <= 1e-10);
    }

    #[test]
    fn decohered_ecs_is_a_state(alpha in 0.05..2.5f64, r in 0.0..=1.0f64, odd in any::<bool>()) {
        let parity = if odd { EcsParity::Odd } else { EcsParity::Even };
        let ch = ecs_decohered(alpha, parity, LossParams::new(r).unwrap()).unwrap();
        let m = ch.matrix4();
        prop_assert!(m.hermiticity_deviation() <= 1e-12);
        prop_assert!((m.trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(hermitian_eigenvalues(m).unwrap().iter().all(|&l| l >= -1e-9));
    }

    #[test]
    fn epp_sector_weights_sum_to_one(r in 0.0..=1.0f64) {
        let w = epp_decohered(LossParams::new(r).unwrap()).sector_weights();
        prop_assert!((w.two_photon + w.one_photon + w.vacuum - 1.0).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn ecs_negativity_bounded_by_epp(alpha in 0.1..2.0f64, r in 0.0..=1.0f64) {
        let e = ecs_negativity_closed(alpha, r).unwrap();
        prop_assert!((e - ecs_negativity_numeric(alpha, r).unwrap()).abs() <= 1e-9);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&e));
        prop_assert!(epp_negativity_closed(r) >= e - 1e-12);
    }

    #[test]
    fn analytic_retained_outcomes_agree(
        alpha in 0.1..3.0f64, r in 0.0..0.99f64, eta in 0.01..=1.0f64, u in 0.0..PI, v in 0.0..2.0 * PI,
    ) {
        let q = InputQubit::new(u, v, alpha, r).unwrap();
        prop_assert!((q.norm_sqr() - 1.0).abs() <= 1e-12);
        let [a, b] = ecs_outcome(alpha, r, eta, &q).unwrap();
        prop_assert!((a.p - b.p).abs() <= 1e-12);
        prop_assert!((a.f.unwrap() - b.f.unwrap()).abs() <= 1e-12);
        prop_assert!(a.p >= 0.0);
    }

    #[test]
    fn ecs_succeeds_at_least_as_often_as_epp(alpha in 0.05..3.0f64, r in 0.0..=1.0f64, eta in 0.0..=1.0f64) {
        let p = closed_form_p_ecs(alpha, r, eta).unwrap();
        prop_assert!(p >= eta * eta * (1.0 - r * r) / 2.0 - 1e-12);
    }

    #[test]
    fn epp_fidelity_ignores_detector(r in 0.0..0.999f64, eta in 0.01..=1.0f64) {
        let a = epp_metrics(r, eta).unwrap();
        let b = epp_metrics(r, 1.0).unwrap();
        prop_assert_eq!(a.fidelity, b.fidelity);
        prop_assert_eq!(a.success, eta * eta * (1.0 - r * r) / 2.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn oracle_retained_outcomes_agree(
        alpha in 0.3..1.2f64, r in 0.0..0.8f64, eta in 0.5..=1.0f64, u in 0.0..PI, v in 0.0..2.0 * PI,
    ) {
        let res = simulate(&ProtocolConfig::new(ChannelKind::EcsOdd, alpha, r, eta, u, v).unwrap()).unwrap();
        let [a, b] = res.retained.map(|o| *res.record(o));
        prop_assert!((a.p - b.p).abs() <= 1e-12);
        prop_assert!((a.f.unwrap() - b.f.unwrap()).abs() <= 1e-12);
    }
}

#[test]
fn kraus_sets_are_complete() {
    let spec = ModeSpec::single(12).unwrap();
    for i in 0..=10 {
        let kraus = damping_kraus(LossParams::new(i as f64 / 10.0).unwrap(), spec).unwrap();
        let sum = kraus.iter().fold(FockOperator::zeros(spec), |acc, k| {
            acc.add(&k.adjoint().compose(k))
        });
        assert!(sum.max_abs_diff(&FockOperator::identity(spec)) <= 1e-12);
    }
}

#[test]
fn negativity_decays_with_loss() {
    for alpha in [0.1, 0.5, 1.0, 1.5, 2.0] {
        let mut last = (f64::INFINITY, f64::INFINITY);
        for i in 0..=20 {
            let r = i as f64 / 20.0;
            let now = (
                ecs_negativity_closed(alpha, r).unwrap(),
                epp_negativity_closed(r),
            );
            assert!(now.0 <= last.0 + 1e-14 && now.1 <= last.1);
            last = now;
        }
    }
}

#[test]
fn larger_amplitudes_decohere_faster() {
    for i in 1..20 {
        let r = i as f64 / 20.0;
        let rel =
            |a: f64| ecs_negativity_closed(a, r).unwrap() / ecs_negativity_closed(a, 0.0).unwrap();
        assert!(rel(2.0) <= rel(0.5));
    }
}

#[test]
fn epp_negativity_lives_in_two_photon_sector() {
    use ecs_epp::entanglement::negativity;
    for r in [0.0, 0.3, 0.6, 0.9] {
        let ch = epp_decohered(LossParams::new(r).unwrap());
        let full = negativity(ch.matrix9(), &[3, 3], &[1]).unwrap().value;
        // two-photon sector: (|HV⟩ + |VH⟩)/√2 on the {H,V}⊗{H,V} block
        let idx = [0usize, 1, 3, 4];
        let block = CMatrix::from_fn(4, 4, |i, j| ch.matrix9()[(idx[i], idx[j])]);
        let weight = ch.sector_weights().two_photon;
        let sector = if weight > 0.0 {
            negativity(
                &block.scale(Complex64::new(1.0 / weight, 0.0)),
                &[2, 2],
                &[1],
            )
            .unwrap()
            .value
        } else {
            0.0
        };
        assert!((full - weight * sector).abs() <= 1e-10);
    }
}

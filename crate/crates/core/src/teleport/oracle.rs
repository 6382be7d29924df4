//! Brute-force teleportation in truncated Fock space.
//!
//! Modes are ordered `(A, B, C)`: `A` carries the input qubit, `(B, C)` the channel.
//! A 50:50 beam splitter on `(A, B)` is followed by photon counting on both ports and a
//! correction on `C`. Detector inefficiency `η` is a loss channel in front of each
//! counter. Because loss Kraus operators only lower photon numbers and the counting
//! projectors are diagonal, the combined effect is a diagonal POVM: a click pattern
//! `(m_A, m_B)` arises from `(n_A, n_B)` photons with probability
//! `Bin(m_A; n_A, η)·Bin(m_B; n_B, η)`. [`DetectorModel::KrausBranches`] instead runs the
//! explicit Kraus sum on the ensemble.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fock::{
    beam_splitter, beam_splitter_leakage, coherent_ket_with_tolerance, cutoff_for_amplitude,
    phase_shifter, BellOutcome, DyadEnsemble, FockOperator, FockVector, ModeSpec,
    DEFAULT_TAIL_TOLERANCE,
};
use crate::linalg::CMatrix;
use crate::loss::{
    damping_amplitude, damping_kraus, ecs_decohered, ecs_ket, epp_decohered, EcsParity, LossParams,
};
use crate::scalar::{cr, Real, C};

use super::analytic::check_eta;
use super::{InputQubit, OutcomeRecord};

/// Largest tolerated squared amplitude the beam splitter cannot represent.
pub const LEAKAGE_TOLERANCE: f64 = 1e-10;
/// Kraus branches with a smaller contribution bound are dropped.
pub const BRANCH_PRUNE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    EcsOdd,
    EcsEven,
    Epp,
}

impl ChannelKind {
    /// Outcomes that are kept, Φ-type first.
    pub fn retained(self) -> [BellOutcome; 2] {
        match self {
            ChannelKind::EcsOdd | ChannelKind::Epp => {
                [BellOutcome::PhiMinus, BellOutcome::PsiMinus]
            }
            ChannelKind::EcsEven => [BellOutcome::PhiPlus, BellOutcome::PsiPlus],
        }
    }

    fn parity(self) -> Option<EcsParity> {
        match self {
            ChannelKind::EcsOdd => Some(EcsParity::Odd),
            ChannelKind::EcsEven => Some(EcsParity::Even),
            ChannelKind::Epp => None,
        }
    }
}

/// Which retained outcome receives the non-trivial correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrectionWiring {
    /// ECS: π phase on `C` after Φ-type outcomes, identity after Ψ-type.
    /// Photon pair: `Z` on the receiver after Ψ'⁻, identity after Ψ'⁺.
    Standard,
    /// The two corrections exchanged.
    Swapped,
}

/// The assignment that reaches unit fidelity without loss; see [`resolve_correction_wiring`].
pub const CORRECTION_WIRING: CorrectionWiring = CorrectionWiring::Standard;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetectorModel {
    /// Binomial click statistics folded into per-photon-number weights.
    PovmWeights,
    /// Explicit loss Kraus branches on both detector modes, then ideal counting.
    KrausBranches,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig<T> {
    pub channel: ChannelKind,
    /// Ignored for [`ChannelKind::Epp`].
    pub alpha: T,
    pub loss: LossParams<T>,
    pub eta: T,
    pub u: T,
    pub v: T,
    pub tail_tolerance: f64,
    pub wiring: CorrectionWiring,
    pub detector: DetectorModel,
}

impl<T: Real> ProtocolConfig<T> {
    pub fn new(channel: ChannelKind, alpha: T, r: T, eta: T, u: T, v: T) -> Result<Self> {
        check_eta(eta)?;
        if channel != ChannelKind::Epp && !(alpha > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "amplitude must be positive, got {alpha}"
            )));
        }
        Ok(Self {
            channel,
            alpha,
            loss: LossParams::new(r)?,
            eta,
            u,
            v,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
            wiring: CORRECTION_WIRING,
            detector: DetectorModel::PovmWeights,
        })
    }

    pub fn with_wiring(mut self, wiring: CorrectionWiring) -> Self {
        self.wiring = wiring;
        self
    }

    pub fn with_detector(mut self, detector: DetectorModel) -> Self {
        self.detector = detector;
        self
    }

    /// Amplitude `√2·tα` leaving the Bell beam splitter, which fixes the cutoff.
    pub fn peak_amplitude(&self) -> T {
        T::SQRT_2() * self.loss.t() * self.alpha
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<T> {
    /// One record per [`BellOutcome::ALL`] entry, in that order.
    pub outcomes: Vec<OutcomeRecord<T>>,
    /// Probability that both ports click.
    pub complement: T,
    pub total_probability: T,
    pub retained: [BellOutcome; 2],
    pub cutoff: usize,
    pub leakage: T,
}

impl<T: Real> OracleResult<T> {
    pub fn record(&self, outcome: BellOutcome) -> &OutcomeRecord<T> {
        self.outcomes
            .iter()
            .find(|o| o.outcome == outcome)
            .expect("every outcome is recorded")
    }

    pub fn success_probability(&self) -> T {
        self.retained
            .iter()
            .fold(T::zero(), |acc, &o| acc + self.record(o).p)
    }

    /// `Σp_j f_j / Σp_j` over retained outcomes.
    pub fn fidelity(&self) -> Option<T> {
        let p = self.success_probability();
        if p > T::zero() {
            let pf = self.retained.iter().fold(T::zero(), |acc, &o| {
                acc + self.record(o).weighted_fidelity()
            });
            Some(pf / p)
        } else {
            None
        }
    }
}

fn slot(outcome: Option<BellOutcome>) -> usize {
    match outcome {
        Some(BellOutcome::PhiPlus) => 0,
        Some(BellOutcome::PhiMinus) => 1,
        Some(BellOutcome::PsiPlus) => 2,
        Some(BellOutcome::PsiMinus) => 3,
        Some(BellOutcome::Error) => 4,
        None => 5,
    }
}

/// Correction on the receiver mode after a retained ECS outcome.
pub fn correction_unitary<T: Real>(
    outcome: BellOutcome,
    spec: ModeSpec,
    wiring: CorrectionWiring,
) -> Result<FockOperator<T>> {
    if outcome == BellOutcome::Error {
        return Err(Error::InvalidParameter(
            "the error outcome has no correction".into(),
        ));
    }
    let phase = !outcome.is_psi() ^ (wiring == CorrectionWiring::Swapped);
    if phase {
        phase_shifter(spec, 0, T::PI())
    } else {
        Ok(FockOperator::identity(spec))
    }
}

/// Runs the protocol selected by `config.channel`.
pub fn simulate<T: Real>(config: &ProtocolConfig<T>) -> Result<OracleResult<T>> {
    match config.channel {
        ChannelKind::Epp => simulate_epp(config),
        _ => simulate_ecs(config),
    }
}

/// ECS teleportation with the lossy channel taken in its two-dyad closed form.
pub fn simulate_ecs<T: Real>(config: &ProtocolConfig<T>) -> Result<OracleResult<T>> {
    let parity = config
        .channel
        .parity()
        .ok_or_else(|| Error::InvalidParameter("simulate_ecs needs an ECS channel".into()))?;
    let spec = ModeSpec::new(
        3,
        cutoff_for_amplitude(
            config.peak_amplitude().to_f64_lossy(),
            config.tail_tolerance,
        ),
    )?;
    let channel = ecs_decohered(config.alpha, parity, config.loss)?.dyads(spec)?;
    run_ecs(config, spec, &channel)
}

/// ECS teleportation with the channel built from the pure ECS by explicit loss Kraus
/// operators on both modes.
pub fn simulate_ecs_end_to_end<T: Real>(config: &ProtocolConfig<T>) -> Result<OracleResult<T>> {
    let parity = config.channel.parity().ok_or_else(|| {
        Error::InvalidParameter("simulate_ecs_end_to_end needs an ECS channel".into())
    })?;
    let mu = config.peak_amplitude().max(config.alpha).to_f64_lossy();
    let spec = ModeSpec::new(3, cutoff_for_amplitude(mu, config.tail_tolerance))?;
    let pair = spec.with_modes(2)?;
    let kraus = damping_kraus(config.loss, spec.with_modes(1)?)?;
    let prune = T::lit(BRANCH_PRUNE);
    let channel = DyadEnsemble::pure(ecs_ket(config.alpha, parity, pair)?)
        .apply_kraus(0, &kraus, prune)?
        .apply_kraus(1, &kraus, prune)?;
    run_ecs(config, spec, &channel)
}

fn input_ket<T: Real>(q: &InputQubit<T>, spec: ModeSpec, tolerance: f64) -> Result<FockVector<T>> {
    let single = spec.with_modes(1)?;
    let plus = coherent_ket_with_tolerance(q.t_alpha, single, tolerance)?;
    let minus = coherent_ket_with_tolerance(-q.t_alpha, single, tolerance)?;
    Ok(plus.combine(q.a, &minus, q.b))
}

/// Click-pattern weights per photon-number pair `(n_A, n_B)`, indexed `n_A·levels + n_B`.
fn detector_weights<T: Real>(levels: usize, eta: Option<T>) -> Vec<[T; 6]> {
    let mut w = vec![[T::zero(); 6]; levels * levels];
    match eta {
        None => {
            for na in 0..levels {
                for nb in 0..levels {
                    w[na * levels + nb][slot(BellOutcome::classify(na, nb))] = T::one();
                }
            }
        }
        Some(eta) => {
            // Bin(m; n, η) = ⟨n−(n−m)|K_{n−m}|n⟩²
            let pmf = |n: usize, m: usize| damping_amplitude(n, n - m, eta).powi(2);
            for na in 0..levels {
                for nb in 0..levels {
                    let cell = &mut w[na * levels + nb];
                    for ma in 0..=na {
                        let pa = pmf(na, ma);
                        for mb in 0..=nb {
                            cell[slot(BellOutcome::classify(ma, mb))] += pa * pmf(nb, mb);
                        }
                    }
                }
            }
        }
    }
    w
}

fn run_ecs<T: Real>(
    config: &ProtocolConfig<T>,
    spec: ModeSpec,
    channel: &DyadEnsemble<T>,
) -> Result<OracleResult<T>> {
    let q = InputQubit::new(config.u, config.v, config.alpha, config.loss.r())?;
    let single = spec.with_modes(1)?;
    let phi = input_ket(&q, spec, config.tail_tolerance)?;
    let mut ens = channel.prepend_pure(&phi)?;
    let leakage = ens
        .kets()
        .iter()
        .map(|k| beam_splitter_leakage(k, 0, 1))
        .fold(T::zero(), T::max);
    if leakage > T::lit(LEAKAGE_TOLERANCE) {
        return Err(Error::Leakage {
            tail: leakage.to_f64_lossy(),
            tolerance: LEAKAGE_TOLERANCE,
        });
    }
    let bs = beam_splitter(spec.with_modes(2)?, 0, 1, T::lit(FRAC_PI_2))?;
    ens = ens.map_kets(|k| bs.apply_to_modes(k, &[0, 1]))?;

    let levels = spec.levels();
    let weights = match config.detector {
        DetectorModel::PovmWeights => detector_weights(levels, Some(config.eta)),
        DetectorModel::KrausBranches => {
            let kraus = damping_kraus(LossParams::from_transmission(config.eta.sqrt())?, single)?;
            let prune = T::lit(BRANCH_PRUNE);
            ens = ens
                .apply_kraus(0, &kraus, prune)?
                .apply_kraus(1, &kraus, prune)?;
            detector_weights(levels, None)
        }
    };

    let retained = config.channel.retained();
    let retained_slots = retained.map(|o| slot(Some(o)));
    let mut states = [
        CMatrix::zeros(levels, levels),
        CMatrix::zeros(levels, levels),
    ];
    let mut traces = [T::zero(); 6];
    for (w, left, right) in ens.iter() {
        let (la, ra) = (left.amplitudes(), right.amplitudes());
        for (ab, cell) in weights.iter().enumerate() {
            let row_l = &la[ab * levels..(ab + 1) * levels];
            let row_r = &ra[ab * levels..(ab + 1) * levels];
            for (s, &cw) in cell.iter().enumerate() {
                if cw == T::zero() {
                    continue;
                }
                let scale = w * cw;
                if let Some(i) = retained_slots.iter().position(|&r| r == s) {
                    let m = states[i].as_mut_slice();
                    for (x, &l) in row_l.iter().enumerate() {
                        if l.is_zero() {
                            continue;
                        }
                        let sl = scale * l;
                        for (y, &r) in row_r.iter().enumerate() {
                            m[x * levels + y] += sl * r.conj();
                        }
                    }
                } else {
                    let overlap = row_l
                        .iter()
                        .zip(row_r)
                        .fold(C::zero(), |acc, (&l, &r)| acc + l * r.conj());
                    traces[s] += (scale * overlap).re;
                }
            }
        }
    }

    let target = input_ket(&q, single, config.tail_tolerance)?;
    let mut outcomes = Vec::with_capacity(5);
    for &o in &BellOutcome::ALL {
        let rec = match retained.iter().position(|&r| r == o) {
            Some(i) => {
                let u = correction_unitary::<T>(o, single, config.wiring)?;
                let rho = FockOperator::from_matrix(single, states[i].clone())?.conjugate_by(&u);
                let p = rho.trace().re;
                let pf = rho.expectation(&target).re;
                OutcomeRecord::new(o, p, Some(pf))
            }
            None => OutcomeRecord::new(o, traces[slot(Some(o))], None),
        };
        outcomes.push(rec);
    }
    let complement = traces[5];
    let total_probability = outcomes.iter().fold(complement, |acc, r| acc + r.p);
    Ok(OracleResult {
        outcomes,
        complement,
        total_probability,
        retained,
        cutoff: spec.cutoff(),
        leakage,
    })
}

/// Photon-pair teleportation in the per-party basis `{H, V, 0}`: input `X`, sender half
/// `Y`, receiver `Z`. The Bell measurement projects `(X, Y)` onto the four two-photon
/// Bell states after loss `η` on each detected party; only `Ψ'^±` are kept.
pub fn simulate_epp<T: Real>(config: &ProtocolConfig<T>) -> Result<OracleResult<T>> {
    let eta = config.eta;
    check_eta(eta)?;
    let one = T::one();
    let z = T::zero();
    let re = |x: T| Complex::new(x, z);
    let [ch, cv] = InputQubit::polarization(config.u, config.v);
    let phi = [ch, cv, C::zero()];
    let channel = epp_decohered(config.loss);
    let mut rho = CMatrix::outer(&phi, &phi).kron(channel.matrix9());

    let keep = eta.sqrt();
    let drop = (one - eta).sqrt();
    let k0 = CMatrix::from_real_rows(&[&[keep, z, z], &[z, keep, z], &[z, z, one]]);
    let k1 = CMatrix::from_real_rows(&[&[z, z, z], &[z, z, z], &[drop, z, z]]);
    let k2 = CMatrix::from_real_rows(&[&[z, z, z], &[z, z, z], &[z, drop, z]]);
    let id3 = CMatrix::<T>::identity(3);
    for party in 0..2 {
        let mut next = CMatrix::zeros(27, 27);
        for k in [&k0, &k1, &k2] {
            let full = if party == 0 {
                k.kron(&id3).kron(&id3)
            } else {
                id3.kron(k).kron(&id3)
            };
            next = next.add(&rho.conjugate_by(&full));
        }
        rho = next;
    }

    let h = T::FRAC_1_SQRT_2();
    // (|HH⟩ ± |VV⟩)/√2 and (|HV⟩ ± |VH⟩)/√2 on (X, Y), index 3x + y
    let bell = |o: BellOutcome| -> [C<T>; 9] {
        let mut v = [C::zero(); 9];
        let (i, j, sign) = match o {
            BellOutcome::PhiPlus => (0, 4, one),
            BellOutcome::PhiMinus => (0, 4, -one),
            BellOutcome::PsiPlus => (1, 3, one),
            BellOutcome::PsiMinus => (1, 3, -one),
            BellOutcome::Error => unreachable!(),
        };
        v[i] = re(h);
        v[j] = re(h * sign);
        v
    };
    let total = rho.trace().re;
    let retained = [BellOutcome::PsiPlus, BellOutcome::PsiMinus];
    let mut outcomes = Vec::with_capacity(5);
    let mut bell_mass = T::zero();
    for &o in &BellOutcome::ALL[..4] {
        let b = bell(o);
        let reduced = CMatrix::from_fn(3, 3, |zr, zc| {
            let mut acc = C::zero();
            for (xy, bl) in b.iter().enumerate() {
                if bl.is_zero() {
                    continue;
                }
                for (xy2, br) in b.iter().enumerate() {
                    if br.is_zero() {
                        continue;
                    }
                    acc += bl.conj() * rho[(xy * 3 + zr, xy2 * 3 + zc)] * br;
                }
            }
            acc
        });
        let p = reduced.trace().re;
        bell_mass += p;
        let rec = if retained.contains(&o) {
            let flip = (o == BellOutcome::PsiMinus) ^ (config.wiring == CorrectionWiring::Swapped);
            let u = CMatrix::diagonal(&[re(one), re(if flip { -one } else { one }), re(one)]);
            let corrected = reduced.conjugate_by(&u);
            OutcomeRecord::new(o, p, Some(corrected.sandwich(&phi, &phi).re))
        } else {
            OutcomeRecord::new(o, p, None)
        };
        outcomes.push(rec);
    }
    // fewer than two photons registered
    outcomes.push(OutcomeRecord::new(
        BellOutcome::Error,
        total - bell_mass,
        None,
    ));
    Ok(OracleResult {
        outcomes,
        complement: T::zero(),
        total_probability: total,
        retained: [BellOutcome::PsiPlus, BellOutcome::PsiMinus],
        cutoff: 1,
        leakage: T::zero(),
    })
}

/// Picks the correction assignment under which both retained ECS outcomes reach unit
/// fidelity without loss, testing a few input qubits at amplitude `alpha`.
pub fn resolve_correction_wiring<T: Real>(
    channel: ChannelKind,
    alpha: T,
) -> Result<CorrectionWiring> {
    let points = [(0.3, 0.4), (1.9, 2.5), (2.8, 5.5)];
    let mut best = T::zero();
    for wiring in [CorrectionWiring::Standard, CorrectionWiring::Swapped] {
        let mut worst = T::one();
        for &(u, v) in &points {
            let cfg =
                ProtocolConfig::new(channel, alpha, T::zero(), T::one(), T::lit(u), T::lit(v))?
                    .with_wiring(wiring);
            let res = simulate(&cfg)?;
            for &o in &res.retained {
                worst = worst.min(res.record(o).f.unwrap_or(T::zero()));
            }
        }
        if worst >= T::one() - T::tol(1e-8) {
            return Ok(wiring);
        }
        best = best.max(worst);
    }
    Err(Error::CorrectionWiring {
        best_fidelity: best.to_f64_lossy(),
    })
}

/// Where each coherent Bell state lands after the Bell beam splitter.
#[derive(Debug, Clone, PartialEq)]
pub struct BellSignatures<T> {
    /// `masses[j][i]`: weight of Bell state `j` (Φ⁺, Φ⁻, Ψ⁺, Ψ⁻) in the support of
    /// outcome `i` (Φ⁺, Φ⁻, Ψ⁺, Ψ⁻, error, both ports).
    pub masses: [[T; 6]; 4],
}

/// Maps `N(|β,β⟩ ± |−β,−β⟩)` and `N(|β,−β⟩ ± |−β,β⟩)`, `β = tα`, through the beam
/// splitter and records the counting-pattern weights.
pub fn bell_state_overlaps<T: Real>(alpha: T, r: T) -> Result<BellSignatures<T>> {
    if !(alpha > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "amplitude must be positive, got {alpha}"
        )));
    }
    let beta = LossParams::new(r)?.t() * alpha;
    let cutoff = cutoff_for_amplitude((T::SQRT_2() * beta).to_f64_lossy(), DEFAULT_TAIL_TOLERANCE);
    let pair = ModeSpec::new(2, cutoff)?;
    let single = pair.with_modes(1)?;
    let p = coherent_ket_with_tolerance(beta, single, DEFAULT_TAIL_TOLERANCE)?;
    let m = coherent_ket_with_tolerance(-beta, single, DEFAULT_TAIL_TOLERANCE)?;
    let bs = beam_splitter(pair, 0, 1, T::lit(FRAC_PI_2))?;
    let one = cr(T::one());
    let pp = p.tensor(&p)?;
    let mm = m.tensor(&m)?;
    let pm = p.tensor(&m)?;
    let mp = m.tensor(&p)?;
    let states = [
        pp.combine(one, &mm, one),
        pp.combine(one, &mm, -one),
        pm.combine(one, &mp, one),
        pm.combine(one, &mp, -one),
    ];
    let mut masses = [[T::zero(); 6]; 4];
    for (j, s) in states.iter().enumerate() {
        let out = bs.apply(&s.normalized()?);
        for (idx, z) in out.amplitudes().iter().enumerate() {
            let occ = pair.occupations(idx);
            masses[j][slot(BellOutcome::classify(occ[0], occ[1]))] += z.norm_sqr();
        }
    }
    Ok(BellSignatures { masses })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correction_assignment() {
        let spec = ModeSpec::single(4).unwrap();
        let std = CorrectionWiring::Standard;
        let id = FockOperator::<f64>::identity(spec);
        assert_eq!(
            correction_unitary::<f64>(BellOutcome::PsiMinus, spec, std).unwrap(),
            id
        );
        assert_ne!(
            correction_unitary::<f64>(BellOutcome::PhiMinus, spec, std).unwrap(),
            id
        );
        assert_eq!(
            correction_unitary::<f64>(BellOutcome::PhiMinus, spec, CorrectionWiring::Swapped)
                .unwrap(),
            id
        );
        assert!(correction_unitary::<f64>(BellOutcome::Error, spec, std).is_err());
    }

    #[test]
    fn detector_weights_are_stochastic() {
        let w = detector_weights::<f64>(6, Some(0.7));
        for cell in &w {
            assert!((cell.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
        assert_eq!(w[0][4], 1.0);
    }

    #[test]
    fn ideal_ecs_teleports_perfectly() {
        let cfg = ProtocolConfig::new(ChannelKind::EcsOdd, 1.0f64, 0.0, 1.0, 1.1, 2.3).unwrap();
        let res = simulate(&cfg).unwrap();
        for o in [BellOutcome::PhiMinus, BellOutcome::PsiMinus] {
            assert!((res.record(o).f.unwrap() - 1.0).abs() < 1e-8);
        }
        let p2 = res.record(BellOutcome::PhiMinus).p;
        let p4 = res.record(BellOutcome::PsiMinus).p;
        assert!((p2 - p4).abs() < 1e-12);
        assert!((res.total_probability - 1.0).abs() < 1e-8);
    }

    #[test]
    fn ideal_epp() {
        let cfg = ProtocolConfig::new(ChannelKind::Epp, 0.0f64, 0.0, 1.0, 0.7, 1.9).unwrap();
        let res = simulate(&cfg).unwrap();
        assert!((res.fidelity().unwrap() - 1.0).abs() < 1e-12);
        assert!((res.success_probability() - 0.5).abs() < 1e-12);
    }
}

//! Photon loss: the amplitude-damping channel and the decohered ECS / EPP channels.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fock::{coherent_ket, DyadEnsemble, FockOperator, FockVector, ModeSpec};
use crate::linalg::CMatrix;
use crate::scalar::{cr, Real, C};

/// Loss after normalized time `r`; amplitude transmission `t = √(1 − r²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParams<T> {
    r: T,
}

impl<T: Real> LossParams<T> {
    pub fn new(r: T) -> Result<Self> {
        if !(r >= T::zero() && r <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "normalized time r = {r} outside [0, 1]"
            )));
        }
        Ok(Self { r })
    }

    /// From amplitude transmission `t ∈ [0, 1]`.
    pub fn from_transmission(t: T) -> Result<Self> {
        if !(t >= T::zero() && t <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "transmission t = {t} outside [0, 1]"
            )));
        }
        Self::new((T::one() - t * t).max(T::zero()).sqrt())
    }

    pub fn lossless() -> Self {
        Self { r: T::zero() }
    }

    #[inline]
    pub fn r(&self) -> T {
        self.r
    }

    #[inline]
    pub fn r_sq(&self) -> T {
        self.r * self.r
    }

    #[inline]
    pub fn t_sq(&self) -> T {
        T::one() - self.r_sq()
    }

    #[inline]
    pub fn t(&self) -> T {
        self.t_sq().sqrt()
    }
}

fn binomial<T: Real>(n: usize, k: usize) -> T {
    let k = k.min(n - k);
    (0..k).fold(T::one(), |acc, i| {
        acc * T::from_usize_lossy(n - i) / T::from_usize_lossy(i + 1)
    })
}

/// `⟨n−k|K_k|n⟩ = √(C(n,k) τ^{n−k} (1−τ)^k)` for intensity transmission `τ`.
pub(crate) fn damping_amplitude<T: Real>(n: usize, k: usize, transmission_sq: T) -> T {
    if k > n {
        return T::zero();
    }
    let lost = T::one() - transmission_sq;
    (binomial::<T>(n, k) * transmission_sq.powi((n - k) as i32) * lost.powi(k as i32)).sqrt()
}

/// Kraus operators `K_0 … K_N` of the zero-temperature loss channel on a single mode.
pub fn damping_kraus<T: Real>(loss: LossParams<T>, spec: ModeSpec) -> Result<Vec<FockOperator<T>>> {
    if spec.mode_count() != 1 {
        return Err(Error::ModeMismatch(format!(
            "damping_kraus needs a single-mode spec, got {} modes",
            spec.mode_count()
        )));
    }
    let levels = spec.levels();
    let t2 = loss.t_sq();
    (0..levels)
        .map(|k| {
            let m = CMatrix::from_fn(levels, levels, |row, col| {
                if col >= k && row == col - k {
                    cr(damping_amplitude(col, k, t2))
                } else {
                    C::zero()
                }
            });
            FockOperator::from_matrix(spec, m)
        })
        .collect()
}

/// `Σ_k K_k ρ K_k†` on one mode of a dense operator, using the Kraus structure directly.
pub fn apply_damping<T: Real>(
    rho: &FockOperator<T>,
    mode: usize,
    loss: LossParams<T>,
) -> Result<FockOperator<T>> {
    let spec = rho.spec();
    spec.check_mode(mode)?;
    let dim = spec.dim();
    let t2 = loss.t_sq();
    let levels = spec.levels();
    let stride = levels.pow((spec.mode_count() - 1 - mode) as u32);
    let mut amp = vec![vec![T::zero(); levels]; levels];
    for (n, row) in amp.iter_mut().enumerate() {
        for (k, a) in row.iter_mut().enumerate().take(n + 1) {
            *a = damping_amplitude(n, k, t2);
        }
    }
    let src = rho.matrix();
    let mut out = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        let nr = spec.occupation(r, mode);
        for c in 0..dim {
            let z = src[(r, c)];
            if z.is_zero() {
                continue;
            }
            let nc = spec.occupation(c, mode);
            for k in 0..=nr.min(nc) {
                let w = amp[nr][k] * amp[nc][k];
                out.as_mut_slice()[(r - k * stride) * dim + (c - k * stride)] += z * w;
            }
        }
    }
    FockOperator::from_matrix(spec, out)
}

/// Photon-number parity of an entangled coherent state `N(|α,−α⟩ ± |−α,α⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EcsParity {
    /// `+` superposition, even total photon number.
    Even,
    /// `−` superposition, odd total photon number.
    Odd,
}

impl EcsParity {
    /// `+1` for even, `−1` for odd.
    pub fn sign<T: Real>(self) -> T {
        match self {
            EcsParity::Even => T::one(),
            EcsParity::Odd => -T::one(),
        }
    }
}

/// Squared normalization `N² = 1/(2 ± 2e^{−4α²})` of the ECS.
pub fn ecs_norm_sq<T: Real>(alpha: T, parity: EcsParity) -> T {
    let x = T::lit(-4.0) * alpha * alpha;
    match parity {
        EcsParity::Even => T::one() / (T::lit(2.0) * (T::one() + x.exp())),
        EcsParity::Odd => -T::one() / (T::lit(2.0) * x.exp_m1()),
    }
}

/// The ECS after both modes pass through loss `r`, in the dynamic basis
/// `|±⟩ = n_±(|tα⟩ ± |−tα⟩)` ordered `{|+⟩, |−⟩} ⊗ {|+⟩, |−⟩}`.
#[derive(Debug, Clone)]
pub struct EcsChannel<T> {
    alpha: T,
    parity: EcsParity,
    loss: LossParams<T>,
    matrix4: CMatrix<T>,
    vacuum_dominated: bool,
}

impl<T: Real> EcsChannel<T> {
    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn parity(&self) -> EcsParity {
        self.parity
    }

    pub fn loss(&self) -> LossParams<T> {
        self.loss
    }

    pub fn matrix4(&self) -> &CMatrix<T> {
        &self.matrix4
    }

    /// Even ECS whose vacuum overlap `4N²e^{−2α²}` exceeds one half.
    pub fn vacuum_dominated(&self) -> bool {
        self.vacuum_dominated
    }

    /// `e^{−4α²r²}`, the surviving weight of the coherent cross terms.
    pub fn cross_factor(&self) -> T {
        (T::lit(-4.0) * self.alpha * self.alpha * self.loss.r_sq()).exp()
    }

    /// Surviving amplitude `tα`.
    pub fn damped_amplitude(&self) -> T {
        self.loss.t() * self.alpha
    }

    /// `N²[|tα,−tα⟩⟨·| + |−tα,tα⟩⟨·| ± e^{−4α²r²}(cross terms)]` on two modes of `spec`.
    pub fn dyads(&self, spec: ModeSpec) -> Result<DyadEnsemble<T>> {
        let pair = spec.with_modes(2)?;
        let single = spec.with_modes(1)?;
        let ta = self.damped_amplitude();
        let plus = coherent_ket(ta, single)?;
        let minus = coherent_ket(-ta, single)?;
        let n2 = ecs_norm_sq(self.alpha, self.parity);
        let cross = n2 * self.parity.sign::<T>() * self.cross_factor();
        let mut e = DyadEnsemble::new(pair);
        let k1 = e.push_ket(plus.tensor(&minus)?)?;
        let k2 = e.push_ket(minus.tensor(&plus)?)?;
        e.push_term(cr(n2), k1, k1)?;
        e.push_term(cr(n2), k2, k2)?;
        e.push_term(cr(cross), k1, k2)?;
        e.push_term(cr(cross), k2, k1)?;
        Ok(e)
    }

    /// Normalized `|±⟩` on a single mode, or `None` when `t = 0` leaves `|−⟩` undefined.
    pub fn dynamic_basis(&self, spec: ModeSpec) -> Result<(FockVector<T>, Option<FockVector<T>>)> {
        dynamic_basis(self.damped_amplitude(), spec)
    }
}

/// `|+⟩ ∝ |a⟩ + |−a⟩` and `|−⟩ ∝ |a⟩ − |−a⟩` on a single mode.
pub fn dynamic_basis<T: Real>(
    amplitude: T,
    spec: ModeSpec,
) -> Result<(FockVector<T>, Option<FockVector<T>>)> {
    let single = spec.with_modes(1)?;
    let a = coherent_ket(amplitude, single)?;
    let b = coherent_ket(-amplitude, single)?;
    let one = cr(T::one());
    let plus = a.combine(one, &b, one).normalized()?;
    let minus = a.combine(one, &b, -one).normalized().ok();
    Ok((plus, minus))
}

/// The pure ECS `N(|α,−α⟩ ± |−α,α⟩)` on two modes of `spec`.
pub fn ecs_ket<T: Real>(alpha: T, parity: EcsParity, spec: ModeSpec) -> Result<FockVector<T>> {
    let single = spec.with_modes(1)?;
    let a = coherent_ket(alpha, single)?;
    let b = coherent_ket(-alpha, single)?;
    let n = ecs_norm_sq(alpha, parity).sqrt();
    Ok(a.tensor(&b)?
        .combine(cr(n), &b.tensor(&a)?, cr(n * parity.sign::<T>())))
}

/// Decohered ECS with the 4×4 matrix evaluated in a cancellation-free form.
pub fn ecs_decohered<T: Real>(
    alpha: T,
    parity: EcsParity,
    loss: LossParams<T>,
) -> Result<EcsChannel<T>> {
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "ECS amplitude must be positive, got {alpha}"
        )));
    }
    let two = T::lit(2.0);
    let a2 = alpha * alpha;
    let n2 = ecs_norm_sq(alpha, parity);
    // s = ⟨tα|−tα⟩; p² = (1+s)/2 and q² = (1−s)/2 are the |±⟩ weights of |tα⟩
    let x = -two * loss.t_sq() * a2;
    let s = x.exp();
    let p2 = (T::one() + s) / two;
    let q2 = -x.exp_m1() / two;
    let y = T::lit(-4.0) * a2 * loss.r_sq();
    let c = y.exp();
    let one_minus_c = -y.exp_m1();
    let (same, flip) = match parity {
        EcsParity::Odd => (one_minus_c, T::one() + c),
        EcsParity::Even => (T::one() + c, one_minus_c),
    };
    let a = two * n2 * p2 * p2 * same;
    let b = two * n2 * p2 * q2 * flip;
    let cc = two * n2 * q2 * q2 * same;
    let d = -two * n2 * p2 * q2 * same;
    let m = CMatrix::from_real_rows(&[
        &[a, T::zero(), T::zero(), d],
        &[T::zero(), b, -b, T::zero()],
        &[T::zero(), -b, b, T::zero()],
        &[d, T::zero(), T::zero(), cc],
    ]);
    let vacuum_overlap = T::lit(4.0) * n2 * (-two * a2).exp();
    Ok(EcsChannel {
        alpha,
        parity,
        loss,
        matrix4: m,
        vacuum_dominated: parity == EcsParity::Even && vacuum_overlap > T::lit(0.5),
    })
}

/// Raw odd-ECS coefficients `(A, B, C, D)` and prefactor `1/(4(e^{4α²} − 1))` in their
/// directly exponentiated form. Overflows for large `α`; used to cross-check
/// [`ecs_decohered`].
pub fn odd_ecs_raw_coefficients<T: Real>(alpha: T, r: T) -> ([T; 4], T) {
    let a2 = alpha * alpha;
    let r2 = r * r;
    let e = |x: T| x.exp();
    let one = T::one();
    let big = e(T::lit(-4.0) * (r2 - one) * a2);
    let a =
        big * (e(T::lit(4.0) * r2 * a2) - one) * (one + e(T::lit(2.0) * (r2 - one) * a2)).powi(2);
    let b = -one + e(T::lit(4.0) * a2) - e(T::lit(4.0) * r2 * a2) + big;
    let c =
        big * (e(T::lit(4.0) * r2 * a2) - one) * (e(T::lit(2.0) * (r2 - one) * a2) - one).powi(2);
    let d = -one - e(T::lit(4.0) * a2) + e(T::lit(4.0) * r2 * a2) + big;
    let pref = one / (T::lit(4.0) * (e(T::lit(4.0) * a2) - one));
    ([a, b, c, d], pref)
}

/// Projects a two-mode dense operator onto `{|+⟩, |−⟩}^{⊗2}` built from `amplitude`.
pub fn project_dynamic_basis<T: Real>(rho: &FockOperator<T>, amplitude: T) -> Result<CMatrix<T>> {
    let spec = rho.spec();
    if spec.mode_count() != 2 {
        return Err(Error::ModeMismatch(
            "dynamic-basis projection needs two modes".into(),
        ));
    }
    let (plus, minus) = dynamic_basis(amplitude, spec)?;
    let minus = minus.unwrap_or_else(|| FockVector::zeros(plus.spec()));
    let single = [plus, minus];
    let mut pair = Vec::with_capacity(4);
    for a in &single {
        for b in &single {
            pair.push(a.tensor(b)?);
        }
    }
    Ok(CMatrix::from_fn(4, 4, |i, j| {
        rho.matrix()
            .sandwich(pair[i].amplitudes(), pair[j].amplitudes())
    }))
}

/// Per-party label in the EPP basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
    Vacuum,
}

impl Polarization {
    pub const ALL: [Polarization; 3] = [Polarization::H, Polarization::V, Polarization::Vacuum];

    pub fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
            Polarization::Vacuum => 2,
        }
    }

    /// Photon numbers in the (H rail, V rail) dual-rail encoding.
    pub fn rails(self) -> [usize; 2] {
        match self {
            Polarization::H => [1, 0],
            Polarization::V => [0, 1],
            Polarization::Vacuum => [0, 0],
        }
    }
}

/// Index of `|x⟩|y⟩` in the 9-dimensional two-party basis.
pub fn epp_index(x: Polarization, y: Polarization) -> usize {
    x.index() * 3 + y.index()
}

/// Weights of the two-photon, one-photon and vacuum sectors of a lossy EPP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorWeights<T> {
    pub two_photon: T,
    pub one_photon: T,
    pub vacuum: T,
}

/// The photon pair `(|HV⟩ + |VH⟩)/√2` after loss, in the `{H, V, 0}^{⊗2}` basis.
#[derive(Debug, Clone)]
pub struct EppChannel<T> {
    loss: LossParams<T>,
    matrix9: CMatrix<T>,
}

impl<T: Real> EppChannel<T> {
    pub fn loss(&self) -> LossParams<T> {
        self.loss
    }

    pub fn matrix9(&self) -> &CMatrix<T> {
        &self.matrix9
    }

    pub fn sector_weights(&self) -> SectorWeights<T> {
        let t2 = self.loss.t_sq();
        let r2 = self.loss.r_sq();
        SectorWeights {
            two_photon: t2 * t2,
            one_photon: T::lit(2.0) * t2 * r2,
            vacuum: r2 * r2,
        }
    }

    /// The same state on four modes `(A_H, A_V, B_H, B_V)` with cutoff 2.
    pub fn dual_rail(&self) -> Result<FockOperator<T>> {
        let spec = dual_rail_spec()?;
        let index = |x: Polarization, y: Polarization| {
            let [a, b] = x.rails();
            let [c, d] = y.rails();
            spec.index(&[a, b, c, d])
        };
        let mut m = CMatrix::zeros(spec.dim(), spec.dim());
        for &x1 in &Polarization::ALL {
            for &y1 in &Polarization::ALL {
                for &x2 in &Polarization::ALL {
                    for &y2 in &Polarization::ALL {
                        let v = self.matrix9[(epp_index(x1, y1), epp_index(x2, y2))];
                        m.as_mut_slice()[index(x1, y1) * spec.dim() + index(x2, y2)] = v;
                    }
                }
            }
        }
        FockOperator::from_matrix(spec, m)
    }
}

/// Four modes, cutoff 2: the dual-rail carrier of the EPP.
pub fn dual_rail_spec() -> Result<ModeSpec> {
    ModeSpec::new(4, 2)
}

/// `(|HV⟩ + |VH⟩)/√2` as a dual-rail ket.
pub fn epp_dual_rail_ket<T: Real>() -> Result<FockVector<T>> {
    let spec = dual_rail_spec()?;
    let hv = FockVector::basis(spec, &[1, 0, 0, 1])?;
    let vh = FockVector::basis(spec, &[0, 1, 1, 0])?;
    let h = cr(T::FRAC_1_SQRT_2());
    Ok(hv.combine(h, &vh, h))
}

/// Folds a dual-rail operator back onto `{H, V, 0}^{⊗2}`; fails if more than `tolerance`
/// of the trace sits outside that subspace.
pub fn fold_dual_rail<T: Real>(rho: &FockOperator<T>, tolerance: T) -> Result<CMatrix<T>> {
    let spec = rho.spec();
    if spec.mode_count() != 4 {
        return Err(Error::ModeMismatch(
            "dual-rail operator needs four modes".into(),
        ));
    }
    let index = |x: Polarization, y: Polarization| {
        let [a, b] = x.rails();
        let [c, d] = y.rails();
        spec.index(&[a, b, c, d])
    };
    let mut inside = T::zero();
    let mut m = CMatrix::zeros(9, 9);
    for &x1 in &Polarization::ALL {
        for &y1 in &Polarization::ALL {
            let i = index(x1, y1);
            inside += rho.matrix()[(i, i)].re;
            for &x2 in &Polarization::ALL {
                for &y2 in &Polarization::ALL {
                    m.as_mut_slice()[epp_index(x1, y1) * 9 + epp_index(x2, y2)] =
                        rho.matrix()[(i, index(x2, y2))];
                }
            }
        }
    }
    let outside = (rho.trace().re - inside).abs();
    if outside > tolerance {
        return Err(Error::Leakage {
            tail: outside.to_f64_lossy(),
            tolerance: tolerance.to_f64_lossy(),
        });
    }
    Ok(m)
}

/// `t⁴ρ_EPP(0) + 2t²r²ρ₁ + r⁴ρ_v`.
pub fn epp_decohered<T: Real>(loss: LossParams<T>) -> EppChannel<T> {
    use Polarization::{Vacuum, H, V};
    let t2 = loss.t_sq();
    let r2 = loss.r_sq();
    let half = T::lit(0.5);
    let mut m = CMatrix::zeros(9, 9);
    let mut set =
        |i: usize, j: usize, v: T| m.as_mut_slice()[i * 9 + j] = Complex::new(v, T::zero());
    let pair = t2 * t2 * half;
    for i in [epp_index(H, V), epp_index(V, H)] {
        for j in [epp_index(H, V), epp_index(V, H)] {
            set(i, j, pair);
        }
    }
    let single = t2 * r2 * half;
    for i in [
        epp_index(H, Vacuum),
        epp_index(V, Vacuum),
        epp_index(Vacuum, H),
        epp_index(Vacuum, V),
    ] {
        set(i, i, single);
    }
    set(
        epp_index(Vacuum, Vacuum),
        epp_index(Vacuum, Vacuum),
        r2 * r2,
    );
    EppChannel { loss, matrix9: m }
}

//! Coherent states and the passive linear-optics elements of the protocol.

use num_complex::Complex;

use super::mode::{poisson_tail, ModeSpec, DEFAULT_TAIL_TOLERANCE};
use super::operator::FockOperator;
use super::vector::FockVector;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::scalar::{cis, cr, Real, C};

/// Real-amplitude coherent state `|α⟩` on a single mode, truncated at the mode's cutoff.
///
/// Fails with [`Error::Truncation`] when the Poisson tail above the cutoff exceeds
/// [`DEFAULT_TAIL_TOLERANCE`].
pub fn coherent_ket<T: Real>(amplitude: T, spec: ModeSpec) -> Result<FockVector<T>> {
    coherent_ket_with_tolerance(amplitude, spec, DEFAULT_TAIL_TOLERANCE)
}

pub fn coherent_ket_with_tolerance<T: Real>(
    amplitude: T,
    spec: ModeSpec,
    tolerance: f64,
) -> Result<FockVector<T>> {
    if spec.mode_count() != 1 {
        return Err(Error::ModeMismatch(format!(
            "coherent_ket needs a single-mode spec, got {} modes",
            spec.mode_count()
        )));
    }
    if !amplitude.is_finite() {
        return Err(Error::InvalidParameter(
            "non-finite coherent amplitude".into(),
        ));
    }
    let mu = amplitude.to_f64_lossy();
    let tail = poisson_tail(mu, spec.cutoff());
    if tail > tolerance {
        return Err(Error::Truncation {
            amplitude: mu,
            cutoff: spec.cutoff(),
            tail,
            tolerance,
        });
    }
    let mut amps = Vec::with_capacity(spec.levels());
    let mut c = (-(amplitude * amplitude) * T::lit(0.5)).exp();
    amps.push(cr(c));
    for n in 1..spec.levels() {
        c = c * amplitude / T::from_usize_lossy(n).sqrt();
        amps.push(cr(c));
    }
    FockVector::from_amplitudes(spec, amps)
}

/// Two-mode beam splitter `U_{i,j}(θ)` on modes `(mode_i, mode_j)` of `spec`.
///
/// Acts as `|α⟩_i|β⟩_j → |cos(θ/2)α + sin(θ/2)β⟩_i |cos(θ/2)β − sin(θ/2)α⟩_j`, so
/// `θ = π/2` gives `|(α+β)/√2⟩|(β−α)/√2⟩` and the transmissivity is `cos²(θ/2)`.
/// Built block by block in total photon number: each block of the anti-Hermitian
/// generator `a_i†a_j − a_i a_j†` is exponentiated through a Jacobi
/// eigendecomposition. Blocks with total photon number above the cutoff are only
/// partially representable; see [`beam_splitter_leakage`].
pub fn beam_splitter<T: Real>(
    spec: ModeSpec,
    mode_i: usize,
    mode_j: usize,
    theta: T,
) -> Result<FockOperator<T>> {
    spec.check_mode(mode_i)?;
    spec.check_mode(mode_j)?;
    if mode_i == mode_j {
        return Err(Error::InvalidParameter(
            "beam splitter needs two distinct modes".into(),
        ));
    }
    if !theta.is_finite() {
        return Err(Error::InvalidParameter(
            "non-finite beam-splitter angle".into(),
        ));
    }
    let pair = ModeSpec::new(2, spec.cutoff())?;
    let u = two_mode_beam_splitter(pair, theta)?;
    if spec.mode_count() == 2 && mode_i == 0 && mode_j == 1 {
        Ok(u)
    } else {
        u.embed(spec, &[mode_i, mode_j])
    }
}

fn two_mode_beam_splitter<T: Real>(pair: ModeSpec, theta: T) -> Result<FockOperator<T>> {
    let cutoff = pair.cutoff();
    let half = theta * T::lit(0.5);
    let mut u = CMatrix::zeros(pair.dim(), pair.dim());
    for total in 0..=2 * cutoff {
        let lo = total.saturating_sub(cutoff);
        let hi = total.min(cutoff);
        let size = hi - lo + 1;
        // H = i·G restricted to the block; basis index k ↔ |lo + k, total − lo − k⟩
        let mut h = CMatrix::zeros(size, size);
        for k in 0..size {
            let ni = lo + k;
            let nj = total - ni;
            if k + 1 < size {
                // a_i† a_j: |ni, nj⟩ → √((ni+1) nj) |ni+1, nj−1⟩
                let g = T::from_usize_lossy((ni + 1) * nj).sqrt();
                h[(k + 1, k)] = Complex::new(T::zero(), g);
                h[(k, k + 1)] = Complex::new(T::zero(), -g);
            }
        }
        let eig = hermitian_eigen(&h)?;
        // exp(φG) = exp(−iφH) = V diag(e^{−iφλ}) V†
        let phases: Vec<C<T>> = eig.values.iter().map(|&l| cis(-half * l)).collect();
        let block = eig
            .vectors
            .matmul(&CMatrix::diagonal(&phases))
            .matmul(&eig.vectors.adjoint());
        for r in 0..size {
            let row = pair.index(&[lo + r, total - lo - r]);
            for c in 0..size {
                let col = pair.index(&[lo + c, total - lo - c]);
                u[(row, col)] = block[(r, c)];
            }
        }
    }
    FockOperator::from_matrix(pair, u)
}

/// Squared amplitude of `v` that a beam splitter on `(mode_i, mode_j)` cannot represent
/// faithfully: basis states where the two modes together hold more than `cutoff` photons.
pub fn beam_splitter_leakage<T: Real>(v: &FockVector<T>, mode_i: usize, mode_j: usize) -> T {
    let spec = v.spec();
    v.amplitudes()
        .iter()
        .enumerate()
        .filter(|(idx, _)| {
            spec.occupation(*idx, mode_i) + spec.occupation(*idx, mode_j) > spec.cutoff()
        })
        .fold(T::zero(), |acc, (_, z)| acc + z.norm_sqr())
}

/// `exp(i·φ·n)` on `mode`; maps `|α⟩ → |e^{iφ}α⟩`.
pub fn phase_shifter<T: Real>(spec: ModeSpec, mode: usize, phi: T) -> Result<FockOperator<T>> {
    spec.check_mode(mode)?;
    Ok(FockOperator::diagonal(spec, |occ| {
        cis(phi * T::from_usize_lossy(occ[mode]))
    }))
}

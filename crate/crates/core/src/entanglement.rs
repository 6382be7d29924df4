//! Negativity `E = −2Σλ⁻` of the partial transpose.

use crate::error::Result;
use crate::fock::FockOperator;
use crate::linalg::{hermitian_eigenvalues, partial_transpose, CMatrix};
use crate::loss::{ecs_decohered, ecs_norm_sq, epp_decohered, EcsParity, LossParams};
use crate::scalar::Real;

/// Eigenvalues of the partial transpose above `−NEGATIVE_THRESHOLD` count as zero.
pub const NEGATIVE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementResult<T> {
    pub value: T,
    pub negative_eigenvalues: Vec<T>,
}

/// Negativity of `rho` on subsystems `dims`, transposing the subsystems in `transposed`.
pub fn negativity<T: Real>(
    rho: &CMatrix<T>,
    dims: &[usize],
    transposed: &[usize],
) -> Result<EntanglementResult<T>> {
    let pt = partial_transpose(rho, dims, transposed)?;
    let threshold = -T::lit(NEGATIVE_THRESHOLD);
    let negative_eigenvalues: Vec<T> = hermitian_eigenvalues(&pt)?
        .into_iter()
        .filter(|&l| l < threshold)
        .collect();
    let value = negative_eigenvalues
        .iter()
        .fold(T::zero(), |acc, &l| acc - l - l);
    Ok(EntanglementResult {
        value,
        negative_eigenvalues,
    })
}

/// Negativity of a Fock operator across the cut after `transposed` modes.
pub fn fock_negativity<T: Real>(
    rho: &FockOperator<T>,
    transposed: &[usize],
) -> Result<EntanglementResult<T>> {
    negativity(rho.matrix(), &rho.spec().dims(), transposed)
}

/// Negativity of the lossy odd ECS, evaluated from its 4×4 matrix.
pub fn ecs_negativity_numeric<T: Real>(alpha: T, r: T) -> Result<T> {
    let ch = ecs_decohered(alpha, EcsParity::Odd, LossParams::new(r)?)?;
    Ok(negativity(ch.matrix4(), &[2, 2], &[1])?.value)
}

/// Closed-form negativity of the lossy odd ECS.
///
/// Uses `E = √((A−C)² + 4B²) − (A + C)` on the normalized matrix entries, rationalized to
/// `4(B² − AC)/(√((A−C)² + 4B²) + A + C)` with `B² − AC = 16N⁴p⁴q⁴e^{−4α²r²}`.
/// Capped at 1, the two-qubit maximum, which it reaches at `r = 0` up to rounding.
pub fn ecs_negativity_closed<T: Real>(alpha: T, r: T) -> Result<T> {
    let loss = LossParams::new(r)?;
    let two = T::lit(2.0);
    let a2 = alpha * alpha;
    let n2 = ecs_norm_sq(alpha, EcsParity::Odd);
    let x = -two * loss.t_sq() * a2;
    let p2 = (T::one() + x.exp()) / two;
    let q2 = -x.exp_m1() / two;
    let y = T::lit(-4.0) * a2 * loss.r_sq();
    let c = y.exp();
    let one_minus_c = -y.exp_m1();
    let a = two * n2 * p2 * p2 * one_minus_c;
    let b = two * n2 * p2 * q2 * (T::one() + c);
    let cc = two * n2 * q2 * q2 * one_minus_c;
    let det = T::lit(16.0) * n2 * n2 * p2 * p2 * q2 * q2 * c;
    let denom = ((a - cc) * (a - cc) + T::lit(4.0) * b * b).sqrt() + a + cc;
    if denom == T::zero() {
        return Ok(T::zero());
    }
    Ok((T::lit(4.0) * det / denom).min(T::one()))
}

/// `(1 − r²)²`
pub fn epp_negativity_closed<T: Real>(r: T) -> T {
    let t2 = T::one() - r * r;
    t2 * t2
}

/// Negativity of the lossy EPP from its full 3⊗3 matrix.
pub fn epp_negativity_numeric<T: Real>(r: T) -> Result<T> {
    let ch = epp_decohered(LossParams::new(r)?);
    Ok(negativity(ch.matrix9(), &[3, 3], &[1])?.value)
}

/// `α → 0` limit of the odd-ECS negativity: `−r² + √(1 − 2r² + 2r⁴)`.
pub fn ecs_negativity_small_alpha<T: Real>(r: T) -> T {
    let r2 = r * r;
    -r2 + (T::one() - T::lit(2.0) * r2 + T::lit(2.0) * r2 * r2).sqrt()
}

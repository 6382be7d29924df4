use num_complex::Complex;
use num_traits::{One, Zero};

use super::mode::ModeSpec;
use crate::error::{Error, Result};
use crate::linalg::{inner, CMatrix};
use crate::scalar::{Real, C};

/// Ket over a truncated multimode Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector<T> {
    spec: ModeSpec,
    amps: Vec<C<T>>,
}

impl<T: Real> FockVector<T> {
    pub fn zeros(spec: ModeSpec) -> Self {
        Self {
            spec,
            amps: vec![C::zero(); spec.dim()],
        }
    }

    pub fn basis(spec: ModeSpec, occupations: &[usize]) -> Result<Self> {
        if occupations.len() != spec.mode_count() {
            return Err(Error::ModeMismatch(format!(
                "{} occupations for {} modes",
                occupations.len(),
                spec.mode_count()
            )));
        }
        if let Some(&n) = occupations.iter().find(|&&n| n > spec.cutoff()) {
            return Err(Error::InvalidParameter(format!(
                "occupation {n} above cutoff {}",
                spec.cutoff()
            )));
        }
        let mut v = Self::zeros(spec);
        v.amps[spec.index(occupations)] = C::one();
        Ok(v)
    }

    pub fn vacuum(spec: ModeSpec) -> Self {
        let mut v = Self::zeros(spec);
        v.amps[0] = C::one();
        v
    }

    pub fn from_amplitudes(spec: ModeSpec, amps: Vec<C<T>>) -> Result<Self> {
        if amps.len() != spec.dim() {
            return Err(Error::ModeMismatch(format!(
                "{} amplitudes for dimension {}",
                amps.len(),
                spec.dim()
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(Self { spec, amps })
    }

    #[inline]
    pub fn spec(&self) -> ModeSpec {
        self.spec
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    #[inline]
    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C<T>] {
        &mut self.amps
    }

    pub fn amplitude(&self, occupations: &[usize]) -> C<T> {
        self.amps[self.spec.index(occupations)]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> C<T> {
        debug_assert_eq!(self.spec, other.spec);
        inner(&self.amps, &other.amps)
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            spec: self.spec,
            amps: self.amps.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.spec, other.spec);
        Self {
            spec: self.spec,
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    /// `a·self + b·other`
    pub fn combine(&self, a: C<T>, other: &Self, b: C<T>) -> Self {
        debug_assert_eq!(self.spec, other.spec);
        Self {
            spec: self.spec,
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(&x, &y)| x * a + y * b)
                .collect(),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= T::min_positive_value() {
            return Err(Error::InvalidParameter(
                "cannot normalise the zero vector".into(),
            ));
        }
        Ok(self.scale(Complex::new(n.recip(), T::zero())))
    }

    /// Kronecker product; modes of `self` come first.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.spec.cutoff() != other.spec.cutoff() {
            return Err(Error::ModeMismatch(format!(
                "cutoffs {} and {} differ",
                self.spec.cutoff(),
                other.spec.cutoff()
            )));
        }
        let spec = self
            .spec
            .with_modes(self.spec.mode_count() + other.spec.mode_count())?;
        let mut amps = Vec::with_capacity(spec.dim());
        for &a in &self.amps {
            for &b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { spec, amps })
    }

    /// `|self⟩⟨other|` as a dense matrix.
    pub fn outer(&self, other: &Self) -> CMatrix<T> {
        CMatrix::outer(&self.amps, &other.amps)
    }

    /// Squared amplitude on basis states with total photon number above the cutoff.
    ///
    /// These are the states a number-conserving two-mode operation cannot map
    /// faithfully inside the truncated space.
    pub fn mass_above_total(&self, max_total: usize) -> T {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.spec.occupations(*i).iter().sum::<usize>() > max_total)
            .fold(T::zero(), |acc, (_, z)| acc + z.norm_sqr())
    }

    /// Squared amplitude on basis states that put `cutoff` photons into any mode.
    pub fn mass_at_cutoff(&self) -> T {
        let top = self.spec.cutoff();
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.spec.occupations(*i).contains(&top))
            .fold(T::zero(), |acc, (_, z)| acc + z.norm_sqr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_tensor_vacuum() {
        let s1 = ModeSpec::single(3).unwrap();
        let v: FockVector<f64> = FockVector::vacuum(s1)
            .tensor(&FockVector::vacuum(s1))
            .unwrap();
        assert_eq!(v, FockVector::vacuum(ModeSpec::new(2, 3).unwrap()));
    }

    #[test]
    fn one_tensor_zero_sits_at_one_zero() {
        let s1 = ModeSpec::single(3).unwrap();
        let one = FockVector::<f64>::basis(s1, &[1]).unwrap();
        let v = one.tensor(&FockVector::vacuum(s1)).unwrap();
        assert_eq!(v.amplitude(&[1, 0]), C::one());
        assert!((v.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_rejects_mismatched_cutoffs() {
        let a = FockVector::<f64>::vacuum(ModeSpec::single(3).unwrap());
        let b = FockVector::<f64>::vacuum(ModeSpec::single(4).unwrap());
        assert!(matches!(a.tensor(&b), Err(Error::ModeMismatch(_))));
    }

    #[test]
    fn basis_rejects_occupation_above_cutoff() {
        assert!(FockVector::<f64>::basis(ModeSpec::single(2).unwrap(), &[3]).is_err());
    }
}

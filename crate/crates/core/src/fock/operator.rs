use num_complex::Complex;
use num_traits::Zero;

use super::mode::ModeSpec;
use super::vector::FockVector;
use crate::error::{Error, Result};
use crate::linalg::{self, subsystem_offsets, CMatrix};
use crate::scalar::{cr, Real, C};

/// Dense operator on a truncated multimode Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator<T> {
    spec: ModeSpec,
    matrix: CMatrix<T>,
}

impl<T: Real> FockOperator<T> {
    pub fn from_matrix(spec: ModeSpec, matrix: CMatrix<T>) -> Result<Self> {
        if matrix.rows() != spec.dim() || matrix.cols() != spec.dim() {
            return Err(Error::ModeMismatch(format!(
                "{}x{} matrix for dimension {}",
                matrix.rows(),
                matrix.cols(),
                spec.dim()
            )));
        }
        Ok(Self { spec, matrix })
    }

    pub fn identity(spec: ModeSpec) -> Self {
        Self {
            spec,
            matrix: CMatrix::identity(spec.dim()),
        }
    }

    pub fn zeros(spec: ModeSpec) -> Self {
        Self {
            spec,
            matrix: CMatrix::zeros(spec.dim(), spec.dim()),
        }
    }

    /// `|v⟩⟨v|`
    pub fn projector(v: &FockVector<T>) -> Self {
        Self {
            spec: v.spec(),
            matrix: v.outer(v),
        }
    }

    /// Operator diagonal in the Fock basis.
    pub fn diagonal(spec: ModeSpec, mut f: impl FnMut(&[usize]) -> C<T>) -> Self {
        let entries: Vec<_> = (0..spec.dim()).map(|i| f(&spec.occupations(i))).collect();
        Self {
            spec,
            matrix: CMatrix::diagonal(&entries),
        }
    }

    /// Annihilation operator `a` of `mode`.
    pub fn annihilation(spec: ModeSpec, mode: usize) -> Result<Self> {
        spec.check_mode(mode)?;
        let mut m = CMatrix::zeros(spec.dim(), spec.dim());
        for col in 0..spec.dim() {
            let mut occ = spec.occupations(col);
            let n = occ[mode];
            if n > 0 {
                occ[mode] = n - 1;
                m[(spec.index(&occ), col)] = cr(T::from_usize_lossy(n).sqrt());
            }
        }
        Ok(Self { spec, matrix: m })
    }

    pub fn creation(spec: ModeSpec, mode: usize) -> Result<Self> {
        Ok(Self::annihilation(spec, mode)?.adjoint())
    }

    pub fn number(spec: ModeSpec, mode: usize) -> Result<Self> {
        spec.check_mode(mode)?;
        Ok(Self::diagonal(spec, |occ| {
            cr(T::from_usize_lossy(occ[mode]))
        }))
    }

    #[inline]
    pub fn spec(&self) -> ModeSpec {
        self.spec
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn entry(&self, row: &[usize], col: &[usize]) -> C<T> {
        self.matrix[(self.spec.index(row), self.spec.index(col))]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            spec: self.spec,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.spec, rhs.spec);
        Self {
            spec: self.spec,
            matrix: self.matrix.matmul(&rhs.matrix),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.spec, rhs.spec);
        Self {
            spec: self.spec,
            matrix: self.matrix.add(&rhs.matrix),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.spec, rhs.spec);
        Self {
            spec: self.spec,
            matrix: self.matrix.sub(&rhs.matrix),
        }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            spec: self.spec,
            matrix: self.matrix.scale(s),
        }
    }

    /// `U · self · U†`
    pub fn conjugate_by(&self, u: &Self) -> Self {
        Self {
            spec: self.spec,
            matrix: self.matrix.conjugate_by(&u.matrix),
        }
    }

    pub fn trace(&self) -> C<T> {
        self.matrix.trace()
    }

    pub fn apply(&self, v: &FockVector<T>) -> FockVector<T> {
        debug_assert_eq!(self.spec, v.spec());
        FockVector::from_amplitudes(v.spec(), self.matrix.mul_vec(v.amplitudes()))
            .expect("dimension preserved")
    }

    /// `⟨v|self|v⟩`
    pub fn expectation(&self, v: &FockVector<T>) -> C<T> {
        self.matrix.sandwich(v.amplitudes(), v.amplitudes())
    }

    /// Applies this operator to the listed `modes` of a larger state.
    ///
    /// `modes[k]` is the mode of `v` that plays the role of this operator's mode `k`.
    pub fn apply_to_modes(&self, v: &FockVector<T>, modes: &[usize]) -> Result<FockVector<T>> {
        let target = v.spec();
        if modes.len() != self.spec.mode_count() || target.cutoff() != self.spec.cutoff() {
            return Err(Error::ModeMismatch(format!(
                "{}-mode operator (cutoff {}) on modes {modes:?} of a {}-mode state (cutoff {})",
                self.spec.mode_count(),
                self.spec.cutoff(),
                target.mode_count(),
                target.cutoff()
            )));
        }
        for (i, &m) in modes.iter().enumerate() {
            target.check_mode(m)?;
            if modes[..i].contains(&m) {
                return Err(Error::InvalidParameter(format!("mode {m} listed twice")));
            }
        }
        let dims = target.dims();
        let rest: Vec<usize> = (0..target.mode_count())
            .filter(|k| !modes.contains(k))
            .collect();
        let op_off = subsystem_offsets(&dims, modes);
        let rest_off = subsystem_offsets(&dims, &rest);

        let sparse_rows: Vec<Vec<(usize, C<T>)>> = (0..self.matrix.rows())
            .map(|i| {
                self.matrix
                    .row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, z)| !z.is_zero())
                    .map(|(j, &z)| (j, z))
                    .collect()
            })
            .collect();

        let src = v.amplitudes();
        let mut out = FockVector::zeros(target);
        let dst = out.amplitudes_mut();
        for &ro in &rest_off {
            for (i, row) in sparse_rows.iter().enumerate() {
                let acc = row
                    .iter()
                    .fold(C::zero(), |acc, &(j, z)| acc + z * src[ro + op_off[j]]);
                dst[ro + op_off[i]] = acc;
            }
        }
        Ok(out)
    }

    /// Dense embedding into a larger space, acting as identity on the other modes.
    pub fn embed(&self, target: ModeSpec, modes: &[usize]) -> Result<Self> {
        let mut m = CMatrix::zeros(target.dim(), target.dim());
        for col in 0..target.dim() {
            let mut e = FockVector::zeros(target);
            e.amplitudes_mut()[col] = Complex::new(T::one(), T::zero());
            let img = self.apply_to_modes(&e, modes)?;
            for (row, &z) in img.amplitudes().iter().enumerate() {
                m[(row, col)] = z;
            }
        }
        Self::from_matrix(target, m)
    }

    /// Kronecker product; modes of `self` come first.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.spec.cutoff() != other.spec.cutoff() {
            return Err(Error::ModeMismatch(
                "tensor of operators with different cutoffs".into(),
            ));
        }
        let spec = self
            .spec
            .with_modes(self.spec.mode_count() + other.spec.mode_count())?;
        Ok(Self {
            spec,
            matrix: self.matrix.kron(&other.matrix),
        })
    }

    /// Traces out every mode not listed in `keep`; kept modes stay in ascending order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let matrix = linalg::partial_trace(&self.matrix, &self.spec.dims(), keep)?;
        let spec = self.spec.with_modes(keep.len())?;
        Ok(Self { spec, matrix })
    }

    pub fn partial_transpose(&self, transposed: &[usize]) -> Result<Self> {
        let matrix = linalg::partial_transpose(&self.matrix, &self.spec.dims(), transposed)?;
        Ok(Self {
            spec: self.spec,
            matrix,
        })
    }

    pub fn hermiticity_deviation(&self) -> T {
        self.matrix.hermiticity_deviation()
    }

    /// `max |U†U - 1|`
    pub fn unitarity_deviation(&self) -> T {
        self.matrix
            .adjoint()
            .matmul(&self.matrix)
            .max_abs_diff(&CMatrix::identity(self.spec.dim()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.matrix.max_abs_diff(&other.matrix)
    }
}

use num_complex::Complex;
use num_traits::Zero;

use super::mode::ModeSpec;
use super::operator::FockOperator;
use super::vector::FockVector;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{Real, C};

/// One term `w·|left⟩⟨right|` of a [`DyadEnsemble`], referring to kets by pool index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadTerm<T> {
    pub weight: C<T>,
    pub left: usize,
    pub right: usize,
}

/// Low-rank operator `Σ w_k |L_k⟩⟨R_k|` that never materialises the dense matrix.
///
/// Kets live in a shared pool so a rank-2 channel with four dyads only stores two
/// kets, and a unitary applied to the ensemble touches each distinct ket once.
#[derive(Debug, Clone)]
pub struct DyadEnsemble<T> {
    spec: ModeSpec,
    kets: Vec<FockVector<T>>,
    terms: Vec<DyadTerm<T>>,
}

impl<T: Real> DyadEnsemble<T> {
    pub fn new(spec: ModeSpec) -> Self {
        Self {
            spec,
            kets: Vec::new(),
            terms: Vec::new(),
        }
    }

    /// `|ψ⟩⟨ψ|`
    pub fn pure(ket: FockVector<T>) -> Self {
        let mut e = Self::new(ket.spec());
        let k = e.kets.len();
        e.kets.push(ket);
        e.terms.push(DyadTerm {
            weight: Complex::new(T::one(), T::zero()),
            left: k,
            right: k,
        });
        e
    }

    pub fn push_ket(&mut self, ket: FockVector<T>) -> Result<usize> {
        if ket.spec() != self.spec {
            return Err(Error::ModeMismatch(
                "ket spec differs from ensemble spec".into(),
            ));
        }
        self.kets.push(ket);
        Ok(self.kets.len() - 1)
    }

    pub fn push_term(&mut self, weight: C<T>, left: usize, right: usize) -> Result<()> {
        if left >= self.kets.len() || right >= self.kets.len() {
            return Err(Error::InvalidParameter(format!(
                "dyad refers to ket {} but the pool holds {}",
                left.max(right),
                self.kets.len()
            )));
        }
        self.terms.push(DyadTerm {
            weight,
            left,
            right,
        });
        Ok(())
    }

    #[inline]
    pub fn spec(&self) -> ModeSpec {
        self.spec
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn kets(&self) -> &[FockVector<T>] {
        &self.kets
    }

    pub fn terms(&self) -> &[DyadTerm<T>] {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (C<T>, &FockVector<T>, &FockVector<T>)> + '_ {
        self.terms
            .iter()
            .map(move |t| (t.weight, &self.kets[t.left], &self.kets[t.right]))
    }

    pub fn trace(&self) -> C<T> {
        self.iter()
            .fold(C::zero(), |acc, (w, l, r)| acc + w * r.inner(l))
    }

    /// `⟨v|ρ|v⟩`
    pub fn expectation(&self, v: &FockVector<T>) -> C<T> {
        let overlaps: Vec<C<T>> = self.kets.iter().map(|k| v.inner(k)).collect();
        self.terms.iter().fold(C::zero(), |acc, t| {
            acc + t.weight * overlaps[t.left] * overlaps[t.right].conj()
        })
    }

    pub fn to_operator(&self) -> FockOperator<T> {
        let mut m = CMatrix::zeros(self.spec.dim(), self.spec.dim());
        for (w, l, r) in self.iter() {
            m.add_scaled_in_place(&l.outer(r), w);
        }
        FockOperator::from_matrix(self.spec, m).expect("dimension matches spec")
    }

    /// Applies `f` to every pooled ket (e.g. a unitary `U`), giving `U ρ U†`.
    pub fn map_kets(
        &self,
        mut f: impl FnMut(&FockVector<T>) -> Result<FockVector<T>>,
    ) -> Result<Self> {
        let kets = self.kets.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        let spec = kets.first().map_or(self.spec, |k| k.spec());
        Ok(Self {
            spec,
            kets,
            terms: self.terms.clone(),
        })
    }

    /// `|φ⟩⟨φ| ⊗ ρ`, with the modes of `phi` first.
    pub fn prepend_pure(&self, phi: &FockVector<T>) -> Result<Self> {
        self.map_kets(|k| phi.tensor(k))
    }

    /// Applies single-mode Kraus operators `{K_k}` to `mode`: `ρ → Σ_k K_k ρ K_k†`.
    ///
    /// Branches whose contribution bound `|w|·‖K L‖·‖K R‖` falls below `prune` are dropped.
    pub fn apply_kraus(&self, mode: usize, kraus: &[FockOperator<T>], prune: T) -> Result<Self> {
        let mut out = Self::new(self.spec);
        // pool index of K_k|ket_i⟩ is i * kraus.len() + k
        for ket in &self.kets {
            for k in kraus {
                out.kets.push(k.apply_to_modes(ket, &[mode])?);
            }
        }
        let norms: Vec<T> = out.kets.iter().map(|k| k.norm()).collect();
        let nk = kraus.len();
        for t in &self.terms {
            for k in 0..nk {
                let l = t.left * nk + k;
                let r = t.right * nk + k;
                if t.weight.norm() * norms[l] * norms[r] < prune {
                    continue;
                }
                out.terms.push(DyadTerm {
                    weight: t.weight,
                    left: l,
                    right: r,
                });
            }
        }
        out.compact();
        Ok(out)
    }

    /// Drops pooled kets no term refers to.
    fn compact(&mut self) {
        let mut remap = vec![usize::MAX; self.kets.len()];
        let mut kets = Vec::new();
        for t in &mut self.terms {
            for idx in [&mut t.left, &mut t.right] {
                if remap[*idx] == usize::MAX {
                    remap[*idx] = kets.len();
                    kets.push(self.kets[*idx].clone());
                }
                *idx = remap[*idx];
            }
        }
        self.kets = kets;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::optics::coherent_ket;
    use crate::scalar::cr;

    #[test]
    fn pure_ensemble_matches_projector() {
        let spec = ModeSpec::single(12).unwrap();
        let k = coherent_ket(0.8, spec).unwrap();
        let e = DyadEnsemble::pure(k.clone());
        let dense = FockOperator::projector(&k);
        assert!(e.to_operator().max_abs_diff(&dense) < 1e-15);
        assert!((e.trace() - cr(k.norm_sqr())).norm() < 1e-15);
        assert!((e.expectation(&k) - dense.expectation(&k)).norm() < 1e-15);
    }

    #[test]
    fn push_term_checks_pool_bounds() {
        let spec = ModeSpec::single(2).unwrap();
        let mut e = DyadEnsemble::<f64>::new(spec);
        assert!(e.push_term(cr(1.0), 0, 0).is_err());
        let i = e.push_ket(FockVector::vacuum(spec)).unwrap();
        assert!(e.push_term(cr(1.0), i, i).is_ok());
        assert!(e
            .push_ket(FockVector::vacuum(ModeSpec::single(3).unwrap()))
            .is_err());
    }
}

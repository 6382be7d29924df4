use crate::error::{Error, Result};

/// Tail mass the cutoff rule leaves above the highest retained Fock level.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Largest dense dimension a [`ModeSpec`] may describe.
const MAX_DIMENSION: usize = 1 << 32;

/// Uniformly truncated multimode Fock space.
///
/// Index convention: mixed-radix, row-major, mode 0 most significant. For two modes
/// with cutoff `N`, `|n_0, n_1⟩` lives at `n_0·(N+1) + n_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeSpec {
    mode_count: usize,
    cutoff: usize,
}

impl ModeSpec {
    pub fn new(mode_count: usize, cutoff: usize) -> Result<Self> {
        if mode_count == 0 {
            return Err(Error::InvalidParameter(
                "mode count must be positive".into(),
            ));
        }
        if cutoff == 0 {
            return Err(Error::InvalidParameter("cutoff must be at least 1".into()));
        }
        let overflow = Error::DimensionOverflow {
            cutoff,
            modes: mode_count,
        };
        let mut dim: usize = 1;
        for _ in 0..mode_count {
            dim = dim.checked_mul(cutoff + 1).ok_or(overflow.clone())?;
        }
        if dim > MAX_DIMENSION {
            return Err(overflow);
        }
        Ok(Self { mode_count, cutoff })
    }

    pub fn single(cutoff: usize) -> Result<Self> {
        Self::new(1, cutoff)
    }

    /// Smallest spec whose cutoff keeps the Poisson tail of amplitude `mu` below `tolerance`.
    pub fn for_amplitude(mode_count: usize, mu: f64, tolerance: f64) -> Result<Self> {
        Self::new(mode_count, cutoff_for_amplitude(mu, tolerance))
    }

    #[inline]
    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    #[inline]
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Levels per mode, `cutoff + 1`.
    #[inline]
    pub fn levels(&self) -> usize {
        self.cutoff + 1
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.levels().pow(self.mode_count as u32)
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![self.levels(); self.mode_count]
    }

    /// Same cutoff, different number of modes.
    pub fn with_modes(&self, mode_count: usize) -> Result<Self> {
        Self::new(mode_count, self.cutoff)
    }

    pub fn index(&self, occupations: &[usize]) -> usize {
        debug_assert_eq!(occupations.len(), self.mode_count);
        occupations.iter().fold(0, |acc, &n| {
            debug_assert!(n <= self.cutoff);
            acc * self.levels() + n
        })
    }

    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.mode_count];
        for slot in occ.iter_mut().rev() {
            *slot = index % self.levels();
            index /= self.levels();
        }
        occ
    }

    /// Occupation of a single mode at a flat index.
    #[inline]
    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        let shift = self.mode_count - 1 - mode;
        (index / self.levels().pow(shift as u32)) % self.levels()
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.mode_count {
            return Err(Error::ModeOutOfRange {
                mode,
                modes: self.mode_count,
            });
        }
        Ok(())
    }
}

/// `Σ_{n > cutoff} e^{-μ²} μ^{2n} / n!`
pub fn poisson_tail(mu: f64, cutoff: usize) -> f64 {
    let lambda = mu * mu;
    if lambda == 0.0 {
        return 0.0;
    }
    // log p_n for n = cutoff + 1, then walk upward until terms are negligible
    let n0 = cutoff + 1;
    let log_p = -lambda + n0 as f64 * lambda.ln() - ln_factorial(n0);
    let mut term = log_p.exp();
    let mut sum = 0.0;
    let mut n = n0;
    loop {
        sum += term;
        n += 1;
        term *= lambda / n as f64;
        if (n as f64 > lambda && term < sum * 1e-18) || term == 0.0 || n > n0 + 100_000 {
            break;
        }
    }
    sum
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Smallest cutoff `N ≥ 1` with `poisson_tail(mu, N) < tolerance`.
pub fn cutoff_for_amplitude(mu: f64, tolerance: f64) -> usize {
    let mut n = 1;
    while poisson_tail(mu, n) >= tolerance {
        n += 1;
    }
    n
}

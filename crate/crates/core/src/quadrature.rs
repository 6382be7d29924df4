//! Averages over the Bloch sphere: Gauss–Legendre in `cos u`, trapezoid in `v`.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_POLAR_NODES: usize = 32;
pub const DEFAULT_AZIMUTH_NODES: usize = 64;
pub const MIN_NODES: usize = 8;

/// Gauss–Legendre nodes and weights on `[−1, 1]`, nodes ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let pi = T::PI();
    let half = T::lit(0.5);
    let nn = T::from_usize_lossy(n);
    for i in 0..n.div_ceil(2) {
        let mut x = (pi * (T::from_usize_lossy(i) + T::lit(0.75)) / (nn + half)).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, T::zero());
    }
    for k in 2..=n {
        let k = T::from_usize_lossy(k);
        let p2 = ((T::lit(2.0) * k - T::one()) * x * p1 - (k - T::one()) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nn = T::from_usize_lossy(n);
    (p1, nn * (x * p1 - p0) / (x * x - T::one()))
}

/// Node counts for the sphere average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadratureSpec {
    n_polar: usize,
    n_azimuth: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            n_polar: DEFAULT_POLAR_NODES,
            n_azimuth: DEFAULT_AZIMUTH_NODES,
        }
    }
}

impl QuadratureSpec {
    pub fn new(n_polar: usize, n_azimuth: usize) -> Result<Self> {
        if n_polar < MIN_NODES || n_azimuth < MIN_NODES {
            return Err(Error::InvalidParameter(format!(
                "quadrature needs at least {MIN_NODES} nodes per axis, got {n_polar}x{n_azimuth}"
            )));
        }
        Ok(Self { n_polar, n_azimuth })
    }

    pub fn n_polar(&self) -> usize {
        self.n_polar
    }

    pub fn n_azimuth(&self) -> usize {
        self.n_azimuth
    }

    pub fn doubled(&self) -> Self {
        Self {
            n_polar: 2 * self.n_polar,
            n_azimuth: 2 * self.n_azimuth,
        }
    }

    /// Sample points `(u, v, weight)` with weights summing to 1.
    pub fn points<T: Real>(&self) -> Vec<(T, T, T)> {
        let (x, w) = gauss_legendre::<T>(self.n_polar);
        let m = T::from_usize_lossy(self.n_azimuth);
        let two_pi = T::PI() * T::lit(2.0);
        let mut out = Vec::with_capacity(self.n_polar * self.n_azimuth);
        for (xi, wi) in x.iter().zip(&w) {
            let u = xi.acos();
            let wu = *wi * T::lit(0.5) / m;
            for k in 0..self.n_azimuth {
                out.push((u, two_pi * T::from_usize_lossy(k) / m, wu));
            }
        }
        out
    }

    /// `(1/4π) ∫ sin u du ∫ dv f(u, v)` for each component of `f`.
    pub fn sphere_average<T: Real, const K: usize, E>(
        &self,
        mut f: impl FnMut(T, T) -> std::result::Result<[T; K], E>,
    ) -> std::result::Result<[T; K], E> {
        let mut acc = [T::zero(); K];
        for (u, v, w) in self.points::<T>() {
            let vals = f(u, v)?;
            for (a, x) in acc.iter_mut().zip(vals) {
                *a += w * x;
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre::<f64>(8);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // ∫ x^14 dx over [−1, 1] = 2/15, degree 14 ≤ 2·8 − 1
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((m - 2.0 / 15.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn odd_node_count_has_zero_node() {
        let (x, w) = gauss_legendre::<f64>(9);
        assert!(x[4].abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_average_of_cos_squared() {
        let q = QuadratureSpec::default();
        let [m] = q
            .sphere_average(|u: f64, v: f64| Ok::<_, ()>([u.cos().powi(2) + v.sin()]))
            .unwrap();
        assert!((m - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_too_few_nodes() {
        assert!(QuadratureSpec::new(4, 64).is_err());
        assert_eq!(
            QuadratureSpec::new(8, 8).unwrap().doubled(),
            QuadratureSpec::new(16, 16).unwrap()
        );
    }
}

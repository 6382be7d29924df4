//! Small dense complex matrices and a cyclic Jacobi eigensolver for Hermitian input.
//!
//! Layout is row-major. Multi-partite index helpers use mixed-radix ordering with
//! the first subsystem most significant, which is the convention the whole crate
//! (and its CSV goldens) is frozen to.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_rows(rows: &[&[T]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        Self::from_fn(n, m, |i, j| cr(rows[i][j]))
    }

    pub fn diagonal(entries: &[C<T>]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[C<T>], v: &[C<T>]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, v.len(), "mat-vec shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(C::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// `U · self · U†`
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn add_scaled_in_place(&mut self, other: &Self, s: C<T>) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).fold(C::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// `max |A - A†|`
    pub fn hermiticity_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut dev = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `⟨u|A|v⟩`
    pub fn sandwich(&self, u: &[C<T>], v: &[C<T>]) -> C<T> {
        let av = self.mul_vec(v);
        u.iter()
            .zip(&av)
            .fold(C::zero(), |acc, (a, b)| acc + a.conj() * b)
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Offsets contributed to the full mixed-radix index by every digit tuple of `subset`.
///
/// The subset is enumerated in its own mixed-radix order (first listed subsystem
/// most significant).
pub(crate) fn subsystem_offsets(dims: &[usize], subset: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let mut offsets = vec![0usize];
    for &mode in subset {
        let mut next = Vec::with_capacity(offsets.len() * dims[mode]);
        for &base in &offsets {
            for digit in 0..dims[mode] {
                next.push(base + digit * strides[mode]);
            }
        }
        offsets = next;
    }
    offsets
}

fn complement(n: usize, subset: &[usize]) -> Vec<usize> {
    (0..n).filter(|k| !subset.contains(k)).collect()
}

fn check_subsystems(dims: &[usize], subset: &[usize]) -> Result<()> {
    for (i, &m) in subset.iter().enumerate() {
        if m >= dims.len() {
            return Err(Error::ModeOutOfRange {
                mode: m,
                modes: dims.len(),
            });
        }
        if subset[..i].contains(&m) {
            return Err(Error::InvalidParameter(format!(
                "subsystem {m} listed twice"
            )));
        }
    }
    Ok(())
}

/// Trace out every subsystem not in `keep`. Kept subsystems retain their original order.
pub fn partial_trace<T: Real>(
    rho: &CMatrix<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<CMatrix<T>> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    check_subsystems(dims, keep)?;
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let traced = complement(dims.len(), &keep);
    let ko = subsystem_offsets(dims, &keep);
    let to = subsystem_offsets(dims, &traced);
    let mut out = CMatrix::zeros(ko.len(), ko.len());
    for (i, &oi) in ko.iter().enumerate() {
        for (j, &oj) in ko.iter().enumerate() {
            out[(i, j)] = to
                .iter()
                .fold(C::zero(), |acc, &ot| acc + rho[(oi + ot, oj + ot)]);
        }
    }
    Ok(out)
}

/// Transpose the indices of the listed subsystems. An involution, bit-exact.
pub fn partial_transpose<T: Real>(
    rho: &CMatrix<T>,
    dims: &[usize],
    transposed: &[usize],
) -> Result<CMatrix<T>> {
    if !rho.is_square() {
        return Err(Error::InvalidParameter(
            "partial transpose of a non-square matrix".into(),
        ));
    }
    check_subsystems(dims, transposed)?;
    let rest = complement(dims.len(), transposed);
    let to = subsystem_offsets(dims, transposed);
    let ro = subsystem_offsets(dims, &rest);
    let mut out = CMatrix::zeros(rho.rows(), rho.cols());
    for &ta in &to {
        for &tb in &to {
            for &ra in &ro {
                for &rb in &ro {
                    out[(ta + ra, tb + rb)] = rho[(tb + ra, ta + rb)];
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    /// Ascending.
    pub values: Vec<T>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMatrix<T>,
}

const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi diagonalisation of a Hermitian matrix.
///
/// Converges when the off-diagonal Frobenius norm drops below `1e-13 · max(1, ‖A‖_F)`
/// (or the scalar type's resolution, whichever is coarser).
pub fn hermitian_eigen<T: Real>(a: &CMatrix<T>) -> Result<HermitianEigen<T>> {
    if !a.is_square() {
        return Err(Error::InvalidParameter(
            "eigen-decomposition of a non-square matrix".into(),
        ));
    }
    let n = a.rows();
    let scale = a.frobenius_norm().max(T::one());
    let dev = a.hermiticity_deviation();
    if dev > T::tol(1e-10) * scale {
        return Err(Error::NotHermitian {
            deviation: dev.to_f64_lossy(),
        });
    }
    // symmetrise so that the rotations act on an exactly Hermitian matrix
    let mut m = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            cr(a[(i, i)].re)
        } else {
            (a[(i, j)] + a[(j, i)].conj()).scale(T::lit(0.5))
        }
    });
    let mut v = CMatrix::identity(n);
    let tol = T::tol(JACOBI_OFF_TOL) * scale;
    let half = T::lit(0.5);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let g = apq.norm();
                if g <= T::min_positive_value() {
                    continue;
                }
                let phase = apq.unscale(g);
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) * half / g;
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // J = [[c, s·e^{iφ}], [-s·e^{-iφ}, c]] on (p, q); A ← J† A J
                let jpq = phase.scale(s);
                let jqp = -phase.conj().scale(s);
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp.scale(c) + akq * jqp;
                    m[(k, q)] = akp * jpq + akq.scale(c);
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = apk.scale(c) + aqk * jqp.conj();
                    m[(q, k)] = apk * jpq.conj() + aqk.scale(c);
                }
                m[(p, q)] = C::zero();
                m[(q, p)] = C::zero();
                m[(p, p)] = cr(m[(p, p)].re);
                m[(q, q)] = cr(m[(q, q)].re);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp.scale(c) + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq.scale(c);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[(i, i)]
            .re
            .partial_cmp(&m[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

pub fn hermitian_eigenvalues<T: Real>(a: &CMatrix<T>) -> Result<Vec<T>> {
    hermitian_eigen(a).map(|e| e.values)
}

fn off_diagonal_norm<T: Real>(m: &CMatrix<T>) -> T {
    let mut acc = T::zero();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

#[inline]
pub(crate) fn inner<T: Real>(u: &[C<T>], v: &[C<T>]) -> C<T> {
    u.iter()
        .zip(v)
        .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn jacobi_reconstructs_hermitian_matrix() {
        let a = CMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                c(i as f64 + 0.5, 0.0)
            } else if i < j {
                c(0.3 * (i + j) as f64, 0.1 * (j as f64 - i as f64))
            } else {
                c(0.3 * (i + j) as f64, -0.1 * (i as f64 - j as f64))
            }
        });
        let e = hermitian_eigen(&a).unwrap();
        let lam = CMatrix::diagonal(&e.values.iter().map(|&x| cr(x)).collect::<Vec<_>>());
        let back = e.vectors.matmul(&lam).matmul(&e.vectors.adjoint());
        assert!(back.max_abs_diff(&a) < 1e-12);
        let vv = e.vectors.adjoint().matmul(&e.vectors);
        assert!(vv.max_abs_diff(&CMatrix::identity(4)) < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn jacobi_pauli_y() {
        let y = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c(0.0, -1.0),
            (1, 0) => c(0.0, 1.0),
            _ => c(0.0, 0.0),
        });
        let vals = hermitian_eigenvalues(&y).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_rejects_non_hermitian() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(
            hermitian_eigen(&a),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn jacobi_works_in_f32() {
        let a: CMatrix<f32> = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let vals = hermitian_eigenvalues(&a).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-5 && (vals[1] - 3.0).abs() < 1e-5);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = CMatrix::from_real_rows(&[&[0.25, 0.1], &[0.1, 0.75]]);
        let b = CMatrix::from_real_rows(&[&[0.5, 0.0, 0.0], &[0.0, 0.3, 0.0], &[0.0, 0.0, 0.2]]);
        let ab = a.kron(&b);
        let ra = partial_trace(&ab, &[2, 3], &[0]).unwrap();
        let rb = partial_trace(&ab, &[2, 3], &[1]).unwrap();
        assert!(ra.max_abs_diff(&a) < 1e-15);
        assert!(rb.max_abs_diff(&b) < 1e-15);
        assert_eq!(partial_trace(&ab, &[2, 3], &[]), Err(Error::EmptyKeep));
    }

    #[test]
    fn partial_transpose_swaps_block_indices() {
        // |01⟩⟨10| on two qubits → |00⟩⟨11|
        let mut m = CMatrix::<f64>::zeros(4, 4);
        m[(1, 2)] = c(1.0, 0.0);
        let pt = partial_transpose(&m, &[2, 2], &[1]).unwrap();
        assert_eq!(pt[(0, 3)], c(1.0, 0.0));
        assert_eq!(pt.as_slice().iter().filter(|z| !z.is_zero()).count(), 1);
    }
}

use num_traits::{Float, Zero};
use std::ops::{Index, IndexMut};

use super::ad::Number;
use super::MAX_DIM;
use crate::{Error, Real, Result};

/// Symmetric matrix stored as its packed upper triangle, so
/// `get(i, j) == get(j, i)` holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

#[inline]
/// Position of entry `(i, j)` in packed upper-triangular storage.
pub fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (r, c) = if i <= j { (i, j) } else { (j, i) };
    r * n - r * (r + 1) / 2 + c
}

impl<T: Real> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= MAX_DIM, "dimension {n} exceeds {MAX_DIM}");
        Self {
            n,
            data: vec![T::zero(); n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![T::one(); n])
    }

    pub fn from_diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from `f(i, j)`, evaluated for `i <= j` only.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Symmetrizes a dense square matrix as `(A + A^T) / 2`.
    pub fn from_dense(a: &Mat<T>) -> Self {
        assert_eq!(a.rows(), a.cols());
        let half = T::lit(0.5);
        Self::from_fn(a.rows(), |i, j| (a[(i, j)] + a[(j, i)]) * half)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[packed_index(self.n, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let k = packed_index(self.n, i, j);
        self.data[k] = v;
    }

    pub fn to_dense(&self) -> Mat<T> {
        Mat::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `u^T A v`.
    pub fn bilinear(&self, u: &[T], v: &[T]) -> T {
        let mut s = T::zero();
        for i in 0..self.n {
            if u[i] == T::zero() {
                continue;
            }
            for j in 0..self.n {
                s = s + u[i] * self.get(i, j) * v[j];
            }
        }
        s
    }

    pub fn quad(&self, v: &[T]) -> T {
        self.bilinear(v, v)
    }

    /// `S^T A S` for a (possibly rectangular) `S`.
    pub fn congruence(&self, s: &Mat<T>) -> Self {
        assert_eq!(s.rows(), self.n);
        let a = self.to_dense();
        let t = s.transpose().matmul(&a).matmul(s);
        Self::from_dense(&t)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn frobenius(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                s = s + v * v;
            }
        }
        s.sqrt()
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// Dense row-major matrix over any [`Number`] (plain scalars or jets).
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<N> {
    rows: usize,
    cols: usize,
    data: Vec<N>,
}

impl<N: Clone> Mat<N> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> N) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<N>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Self::from_fn(r, c, |i, j| rows[i][j].clone())
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<N>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        Self::from_fn(r, c, |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn column(&self, j: usize) -> Vec<N> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<N> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn map<M: Clone>(&self, f: impl Fn(&N) -> M) -> Mat<M> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<N: Number> Mat<N> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| N::cst(0.0))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { N::cst(1.0) } else { N::cst(0.0) })
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matmul shape mismatch");
        Self::from_fn(self.rows, o.cols, |i, j| {
            let mut s = N::cst(0.0);
            for k in 0..self.cols {
                s = s + self[(i, k)].clone() * o[(k, j)].clone();
            }
            s
        })
    }

    pub fn matvec(&self, v: &[N]) -> Vec<N> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = N::cst(0.0);
                for k in 0..self.cols {
                    s = s + self[(i, k)].clone() * v[k].clone();
                }
                s
            })
            .collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + o[(i, j)].clone()
        })
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - o[(i, j)].clone()
        })
    }

    pub fn scale(&self, c: &N) -> Self {
        self.map(|x| x.clone() * c.clone())
    }
}

impl<N> Index<(usize, usize)> for Mat<N> {
    type Output = N;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &N {
        &self.data[i * self.cols + j]
    }
}

impl<N> IndexMut<(usize, usize)> for Mat<N> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut N {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular Cholesky factor `L` with `G = L L^T`.
pub fn cholesky<T: Real>(g: &SymMatrix<T>) -> Result<Mat<T>> {
    let n = g.dim();
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = g.get(j, j);
        for k in 0..j {
            d = d - l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = g.get(i, j);
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting on the
/// value part. Works for jets as well as plain scalars.
pub fn solve<N: Number>(a: &Mat<N>, b: &Mat<N>) -> Result<Mat<N>> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.rows(),
        });
    }
    let m = b.cols();
    let mut a = a.clone();
    let mut x = b.clone();
    // rows scaled to unit max norm, so badly scaled but regular systems
    // (a warped fiber block of size 1e-28) are not mistaken for singular ones
    for r in 0..n {
        let s = (0..n).fold(N::Scalar::zero(), |acc, j| acc.max(a[(r, j)].value().abs()));
        if !(s > N::Scalar::zero()) || !s.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let inv = s.recip();
        for j in 0..n {
            a[(r, j)] = a[(r, j)].scale(inv);
        }
        for j in 0..m {
            x[(r, j)] = x[(r, j)].scale(inv);
        }
    }
    let tiny = N::Scalar::epsilon() * N::Scalar::lit(16.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&p, &q| {
                a[(p, col)]
                    .value()
                    .abs()
                    .partial_cmp(&a[(q, col)].value().abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if !(a[(piv, col)].value().abs() > tiny) {
            return Err(Error::NotPositiveDefinite);
        }
        if piv != col {
            for j in 0..n {
                let t = a[(col, j)].clone();
                a[(col, j)] = a[(piv, j)].clone();
                a[(piv, j)] = t;
            }
            for j in 0..m {
                let t = x[(col, j)].clone();
                x[(col, j)] = x[(piv, j)].clone();
                x[(piv, j)] = t;
            }
        }
        let p = a[(col, col)].clone();
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[(r, col)].clone() / p.clone();
            for j in col..n {
                a[(r, j)] = a[(r, j)].clone() - f.clone() * a[(col, j)].clone();
            }
            for j in 0..m {
                x[(r, j)] = x[(r, j)].clone() - f.clone() * x[(col, j)].clone();
            }
        }
    }
    for r in 0..n {
        let p = a[(r, r)].clone();
        for j in 0..m {
            x[(r, j)] = x[(r, j)].clone() / p.clone();
        }
    }
    Ok(x)
}

pub fn invert<N: Number>(a: &Mat<N>) -> Result<Mat<N>> {
    solve(a, &Mat::identity(a.rows()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_badly_scaled() {
        let a = Mat::from_rows(&[vec![1.0, 0.0], vec![0.0, 1e-28]]);
        let x = solve(&a, &Mat::identity(2)).unwrap();
        assert!((x[(1, 1)] - 1e28).abs() < 1e13);
        let sing = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert_eq!(solve(&sing, &Mat::identity(2)), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn packed_storage_is_symmetric() {
        let mut m = SymMatrix::<f64>::zeros(3);
        m.set(2, 0, 4.0);
        assert_eq!(m.get(0, 2), 4.0);
        assert_eq!(m.get(2, 0), 4.0);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = SymMatrix::from_diag(&[1.0, -1.0]);
        assert_eq!(cholesky(&m), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn solve_recovers_inverse() {
        let a = Mat::from_rows(&[vec![4.0, 1.0, 0.5], vec![1.0, 3.0, 0.2], vec![0.1, 0.2, 2.0]]);
        let inv = invert(&a).unwrap();
        let id = a.matmul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - e).abs() < 1e-14);
            }
        }
    }
}

//! Small dense matrices with a one-sided Jacobi SVD.
//!
//! Everything in this crate works on matrices of single- to low-double-digit
//! dimension, so a plain row-major buffer and an O(n^3)-per-sweep Jacobi
//! iteration are exact enough (machine-precision singular values) and keep
//! the core generic over the scalar type.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::InvalidSpec("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(entries: &[T]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &x)| a * x).sum())
            .collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.sub(&other.scale(-T::one()))
    }

    pub fn scale(&self, c: T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * c).collect(),
        }
    }

    /// Scale row i by d[i].
    pub fn scale_rows(&self, d: &[T]) -> Result<Self> {
        if d.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: d.len(),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| d[i] * self[(i, j)]))
    }

    /// Scale column j by d[j].
    pub fn scale_cols(&self, d: &[T]) -> Result<Self> {
        if d.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: d.len(),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * d[j]))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&a| a * a).sum::<T>().sqrt()
    }

    /// Singular values in descending order; min(rows, cols) of them.
    pub fn singular_values(&self) -> Vec<T> {
        self.svd().sigma
    }

    /// Largest singular value (Euclidean operator norm).
    pub fn op_norm_euclid(&self) -> T {
        self.singular_values().first().copied().unwrap_or_else(T::zero)
    }

    /// Full thin SVD, self = U diag(sigma) V^T.
    pub fn svd(&self) -> Svd<T> {
        if self.rows < self.cols {
            let t = self.transpose().svd();
            return Svd {
                u: t.v,
                sigma: t.sigma,
                v: t.u,
            };
        }
        jacobi_svd_tall(self)
    }

    /// Moore–Penrose pseudoinverse with relative rank cutoff `rtol`.
    pub fn pinv(&self, rtol: T) -> Self {
        let Svd { u, sigma, v } = self.svd();
        let smax = sigma.first().copied().unwrap_or_else(T::zero);
        let cutoff = rtol * smax;
        let inv: Vec<T> = sigma
            .iter()
            .map(|&s| if s > cutoff { T::one() / s } else { T::zero() })
            .collect();
        // pinv = V diag(inv) U^T
        let vs = v.scale_cols(&inv).expect("diag size");
        vs.matmul(&u.transpose()).expect("svd shapes")
    }

    /// Inverse of a square matrix; errors when below the rank threshold.
    pub fn inverse(&self, rtol: T) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let sv = self.singular_values();
        let smax = sv.first().copied().unwrap_or_else(T::zero);
        let smin = sv.last().copied().unwrap_or_else(T::zero);
        if smax == T::zero() || smin <= rtol * smax {
            return Err(Error::SingularMatrix);
        }
        Ok(self.pinv(rtol))
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Matrix<T>,
    /// Descending, min(rows, cols) values.
    pub sigma: Vec<T>,
    pub v: Matrix<T>,
}

/// One-sided Jacobi on a tall (rows >= cols) matrix: rotate column pairs
/// until all are mutually orthogonal, then read off sigma as column norms.
fn jacobi_svd_tall<T: Scalar>(a: &Matrix<T>) -> Svd<T> {
    let m = a.rows();
    let n = a.cols();
    debug_assert!(m >= n);
    let mut b = a.clone();
    let mut v = Matrix::identity(n);
    let eps = T::epsilon();
    let max_sweeps = 64;

    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let mut app = T::zero();
                let mut aqq = T::zero();
                let mut apq = T::zero();
                for i in 0..m {
                    let bp = b[(i, p)];
                    let bq = b[(i, q)];
                    app = app + bp * bp;
                    aqq = aqq + bq * bq;
                    apq = apq + bp * bq;
                }
                if app == T::zero() || aqq == T::zero() {
                    continue;
                }
                if apq.abs() <= eps * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (apq + apq);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let bp = b[(i, p)];
                    let bq = b[(i, q)];
                    b[(i, p)] = c * bp - s * bq;
                    b[(i, q)] = s * bp + c * bq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<T> = (0..n)
        .map(|j| (0..m).map(|i| b[(i, j)] * b[(i, j)]).sum::<T>().sqrt())
        .collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());

    let mut sigma = Vec::with_capacity(n);
    let mut u = Matrix::zeros(m, n);
    let mut vs = Matrix::zeros(n, n);
    for (jj, &j) in order.iter().enumerate() {
        let s = norms[j];
        sigma.push(s);
        if s > T::zero() {
            for i in 0..m {
                u[(i, jj)] = b[(i, j)] / s;
            }
        }
        for i in 0..n {
            vs[(i, jj)] = v[(i, j)];
        }
    }
    Svd { u, sigma, v: vs }
}

//! Small dense square matrices.
//!
//! Determinants and inverses are generic over any ordered field so the same
//! elimination code runs on floats and on exact rationals.

use std::ops::{Index, IndexMut};

use num_traits::{Num, Signed};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Ordered field usable by the elimination routines.
pub trait Field: Clone + Num + Signed + PartialOrd {}
impl<T: Clone + Num + Signed + PartialOrd> Field for T {}

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Field> Matrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn from_row_major(dim: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::InvalidModel(format!(
                "matrix of dimension {dim} needs {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidModel("matrix rows must form a square".into()));
        }
        Ok(Self {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row_major(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)].clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * rhs[(k, j)].clone();
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    /// Principal submatrix on the given (row = column) indices, in the given order.
    pub fn principal(&self, indices: &[usize]) -> Self {
        let k = indices.len();
        let mut out = Self::zeros(k);
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Relabels rows and columns: `out[(p[i], p[j])] = self[(i, j)]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.dim);
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(perm[i], perm[j])] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn is_symmetric_within(&self, tol: &T) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| (self[(i, j)].clone() - self[(j, i)].clone()).abs() <= *tol))
    }

    /// Determinant by Gaussian elimination with partial pivoting on the
    /// largest-magnitude entry. The empty matrix has determinant 1.
    pub fn determinant(&self) -> T {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = T::one();
        for col in 0..n {
            let mut pivot = col;
            for row in col + 1..n {
                if a[row * n + col].abs() > a[pivot * n + col].abs() {
                    pivot = row;
                }
            }
            if a[pivot * n + col].is_zero() {
                return T::zero();
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col].clone();
            det = det * p.clone();
            for row in col + 1..n {
                let factor = a[row * n + col].clone() / p.clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j].clone();
                    a[row * n + j] = a[row * n + j].clone() - factor.clone() * v;
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.dim;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let mut pivot = col;
            for row in col + 1..n {
                if a[(row, col)].abs() > a[(pivot, col)].abs() {
                    pivot = row;
                }
            }
            if a[(pivot, col)].is_zero() {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot * n + j);
                    inv.data.swap(col * n + j, pivot * n + j);
                }
            }
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = a[(col, j)].clone() / p.clone();
                inv[(col, j)] = inv[(col, j)].clone() / p.clone();
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a[(row, col)].clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let av = a[(col, j)].clone();
                    let iv = inv[(col, j)].clone();
                    a[(row, j)] = a[(row, j)].clone() - factor.clone() * av;
                    inv[(row, j)] = inv[(row, j)].clone() - factor.clone() * iv;
                }
            }
        }
        Some(inv)
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.dim + j]
    }
}

/// Eigenvalues of a symmetric matrix, ascending, computed in `f64`.
pub fn symmetric_eigenvalues<S: Scalar>(m: &Matrix<S>) -> Vec<f64> {
    let n = m.dim();
    if n == 0 {
        return Vec::new();
    }
    let dm = nalgebra::DMatrix::<f64>::from_fn(n, n, |i, j| m[(i, j)].as_f64());
    let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(dm).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_determinant_is_one() {
        assert_eq!(Matrix::<f64>::zeros(0).determinant(), 1.0);
    }

    #[test]
    fn determinant_with_pivoting() {
        let m = Matrix::from_rows(vec![vec![0.0, 2.0], vec![3.0, 1.0]]).unwrap();
        assert!((m.determinant() + 6.0).abs() < 1e-15);
        let s = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(s.determinant(), 0.0);
    }

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_rows(vec![vec![4.0, 1.0, 0.5], vec![1.0, 3.0, 0.25], vec![0.5, 0.25, 2.0]]).unwrap();
        let inv = m.inverse().unwrap();
        let id = m.mul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - want).abs() < 1e-14);
            }
        }
        assert!(Matrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]])
            .unwrap()
            .inverse()
            .is_none());
    }

    #[test]
    fn principal_and_permuted() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0, 3.0], vec![2.0, 5.0, 6.0], vec![3.0, 6.0, 9.0]]).unwrap();
        let p = m.principal(&[0, 2]);
        assert_eq!(p.row_major(), &[1.0, 3.0, 3.0, 9.0]);
        let q = m.permuted(&[1, 2, 0]);
        assert_eq!(q[(1, 1)], 1.0);
        assert_eq!(q[(2, 0)], 6.0);
    }

    #[test]
    fn eigenvalues_of_two_by_two() {
        let m = Matrix::from_rows(vec![vec![0.5, 0.25], vec![0.25, 0.5]]).unwrap();
        let ev = symmetric_eigenvalues(&m);
        assert!((ev[0] - 0.25).abs() < 1e-14 && (ev[1] - 0.75).abs() < 1e-14);
    }
}

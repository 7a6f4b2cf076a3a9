//! Square matrices as order-2 tensors.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

/// An order-2 [`Tensor`]. Converts to and from a tensor without copying.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S>(Tensor<S>);

impl<S: Scalar> Matrix<S> {
    /// Row-major `n x n` data.
    pub fn from_vec(n: usize, data: Vec<S>) -> Result<Self> {
        Tensor::from_vec(2, n, data).map(Matrix)
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::LengthMismatch { expected: n, got: bad.len() });
        }
        Self::from_vec(n, rows.concat())
    }

    pub fn zeros(n: usize) -> Self {
        Matrix(Tensor::zeros(2, n).expect("matrix size within limit"))
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![S::one(); n])
    }

    pub fn diagonal(d: &[S]) -> Self {
        let n = d.len();
        let mut data = vec![S::zero(); n * n];
        for (i, v) in d.iter().enumerate() {
            data[i * n + i] = v.clone();
        }
        Matrix(Tensor::from_vec(2, n, data).expect("matrix size within limit"))
    }

    pub fn n(&self) -> usize {
        self.0.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.0.as_slice()[i * self.n() + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        let n = self.n();
        &self.0.as_slice()[i * n..(i + 1) * n]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.n()).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn as_slice(&self) -> &[S] {
        self.0.as_slice()
    }

    pub fn as_tensor(&self) -> &Tensor<S> {
        &self.0
    }

    pub fn into_tensor(self) -> Tensor<S> {
        self.0
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        (0..self.n()).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n();
        let data = (0..n * n).map(|k| self.get(k % n, k / n).clone()).collect();
        Matrix(Tensor::from_vec(2, n, data).expect("same size"))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let n = self.n();
        if other.n() != n {
            return Err(Error::DimensionMismatch { left: n, right: other.n() });
        }
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = S::zero();
                for k in 0..n {
                    acc = acc + self.get(i, k).clone() * other.get(k, j).clone();
                }
                data.push(acc);
            }
        }
        Self::from_vec(n, data)
    }

    pub fn approx_eq(&self, other: &Self, tol: S::Real) -> bool {
        self.0.approx_eq(&other.0, tol)
    }

    fn nonzeros_per_line(&self, eps: S::Real, by_row: bool) -> Vec<usize> {
        let n = self.n();
        let mut counts = vec![0; n];
        for i in 0..n {
            for j in 0..n {
                if self.get(i, j).modulus() > eps {
                    counts[if by_row { i } else { j }] += 1;
                }
            }
        }
        counts
    }

    /// Exactly one entry equal to 1 in every row and column, zeros elsewhere.
    pub fn is_permutation(&self) -> bool {
        let zero = S::Real::zero();
        self.as_slice().iter().all(|v| v.is_zero() || v.is_one())
            && self.nonzeros_per_line(zero, true).iter().all(|&c| c == 1)
            && self.nonzeros_per_line(zero, false).iter().all(|&c| c == 1)
    }

    /// No entry off the main diagonal has magnitude above `eps`.
    pub fn is_diagonal_matrix(&self, eps: S::Real) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| i == j || self.get(i, j).modulus() <= eps))
    }

    /// Exactly one entry above `eps` in every row and every column (the
    /// zero pattern of some permutation matrix).
    pub fn is_generalized_permutation(&self, eps: S::Real) -> bool {
        self.nonzeros_per_line(eps, true).iter().all(|&c| c == 1)
            && self.nonzeros_per_line(eps, false).iter().all(|&c| c == 1)
    }

    /// Gaussian elimination with partial pivoting; singular when a pivot
    /// falls to `eps` times the largest entry or below.
    pub fn is_invertible(&self, eps: S::Real) -> bool {
        let n = self.n();
        let scale = self.0.max_modulus();
        if scale.is_zero() {
            return false;
        }
        let threshold = eps * scale;
        let mut a = self.rows();
        for col in 0..n {
            let (pivot, best) = (col..n).map(|r| (r, a[r][col].modulus())).fold((col, S::Real::zero()), |acc, x| {
                if x.1 > acc.1 {
                    x
                } else {
                    acc
                }
            });
            if best <= threshold {
                return false;
            }
            a.swap(col, pivot);
            for r in col + 1..n {
                let factor = a[r][col].clone() / a[col][col].clone();
                for c in col..n {
                    let t = a[col][c].clone() * factor.clone();
                    a[r][c] = a[r][c].clone() - t;
                }
            }
        }
        true
    }
}

impl<S: Scalar> TryFrom<Tensor<S>> for Matrix<S> {
    type Error = Error;

    fn try_from(t: Tensor<S>) -> Result<Self> {
        if t.order() != 2 {
            return Err(Error::InvalidOrder { order: t.order(), reason: "a matrix has order 2" });
        }
        Ok(Matrix(t))
    }
}

//! Dense order-m, dimension-n tensors.
//!
//! Entries are stored row-major with the first index most significant, so
//! the offset of `(i_1, ..., i_m)` is `sum_k i_k * n^(m-k)`. Indices are
//! 0-based in the API; file formats and reports use 1-based indices.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_traits::{Float, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{scaled_distance, Real, Scalar};

/// Default cap on `dim^order`.
pub const DEFAULT_MAX_ENTRIES: usize = 100_000_000;

static MAX_ENTRIES: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_ENTRIES);

/// Changes the process-wide entry-count limit for new tensors.
pub fn set_max_entries(limit: usize) {
    MAX_ENTRIES.store(limit, Ordering::Relaxed);
}

pub fn max_entries() -> usize {
    MAX_ENTRIES.load(Ordering::Relaxed)
}

/// Number of entries of an order-`order`, dimension-`dim` tensor, checked
/// against the configured limit.
pub fn entry_count(order: usize, dim: usize) -> Result<usize> {
    if order == 0 {
        return Err(Error::InvalidOrder { order, reason: "order must be at least 1" });
    }
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let limit = max_entries();
    let mut count: usize = 1;
    for _ in 0..order {
        count = match count.checked_mul(dim) {
            Some(c) if c <= limit => c,
            _ => return Err(Error::TooLarge { order, dim, limit }),
        };
    }
    Ok(count)
}

/// A tuple of `m - 1` trailing indices, each in `[0, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(components: Vec<usize>, dim: usize) -> Result<Self> {
        if components.iter().any(|&c| c >= dim) {
            return Err(Error::IndexOutOfRange { index: components, dim });
        }
        Ok(MultiIndex(components))
    }

    pub fn from_one_based(components: &[usize], dim: usize) -> Result<Self> {
        if components.iter().any(|&c| c == 0 || c > dim) {
            return Err(Error::IndexOutOfRange { index: components.to_vec(), dim });
        }
        Ok(MultiIndex(components.iter().map(|c| c - 1).collect()))
    }

    pub fn components(&self) -> &[usize] {
        &self.0
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|c| c + 1).collect()
    }

    /// True when all components coincide (the `j ... j` slices).
    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }
}

/// Row-major iterator over all multi-indices of `[0, dim)^len`.
#[derive(Clone, Debug)]
pub struct Indices {
    current: Vec<usize>,
    dim: usize,
    done: bool,
}

impl Indices {
    pub fn new(len: usize, dim: usize) -> Self {
        Indices { current: vec![0; len], dim, done: dim == 0 }
    }
}

impl Iterator for Indices {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        // odometer increment, last index fastest
        let mut k = self.current.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.current[k] += 1;
            if self.current[k] < self.dim {
                break;
            }
            self.current[k] = 0;
        }
        Some(out)
    }
}

/// Dense tensor of order `m >= 1` and dimension `n >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<S> {
    order: usize,
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> Tensor<S> {
    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let len = entry_count(order, dim)?;
        Ok(Tensor { order, dim, data: vec![S::zero(); len] })
    }

    pub fn from_vec(order: usize, dim: usize, data: Vec<S>) -> Result<Self> {
        let len = entry_count(order, dim)?;
        if data.len() != len {
            return Err(Error::LengthMismatch { expected: len, got: data.len() });
        }
        Ok(Tensor { order, dim, data })
    }

    /// Builds a tensor by evaluating `f` at every multi-index in row-major order.
    pub fn from_fn(order: usize, dim: usize, mut f: impl FnMut(&[usize]) -> S) -> Result<Self> {
        entry_count(order, dim)?;
        let data = Indices::new(order, dim).map(|idx| f(&idx)).collect();
        Ok(Tensor { order, dim, data })
    }

    /// Builds a tensor from `(index, value)` pairs; unlisted entries are zero.
    /// Later duplicates overwrite earlier ones.
    pub fn from_entries<'a, I>(order: usize, dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [usize], S)>,
    {
        let mut t = Self::zeros(order, dim)?;
        for (idx, value) in entries {
            let off = t.checked_offset(idx)?;
            t.data[off] = value;
        }
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<S> {
        self.data
    }

    /// Linear offset of a 0-based multi-index. Panics on a wrong length.
    pub fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.order, "multi-index length must equal the order");
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn checked_offset(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.order || idx.iter().any(|&i| i >= self.dim) {
            return Err(Error::IndexOutOfRange { index: idx.to_vec(), dim: self.dim });
        }
        Ok(self.offset(idx))
    }

    /// Inverse of [`Tensor::offset`].
    pub fn multi_index(&self, mut offset: usize) -> Vec<usize> {
        let mut idx = vec![0; self.order];
        for slot in idx.iter_mut().rev() {
            *slot = offset % self.dim;
            offset /= self.dim;
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        &self.data[self.offset(idx)]
    }

    /// Row-major iterator over all multi-indices.
    pub fn indices(&self) -> Indices {
        Indices::new(self.order, self.dim)
    }

    /// Entry `a_{i, alpha}` with `alpha` a trailing multi-index.
    pub fn slice_entry(&self, i: usize, alpha: &MultiIndex) -> &S {
        let off = alpha.components().iter().fold(i, |acc, &c| acc * self.dim + c);
        &self.data[off]
    }

    pub fn map<T: Scalar>(&self, f: impl FnMut(&S) -> T) -> Tensor<T> {
        Tensor { order: self.order, dim: self.dim, data: self.data.iter().map(f).collect() }
    }

    /// Iterator over `(offset, value)` of exactly-nonzero entries.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, &S)> + '_ {
        self.data.iter().enumerate().filter(|(_, v)| !v.is_zero())
    }

    /// Rounds entries with magnitude below `eps` to exact zero.
    pub fn clean(&self, eps: S::Real) -> Self {
        self.map(|v| if v.modulus() < eps { S::zero() } else { v.clone() })
    }

    /// Largest entry magnitude.
    pub fn max_modulus(&self) -> S::Real {
        self.data.iter().map(Scalar::modulus).fold(S::Real::zero(), Float::max)
    }

    /// `max |a - b|` over entries. Shapes must agree.
    pub fn max_abs_diff(&self, other: &Self) -> Result<S::Real> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.clone() - b.clone()).modulus())
            .fold(S::Real::zero(), Float::max))
    }

    /// `max |a - b| / max(1, |b|)` over entries, with `other` as reference.
    pub fn max_scaled_diff(&self, other: &Self) -> Result<S::Real> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| scaled_distance(a, b)).fold(S::Real::zero(), Float::max))
    }

    /// Relative error on the nonzero entries of `reference` and absolute
    /// error on its zero entries.
    pub fn max_relative_diff(&self, reference: &Self) -> Result<S::Real> {
        self.check_same_shape(reference)?;
        Ok(self
            .data
            .iter()
            .zip(&reference.data)
            .map(|(a, b)| {
                let diff = (a.clone() - b.clone()).modulus();
                if b.is_zero() {
                    diff
                } else {
                    diff / b.modulus()
                }
            })
            .fold(S::Real::zero(), Float::max))
    }

    pub fn approx_eq(&self, other: &Self, tol: S::Real) -> bool {
        self.max_scaled_diff(other).map(|d| d <= tol).unwrap_or(false)
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::InvalidOrder { order: other.order, reason: "orders differ" });
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(Tensor { order: self.order, dim: self.dim, data })
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|v| v.clone() * c.clone())
    }
}

/// The unit tensor: 1 where all indices coincide, 0 elsewhere.
pub fn unit_tensor<S: Scalar>(order: usize, dim: usize) -> Result<Tensor<S>> {
    let mut t = Tensor::zeros(order, dim)?;
    // offset of (i, i, ..., i) is i * (1 + n + ... + n^(m-1))
    let stride = (0..order).fold(0usize, |acc, _| acc * dim + 1);
    for i in 0..dim {
        t.data[i * stride] = S::one();
    }
    Ok(t)
}

/// The n x n matrix with entries `a_{i j ... j}`.
pub fn majorization_matrix<S: Scalar>(a: &Tensor<S>) -> Result<Matrix<S>> {
    if a.order < 2 {
        return Err(Error::InvalidOrder { order: a.order, reason: "majorization matrix needs order >= 2" });
    }
    let n = a.dim;
    let tail = vec![0usize; a.order - 1];
    let mut rows = Vec::with_capacity(n * n);
    let mut idx = Vec::with_capacity(a.order);
    for i in 0..n {
        for j in 0..n {
            idx.clear();
            idx.push(i);
            idx.extend(tail.iter().map(|_| j));
            rows.push(a.get(&idx).clone());
        }
    }
    Matrix::from_vec(n, rows)
}

/// 0/1 tensor marking exactly-nonzero entries.
pub fn zero_pattern<S: Scalar>(a: &Tensor<S>) -> Tensor<S> {
    a.map(|v| if v.is_zero() { S::zero() } else { S::one() })
}

/// Number of exactly-nonzero entries.
pub fn nnz<S: Scalar>(a: &Tensor<S>) -> usize {
    a.data.iter().filter(|v| !v.is_zero()).count()
}

fn all_zero_where<S: Scalar>(a: &Tensor<S>, pred: impl Fn(&[usize]) -> bool) -> bool {
    a.nonzeros().all(|(off, _)| !pred(&a.multi_index(off)))
}

/// Only `(i, i, ..., i)` entries may be nonzero.
pub fn is_diagonal<S: Scalar>(a: &Tensor<S>) -> bool {
    all_zero_where(a, |idx| idx[1..].iter().any(|&k| k != idx[0]))
}

/// Entries with `min(i_2, ..., i_m) < i_1` vanish.
pub fn is_upper_triangular<S: Scalar>(a: &Tensor<S>) -> bool {
    all_zero_where(a, |idx| idx[1..].iter().any(|&k| k < idx[0]))
}

/// Entries with `max(i_2, ..., i_m) > i_1` vanish.
pub fn is_lower_triangular<S: Scalar>(a: &Tensor<S>) -> bool {
    all_zero_where(a, |idx| idx[1..].iter().any(|&k| k > idx[0]))
}

/// Default magnitude below which computed entries are treated as zero.
pub const DEFAULT_CLEAN_EPS: f64 = 1e-12;

/// [`Tensor::clean`] at [`DEFAULT_CLEAN_EPS`].
pub fn clean<S: Scalar>(a: &Tensor<S>) -> Tensor<S> {
    a.clean(S::Real::lit(DEFAULT_CLEAN_EPS))
}

impl<S: Scalar> From<Matrix<S>> for Tensor<S> {
    fn from(m: Matrix<S>) -> Self {
        m.into_tensor()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn single(order: usize, dim: usize, idx1: &[usize], v: f64) -> Tensor<f64> {
        let idx: Vec<usize> = idx1.iter().map(|i| i - 1).collect();
        Tensor::from_entries(order, dim, [(idx.as_slice(), v)]).unwrap()
    }

    #[test]
    fn unit_tensor_nonzeros() {
        let t: Tensor<f64> = unit_tensor(3, 2).unwrap();
        let nz: Vec<Vec<usize>> = t.nonzeros().map(|(o, _)| t.multi_index(o)).collect();
        assert_eq!(nz, vec![vec![0, 0, 0], vec![1, 1, 1]]);
        assert!(t.nonzeros().all(|(_, v)| *v == 1.0));
        for (m, n) in [(1, 3), (2, 4), (4, 3), (5, 2)] {
            assert_eq!(nnz(&unit_tensor::<f64>(m, n).unwrap()), n);
        }
    }

    #[test]
    fn unit_tensor_order_two_is_identity() {
        let t: Tensor<f64> = unit_tensor(2, 3).unwrap();
        assert_eq!(Matrix::try_from(t).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn majorization_reads_slices() {
        let a = single(3, 2, &[1, 2, 2], 5.0);
        let m = majorization_matrix(&a).unwrap();
        assert_eq!(m.as_slice(), &[0.0, 5.0, 0.0, 0.0]);
        for (order, n) in [(2, 3), (3, 2), (4, 3)] {
            let u: Tensor<f64> = unit_tensor(order, n).unwrap();
            assert_eq!(majorization_matrix(&u).unwrap(), Matrix::identity(n));
        }
        let v: Tensor<f64> = unit_tensor(1, 2).unwrap();
        assert!(matches!(majorization_matrix(&v), Err(Error::InvalidOrder { .. })));
    }

    #[test]
    fn pattern_and_count() {
        let a = single(3, 2, &[1, 2, 2], -3.5);
        let z = zero_pattern(&a);
        assert_eq!(z, single(3, 2, &[1, 2, 2], 1.0));
        assert_eq!(zero_pattern(&z), z);
        let u: Tensor<f64> = unit_tensor(3, 4).unwrap();
        assert_eq!(zero_pattern(&u), u);
        assert_eq!(nnz(&u), 4);
        assert_eq!(nnz(&Tensor::<f64>::zeros(3, 3).unwrap()), 0);
        let m = Tensor::from_vec(2, 2, vec![-1.0, 1.0, -1.0, 1.0]).unwrap();
        assert_eq!(nnz(&m), 4);
    }

    #[test]
    fn triangular_predicates() {
        let u: Tensor<f64> = unit_tensor(3, 3).unwrap();
        assert!(is_diagonal(&u) && is_upper_triangular(&u) && is_lower_triangular(&u));

        let a = single(3, 2, &[1, 2, 2], 1.0);
        assert!(is_upper_triangular(&a));
        assert!(!is_lower_triangular(&a));
        assert!(!is_diagonal(&a));

        let b = single(3, 2, &[2, 1, 1], 1.0);
        assert!(!is_upper_triangular(&b));
        assert!(is_lower_triangular(&b));
    }

    #[test]
    fn clean_zeroes_noise_only() {
        let t = Tensor::from_vec(
            1,
            3,
            vec![Complex64::new(1e-13, 0.0), Complex64::new(0.0, 1.0), Complex64::new(3e-12, 0.0)],
        )
        .unwrap();
        let c = clean(&t);
        assert_eq!(nnz(&c), 2);
        assert!(c.as_slice()[0].re == 0.0);
    }

    #[test]
    fn entry_limit_is_enforced() {
        assert!(matches!(entry_count(40, 10), Err(Error::TooLarge { .. })));
        assert!(matches!(Tensor::<f64>::zeros(0, 2), Err(Error::InvalidOrder { .. })));
        assert!(matches!(Tensor::<f64>::zeros(2, 0), Err(Error::ZeroDimension)));
    }

    #[test]
    fn multi_index_range() {
        let a = MultiIndex::from_one_based(&[1, 3], 3).unwrap();
        assert_eq!(a.components(), &[0, 2]);
        assert_eq!(a.to_one_based(), vec![1, 3]);
        assert!(MultiIndex::from_one_based(&[0, 1], 3).is_err());
        assert!(MultiIndex::new(vec![3], 3).is_err());
        let t = single(3, 3, &[2, 1, 3], 7.0);
        assert_eq!(*t.slice_entry(1, &a), 7.0);
    }
}

//! Similarity transforms and the structure of unit-preserving witnesses.
//!
//! Two order-m tensors are similar when `B = P A Q` for a pair of matrices
//! with `P I Q = I`. For `m >= 3` every such pair has the rigid form
//! `Q = D R`, `P = R^T D^(1-m)` with `R` a permutation matrix and `D` an
//! invertible diagonal matrix, so every similarity is a diagonal scaling
//! followed by a relabeling of indices. This module builds and recognizes
//! those witnesses and applies the transforms.

use num_traits::{Float, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::product::{left_matrix_product, right_matrix_product};
use crate::scalar::{int_pow, Real, Scalar};
use crate::tensor::{majorization_matrix, unit_tensor, Tensor};

/// Structural detection threshold on magnitudes.
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Entrywise comparison tolerance (scaled, see [`crate::scalar::scaled_distance`]).
pub const COMPARE_TOL: f64 = 1e-9;
/// Smallest magnitude accepted for a diagonal scaling entry.
pub const MIN_SCALING_MODULUS: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub structural: f64,
    pub compare: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { structural: STRUCTURAL_TOL, compare: COMPARE_TOL }
    }
}

/// A bijection on `{0, ..., n-1}` stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection on 0..{n}")));
            }
        }
        Ok(Permutation { images })
    }

    /// From the one-line notation `[sigma(1), ..., sigma(n)]`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidPermutation(format!("{images:?} contains 0")));
        }
        Self::new(images.iter().map(|i| i - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.images.iter().map(|i| i + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &s)| i == s)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &s) in self.images.iter().enumerate() {
            inv[s] = i;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`, i.e. `i -> self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    /// `R` with `R[i][j] = 1` iff `j = sigma(i)`.
    pub fn matrix<S: Scalar>(&self) -> Matrix<S> {
        let n = self.len();
        let mut data = vec![S::zero(); n * n];
        for (i, &s) in self.images.iter().enumerate() {
            data[i * n + s] = S::one();
        }
        Matrix::from_vec(n, data).expect("permutation matrix size")
    }

    /// All permutations of `n` points in lexicographic order.
    pub fn all(n: usize) -> Lexicographic {
        Lexicographic { next: Some((0..n).collect()) }
    }
}

/// Lexicographic enumeration of `S_n`.
#[derive(Clone, Debug)]
pub struct Lexicographic {
    next: Option<Vec<usize>>,
}

impl Iterator for Lexicographic {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let n = succ.len();
        if n > 1 {
            if let Some(k) = (0..n - 1).rev().find(|&k| succ[k] < succ[k + 1]) {
                let l = (k + 1..n).rev().find(|&l| succ[k] < succ[l]).expect("pivot exists");
                succ.swap(k, l);
                succ[k + 1..].reverse();
                self.next = Some(succ);
            }
        }
        Some(Permutation { images: current })
    }
}

/// An invertible diagonal matrix `diag(d_1, ..., d_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalScaling<S> {
    d: Vec<S>,
}

impl<S: Scalar> DiagonalScaling<S> {
    pub fn new(d: Vec<S>) -> Result<Self> {
        let floor = S::Real::lit(MIN_SCALING_MODULUS);
        if let Some(index) = d.iter().position(|v| v.is_zero() || v.modulus() <= floor) {
            return Err(Error::ZeroScaling { index });
        }
        Ok(DiagonalScaling { d })
    }

    pub fn identity(n: usize) -> Self {
        DiagonalScaling { d: vec![S::one(); n] }
    }

    pub fn constant(c: S, n: usize) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn entries(&self) -> &[S] {
        &self.d
    }

    pub fn matrix(&self) -> Matrix<S> {
        Matrix::diagonal(&self.d)
    }

    /// `D^t` with entries raised by repeated multiplication.
    pub fn power_matrix(&self, t: i64) -> Matrix<S> {
        Matrix::diagonal(&self.d.iter().map(|v| int_pow(v, t)).collect::<Vec<_>>())
    }

    /// Entrywise product `D E`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch { left: self.len(), right: other.len() });
        }
        Self::new(self.d.iter().zip(&other.d).map(|(a, b)| a.clone() * b.clone()).collect())
    }
}

/// A raw witness pair `(P, Q)` intended for order-`order` tensors.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness<S> {
    pub p: Matrix<S>,
    pub q: Matrix<S>,
    pub order: usize,
}

impl<S: Scalar> Witness<S> {
    pub fn new(p: Matrix<S>, q: Matrix<S>, order: usize) -> Result<Self> {
        if p.n() != q.n() {
            return Err(Error::DimensionMismatch { left: p.n(), right: q.n() });
        }
        Ok(Witness { p, q, order })
    }

    pub fn identity(n: usize, order: usize) -> Self {
        Witness { p: Matrix::identity(n), q: Matrix::identity(n), order }
    }

    pub fn n(&self) -> usize {
        self.p.n()
    }

    /// Applying `self` and then `next` is the witness `(P' P, Q Q')`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if self.order != next.order {
            return Err(Error::InvalidOrder { order: next.order, reason: "witness orders differ" });
        }
        Witness::new(next.p.mul(&self.p)?, self.q.mul(&next.q)?, self.order)
    }
}

/// Canonical form `(sigma, D)` of a unit-preserving witness.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredWitness<S> {
    pub sigma: Permutation,
    pub scaling: DiagonalScaling<S>,
    pub order: usize,
}

impl<S: Scalar> StructuredWitness<S> {
    pub fn new(sigma: Permutation, scaling: DiagonalScaling<S>, order: usize) -> Result<Self> {
        if sigma.len() != scaling.len() {
            return Err(Error::DimensionMismatch { left: sigma.len(), right: scaling.len() });
        }
        Ok(StructuredWitness { sigma, scaling, order })
    }

    pub fn identity(n: usize, order: usize) -> Self {
        StructuredWitness { sigma: Permutation::identity(n), scaling: DiagonalScaling::identity(n), order }
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }
}

fn check_witness_order(order: usize, min: usize) -> Result<()> {
    if order < min {
        let reason = if min >= 3 {
            "the structure theory of unit-preserving pairs needs order >= 3"
        } else {
            "similarity needs order >= 2"
        };
        return Err(Error::OrderOutOfRange { order, reason });
    }
    Ok(())
}

/// `P (I Q)` for the unit tensor of the witness's order.
fn unit_image<S: Scalar>(w: &Witness<S>) -> Result<(Tensor<S>, Tensor<S>)> {
    let unit = unit_tensor(w.order, w.n())?;
    let iq = right_matrix_product(&unit, &w.q)?;
    Ok((iq, unit))
}

pub fn check_unit_preserving<S: Scalar>(w: &Witness<S>) -> Result<bool> {
    check_unit_preserving_with(w, STRUCTURAL_TOL)
}

/// True iff `P I Q` equals `I` within `tol` on every entry.
pub fn check_unit_preserving_with<S: Scalar>(w: &Witness<S>, tol: f64) -> Result<bool> {
    check_witness_order(w.order, 2)?;
    if w.p.n() != w.q.n() {
        return Err(Error::DimensionMismatch { left: w.p.n(), right: w.q.n() });
    }
    let (iq, unit) = unit_image(w)?;
    let piq = left_matrix_product(&w.p, &iq)?;
    Ok(piq.max_abs_diff(&unit)? <= S::Real::lit(tol))
}

/// `(P, Q) = (R^T D^(1-m), D R)`.
pub fn compose_witness<S: Scalar>(s: &StructuredWitness<S>) -> Result<Witness<S>> {
    check_witness_order(s.order, 3)?;
    let r: Matrix<S> = s.sigma.matrix();
    let q = s.scaling.matrix().mul(&r)?;
    let p = r.transpose().mul(&s.scaling.power_matrix(1 - s.order as i64))?;
    Witness::new(p, q, s.order)
}

pub fn decompose_witness<S: Scalar>(w: &Witness<S>) -> Result<StructuredWitness<S>> {
    decompose_witness_with(w, &Tolerances::default())
}

/// Reads `sigma` and `D` off `Q`, then verifies `P` and `Q` against the
/// recomposed pair.
pub fn decompose_witness_with<S: Scalar>(w: &Witness<S>, tol: &Tolerances) -> Result<StructuredWitness<S>> {
    check_witness_order(w.order, 3)?;
    let n = w.n();
    let threshold = S::Real::lit(tol.structural);

    let mut images = Vec::with_capacity(n);
    for i in 0..n {
        let above: Vec<usize> = (0..n).filter(|&j| w.q.get(i, j).modulus() > threshold).collect();
        if above.len() != 1 {
            return Err(Error::MalformedWitnessRow { row: i + 1, count: above.len() });
        }
        images.push(above[0]);
    }
    if !check_unit_preserving_with(w, tol.structural)? {
        return Err(Error::NotUnitPreserving);
    }
    let sigma = Permutation::new(images)?;
    let d = (0..n).map(|i| w.q.get(i, sigma.apply(i)).clone()).collect();
    let s = StructuredWitness::new(sigma, DiagonalScaling::new(d)?, w.order)?;

    let rebuilt = compose_witness(&s)?;
    let deviation = Float::max(
        rebuilt.p.as_tensor().max_scaled_diff(w.p.as_tensor())?,
        rebuilt.q.as_tensor().max_scaled_diff(w.q.as_tensor())?,
    );
    if deviation > S::Real::lit(tol.compare) {
        return Err(Error::InconsistentWitness { deviation: deviation.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(s)
}

/// Outcome of the two structural checks on `A = I Q` for a witness.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma21Report<R> {
    /// Every entry of `I Q` whose trailing indices are not all equal is zero.
    pub off_slices_vanish: bool,
    /// First offending index (1-based, row-major) when they do not.
    pub first_violation: Option<Vec<usize>>,
    pub max_off_slice: R,
    /// `P M(I Q) = I`.
    pub left_inverse: bool,
    pub max_left_inverse_error: R,
}

impl<R> Lemma21Report<R> {
    pub fn passed(&self) -> bool {
        self.off_slices_vanish && self.left_inverse
    }
}

pub fn verify_lemma21<S: Scalar>(w: &Witness<S>) -> Result<Lemma21Report<S::Real>> {
    verify_lemma21_with(w, STRUCTURAL_TOL)
}

/// Checks (i) `(I Q)[i, alpha] = 0` unless `alpha` is constant and
/// (ii) `P M(I Q) = I`, both within `tol`. A witness that is not
/// unit-preserving is reported as failing rather than rejected.
pub fn verify_lemma21_with<S: Scalar>(w: &Witness<S>, tol: f64) -> Result<Lemma21Report<S::Real>> {
    check_witness_order(w.order, 3)?;
    let tol = S::Real::lit(tol);
    let (iq, _) = unit_image(w)?;

    let mut max_off = S::Real::zero();
    let mut first_violation = None;
    for (off, v) in iq.as_slice().iter().enumerate() {
        let idx = iq.multi_index(off);
        if idx[1..].windows(2).all(|p| p[0] == p[1]) {
            continue;
        }
        let mag = v.modulus();
        if mag > tol && first_violation.is_none() {
            first_violation = Some(idx.iter().map(|i| i + 1).collect());
        }
        max_off = Float::max(max_off, mag);
    }

    let pm = w.p.mul(&majorization_matrix(&iq)?)?;
    let inv_err = pm.as_tensor().max_abs_diff(Matrix::identity(w.n()).as_tensor())?;
    Ok(Lemma21Report {
        off_slices_vanish: first_violation.is_none(),
        first_violation,
        max_off_slice: max_off,
        left_inverse: inv_err <= tol,
        max_left_inverse_error: inv_err,
    })
}

/// `R A R^T`, computed as the relabeling `B[i_1..i_m] = A[sigma(i_1)..sigma(i_m)]`.
pub fn permutation_transform<S: Scalar>(a: &Tensor<S>, sigma: &Permutation) -> Result<Tensor<S>> {
    if sigma.len() != a.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: sigma.len() });
    }
    let mut src = vec![0; a.order()];
    Tensor::from_fn(a.order(), a.dim(), |idx| {
        for (s, &i) in src.iter_mut().zip(idx) {
            *s = sigma.apply(i);
        }
        a.get(&src).clone()
    })
}

/// `D^(1-m) A D`, entrywise `a[i_1..i_m] * d_{i_1}^(1-m) * d_{i_2} ... d_{i_m}`.
///
/// Exponents belonging to equal scaling values are summed before any
/// multiplication, so a constant scaling and the diagonal entries of any
/// scaling leave entries bit-for-bit unchanged.
pub fn diagonal_transform<S: Scalar>(a: &Tensor<S>, d: &DiagonalScaling<S>) -> Result<Tensor<S>> {
    let n = a.dim();
    if d.len() != n {
        return Err(Error::DimensionMismatch { left: n, right: d.len() });
    }
    let m = a.order();
    let span = (m - 1) as i64;

    // class[j]: first index carrying the same scaling value as j
    let entries = d.entries();
    let class: Vec<usize> = (0..n).map(|j| (0..=j).find(|&k| entries[k] == entries[j]).unwrap()).collect();
    // powers[c][e + span] = d_c^e for e in -span..=span
    let powers: Vec<Vec<S>> = entries.iter().map(|v| (-span..=span).map(|e| int_pow(v, e)).collect()).collect();

    let mut exps = vec![0i64; n];
    let data = a
        .as_slice()
        .iter()
        .enumerate()
        .map(|(off, v)| {
            if v.is_zero() {
                return v.clone();
            }
            let idx = a.multi_index(off);
            exps.iter_mut().for_each(|e| *e = 0);
            exps[class[idx[0]]] -= span;
            for &i in &idx[1..] {
                exps[class[i]] += 1;
            }
            exps.iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .fold(v.clone(), |acc, (c, &e)| acc * powers[c][(e + span) as usize].clone())
        })
        .collect();
    Tensor::from_vec(m, n, data)
}

pub fn general_transform<S: Scalar>(a: &Tensor<S>, w: &Witness<S>) -> Result<Tensor<S>> {
    general_transform_with(a, w, STRUCTURAL_TOL)
}

/// `B = P (A Q)` for a unit-preserving witness. For order 2 this is the
/// classical condition `P Q = I`.
pub fn general_transform_with<S: Scalar>(a: &Tensor<S>, w: &Witness<S>, tol: f64) -> Result<Tensor<S>> {
    if a.order() != w.order {
        return Err(Error::InvalidOrder { order: a.order(), reason: "tensor order differs from the witness order" });
    }
    if a.dim() != w.n() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: w.n() });
    }
    if !check_unit_preserving_with(w, tol)? {
        return Err(Error::NotUnitPreserving);
    }
    left_matrix_product(&w.p, &right_matrix_product(a, &w.q)?)
}

/// The intermediate tensor `C = D^(1-m) A D` through which a similarity
/// factors, together with the witness's structured form.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization<S> {
    pub intermediate: Tensor<S>,
    pub sigma: Permutation,
    pub scaling: DiagonalScaling<S>,
}

/// Factors `B = P A Q` as `B = R^T C R` with `C` diagonally similar to `A`.
pub fn factor_similarity<S: Scalar>(a: &Tensor<S>, w: &Witness<S>) -> Result<Factorization<S>> {
    factor_similarity_with(a, w, &Tolerances::default())
}

pub fn factor_similarity_with<S: Scalar>(a: &Tensor<S>, w: &Witness<S>, tol: &Tolerances) -> Result<Factorization<S>> {
    let s = decompose_witness_with(w, tol)?;
    let intermediate = diagonal_transform(a, &s.scaling)?;
    Ok(Factorization { intermediate, sigma: s.sigma, scaling: s.scaling })
}

/// `general_transform(A, compose_witness(s))` through the closed forms:
/// scale by `D`, then relabel by `sigma^-1`.
pub fn structured_transform<S: Scalar>(a: &Tensor<S>, s: &StructuredWitness<S>) -> Result<Tensor<S>> {
    let c = diagonal_transform(a, &s.scaling)?;
    permutation_transform(&c, &s.sigma.inverse())
}

/// `(Q P, P Q)` for a unit-preserving witness.
pub fn witness_products<S: Scalar>(w: &Witness<S>) -> Result<(Matrix<S>, Matrix<S>)> {
    check_witness_order(w.order, 2)?;
    if !check_unit_preserving(w)? {
        return Err(Error::NotUnitPreserving);
    }
    Ok((w.q.mul(&w.p)?, w.p.mul(&w.q)?))
}

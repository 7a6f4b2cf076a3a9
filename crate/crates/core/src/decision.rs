//! Deciding similarity of two order-m (m >= 3) tensors.
//!
//! Every similarity of order `m >= 3` is a diagonal scaling followed by a
//! relabeling, and a diagonal scaling never changes the zero pattern. The
//! search therefore enumerates relabelings that carry the pattern of `A`
//! onto the pattern of `B` and, for each, solves the multiplicative system
//! for the scaling. Every candidate is checked by rebuilding `B`.

use std::collections::HashSet;

use num_complex::Complex;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scalar::{int_pow, Real, Scalar};
use crate::similarity::{
    compose_witness, general_transform, structured_transform, DiagonalScaling, Permutation, StructuredWitness,
};
use crate::tensor::{is_diagonal, nnz, Tensor};

/// Reconstruction tolerance for accepted witnesses (relative on nonzero entries).
pub const DECISION_TOL: f64 = 1e-8;
/// Largest dimension for the exhaustive triangularization search.
pub const MAX_TRIANGULAR_SEARCH_DIM: usize = 10;
/// Largest dimension for the canonical pattern hash.
pub const MAX_CANONICAL_DIM: usize = 8;

fn check_decision_shapes<S: Scalar>(a: &Tensor<S>, b: &Tensor<S>) -> Result<()> {
    if a.order() < 3 {
        return Err(Error::OrderOutOfRange { order: a.order(), reason: "similarity decision needs order >= 3" });
    }
    a.check_same_shape(b)
}

/// Per-vertex counts that any pattern relabeling must preserve:
/// nonzeros with leading index `v`, and nonzero positions with `v` among
/// the trailing indices.
fn vertex_statistics(pattern: &[bool], order: usize, dim: usize) -> Vec<(usize, usize)> {
    let mut stats = vec![(0, 0); dim];
    let mut idx = vec![0; order];
    for (off, _) in pattern.iter().enumerate().filter(|(_, &nz)| nz) {
        let mut rest = off;
        for slot in idx.iter_mut().rev() {
            *slot = rest % dim;
            rest /= dim;
        }
        stats[idx[0]].0 += 1;
        let mut seen = Vec::with_capacity(order - 1);
        for &v in &idx[1..] {
            if !seen.contains(&v) {
                seen.push(v);
                stats[v].1 += 1;
            }
        }
    }
    stats
}

/// Backtracking enumeration of the permutations `tau` with
/// `target[i_1..i_m] = source[tau(i_1)..tau(i_m)]` as zero patterns,
/// in lexicographic order of `tau`.
#[derive(Clone, Debug)]
pub struct PatternPermutations {
    dim: usize,
    source: Vec<bool>,
    target: Vec<bool>,
    /// multi-indices whose largest component is `k`, grouped by `k`
    layers: Vec<Vec<Vec<usize>>>,
    candidates: Vec<Vec<usize>>,
    assigned: Vec<usize>,
    used: Vec<bool>,
    cursor: Vec<usize>,
    exhausted: bool,
}

impl PatternPermutations {
    fn empty() -> Self {
        PatternPermutations {
            dim: 0,
            source: Vec::new(),
            target: Vec::new(),
            layers: Vec::new(),
            candidates: Vec::new(),
            assigned: Vec::new(),
            used: Vec::new(),
            cursor: Vec::new(),
            exhausted: true,
        }
    }

    fn offset(&self, idx: impl Iterator<Item = usize>) -> usize {
        idx.fold(0, |acc, i| acc * self.dim + i)
    }

    fn layer_consistent(&self, k: usize) -> bool {
        self.layers[k].iter().all(|idx| {
            let t = self.offset(idx.iter().copied());
            let s = self.offset(idx.iter().map(|&i| self.assigned[i]));
            self.target[t] == self.source[s]
        })
    }

    fn pop(&mut self) {
        if let Some(j) = self.assigned.pop() {
            self.used[j] = false;
        }
    }
}

impl Iterator for PatternPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        loop {
            if self.exhausted {
                return None;
            }
            let k = self.assigned.len();
            if k == self.dim {
                let found = Permutation::new(self.assigned.clone()).expect("assignment is a bijection");
                self.pop();
                return Some(found);
            }
            let mut advanced = false;
            while self.cursor[k] < self.candidates[k].len() {
                let j = self.candidates[k][self.cursor[k]];
                self.cursor[k] += 1;
                if self.used[j] {
                    continue;
                }
                self.assigned.push(j);
                if self.layer_consistent(k) {
                    self.used[j] = true;
                    if k + 1 < self.dim {
                        self.cursor[k + 1] = 0;
                    }
                    advanced = true;
                    break;
                }
                self.assigned.pop();
            }
            if !advanced {
                if k == 0 {
                    self.exhausted = true;
                    return None;
                }
                self.pop();
            }
        }
    }
}

/// Permutations `tau` with `Z_b = relabel(Z_a, tau)`, i.e.
/// `(Z_b)[i_1..i_m] = (Z_a)[tau(i_1)..tau(i_m)]`. Nonzero entries count as 1.
pub fn pattern_permutations<S: Scalar>(za: &Tensor<S>, zb: &Tensor<S>) -> PatternPermutations {
    if za.check_same_shape(zb).is_err() || nnz(za) != nnz(zb) {
        return PatternPermutations::empty();
    }
    let (order, dim) = (za.order(), za.dim());
    let source: Vec<bool> = za.as_slice().iter().map(|v| !v.is_zero()).collect();
    let target: Vec<bool> = zb.as_slice().iter().map(|v| !v.is_zero()).collect();

    let stats_a = vertex_statistics(&source, order, dim);
    let stats_b = vertex_statistics(&target, order, dim);
    let candidates: Vec<Vec<usize>> =
        stats_b.iter().map(|sb| (0..dim).filter(|&j| stats_a[j] == *sb).collect()).collect();
    if candidates.iter().any(Vec::is_empty) {
        return PatternPermutations::empty();
    }

    let mut layers = vec![Vec::new(); dim];
    for idx in za.indices() {
        let top = *idx.iter().max().expect("order >= 1");
        layers[top].push(idx);
    }

    PatternPermutations {
        dim,
        source,
        target,
        layers,
        candidates,
        assigned: Vec::with_capacity(dim),
        used: vec![false; dim],
        cursor: vec![0; dim],
        exhausted: false,
    }
}

/// One multiplicative constraint `prod_j d_j^exponents[j] = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialConstraint<F> {
    /// 0-based position of the nonzero entry of `A` it comes from.
    pub position: Vec<usize>,
    pub exponents: Vec<i64>,
    pub rhs: Complex<F>,
}

/// The system for the scaling `d` with `B = R^T (D^(1-m) A D) R`: one
/// constraint `d_{j_1}^(1-m) d_{j_2} ... d_{j_m} = b[sigma(j)] / a[j]` per
/// nonzero position `j` of `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternConstraintGraph<F> {
    pub dim: usize,
    pub constraints: Vec<MonomialConstraint<F>>,
}

impl<F: Real> PatternConstraintGraph<F> {
    /// `None` when the patterns of `A` and `B` do not correspond under `sigma`.
    pub fn assemble(a: &Tensor<Complex<F>>, b: &Tensor<Complex<F>>, sigma: &Permutation) -> Result<Option<Self>> {
        a.check_same_shape(b)?;
        let (m, n) = (a.order(), a.dim());
        if sigma.len() != n {
            return Err(Error::DimensionMismatch { left: n, right: sigma.len() });
        }
        if nnz(a) != nnz(b) {
            return Ok(None);
        }
        let mut constraints = Vec::with_capacity(nnz(a));
        let mut image = vec![0; m];
        for (off, value) in a.nonzeros() {
            let position = a.multi_index(off);
            for (dst, &i) in image.iter_mut().zip(&position) {
                *dst = sigma.apply(i);
            }
            let target = b.get(&image);
            if target.is_zero() {
                return Ok(None);
            }
            let mut exponents = vec![0i64; n];
            exponents[position[0]] += 1 - m as i64;
            for &i in &position[1..] {
                exponents[i] += 1;
            }
            assert_eq!(exponents.iter().sum::<i64>(), 0, "constraint exponents must sum to zero");
            constraints.push(MonomialConstraint { position, exponents, rhs: *target / *value });
        }
        Ok(Some(PatternConstraintGraph { dim: n, constraints }))
    }

    /// Component label per unknown; unknowns sharing a constraint with a
    /// nonzero exponent are connected.
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.dim).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        for c in &self.constraints {
            let mut involved = c.exponents.iter().enumerate().filter(|(_, &e)| e != 0).map(|(j, _)| j);
            if let Some(first) = involved.next() {
                for j in involved {
                    let (ra, rb) = (find(&mut parent, first), find(&mut parent, j));
                    if ra != rb {
                        parent[rb.max(ra)] = rb.min(ra);
                    }
                }
            }
        }
        (0..self.dim).map(|j| find(&mut parent, j)).collect()
    }

    /// Solves the monomial system over the nonzero complex numbers by
    /// unimodular row reduction of the integer exponent matrix (rhs values
    /// are carried multiplicatively), then back substitution with principal
    /// roots. Free unknowns, including one per connected component, are
    /// pinned to 1. Returns a candidate only; inconsistent systems are
    /// caught by the caller's reconstruction check.
    pub fn solve(&self) -> Vec<Complex<F>> {
        let n = self.dim;
        let mut rows: Vec<(Vec<i64>, Complex<F>)> =
            self.constraints.iter().map(|c| (c.exponents.clone(), c.rhs)).collect();
        let mut pivots: Vec<(usize, Vec<i64>, Complex<F>)> = Vec::new();

        for col in 0..n {
            loop {
                let active: Vec<usize> = (0..rows.len()).filter(|&r| rows[r].0[col] != 0).collect();
                let Some(&best) = active.iter().min_by_key(|&&r| rows[r].0[col].abs()) else {
                    break;
                };
                let (pivot_exps, pivot_rhs) = rows[best].clone();
                let p = pivot_exps[col];
                let mut reduced = true;
                for &r in &active {
                    if r == best {
                        continue;
                    }
                    let q = rows[r].0[col] / p;
                    if q != 0 {
                        for (e, pe) in rows[r].0.iter_mut().zip(&pivot_exps) {
                            *e -= q * pe;
                        }
                        rows[r].1 = rows[r].1 * int_pow(&pivot_rhs, -q);
                    }
                    if rows[r].0[col] != 0 {
                        reduced = false;
                    }
                }
                if reduced {
                    let (exps, rhs) = rows.swap_remove(best);
                    pivots.push((col, exps, rhs));
                    break;
                }
            }
        }

        let mut d = vec![Complex::<F>::one(); n];
        for (col, exps, rhs) in pivots.iter().rev() {
            let mut t = *rhs;
            for j in col + 1..n {
                if exps[j] != 0 {
                    t = t * int_pow(&d[j], -exps[j]);
                }
            }
            let g = exps[*col];
            d[*col] = match g {
                1 => t,
                -1 => t.inv(),
                _ => t.powf(F::one() / <F as num_traits::NumCast>::from(g).expect("small exponent")),
            };
        }
        d
    }
}

/// Finds `d` with `B = R^T (D^(1-m) A D) R` for `R = R_sigma`, checked
/// entrywise to relative tolerance [`DECISION_TOL`].
pub fn solve_diagonal<F: Real>(
    a: &Tensor<Complex<F>>,
    b: &Tensor<Complex<F>>,
    sigma: &Permutation,
) -> Result<Option<DiagonalScaling<Complex<F>>>> {
    solve_diagonal_with(a, b, sigma, DECISION_TOL)
}

pub fn solve_diagonal_with<F: Real>(
    a: &Tensor<Complex<F>>,
    b: &Tensor<Complex<F>>,
    sigma: &Permutation,
    tol: f64,
) -> Result<Option<DiagonalScaling<Complex<F>>>> {
    check_decision_shapes(a, b)?;
    let Some(graph) = PatternConstraintGraph::assemble(a, b, sigma)? else {
        return Ok(None);
    };
    let Ok(scaling) = DiagonalScaling::new(graph.solve()) else {
        return Ok(None);
    };
    let candidate = StructuredWitness::new(sigma.clone(), scaling, a.order())?;
    let rebuilt = structured_transform(a, &candidate)?;
    let err = rebuilt.max_relative_diff(b)?;
    Ok(if err.is_finite() && err <= F::lit(tol) { Some(candidate.scaling) } else { None })
}

/// A structured witness `(sigma, d)` with `B = general_transform(A,
/// compose_witness(sigma, d))`, or `None` when the tensors are not similar.
/// Relabelings are tried in lexicographic order of `sigma`; the first one
/// whose scaling verifies wins. Inputs are expected to be cleaned.
pub fn decide_similar<F: Real>(
    a: &Tensor<Complex<F>>,
    b: &Tensor<Complex<F>>,
) -> Result<Option<StructuredWitness<Complex<F>>>> {
    decide_similar_with(a, b, DECISION_TOL)
}

pub fn decide_similar_with<F: Real>(
    a: &Tensor<Complex<F>>,
    b: &Tensor<Complex<F>>,
    tol: f64,
) -> Result<Option<StructuredWitness<Complex<F>>>> {
    check_decision_shapes(a, b)?;
    // b[sigma(j)] ~ a[j]  <=>  Z(A) = relabel(Z(B), sigma)
    for sigma in pattern_permutations(b, a) {
        let Some(scaling) = solve_diagonal_with(a, b, &sigma, tol)? else {
            continue;
        };
        let witness = StructuredWitness::new(sigma, scaling, a.order())?;
        let verified = compose_witness(&witness)
            .and_then(|w| general_transform(a, &w))
            .and_then(|rebuilt| rebuilt.max_relative_diff(b))
            .map(|err| err <= F::lit(tol))
            .unwrap_or(false);
        if verified {
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

/// First index (1-based, row-major) of a nonzero entry violating upper
/// triangularity, i.e. with `min(i_2..i_m) < i_1`.
pub fn first_upper_violation<S: Scalar>(a: &Tensor<S>) -> Option<Vec<usize>> {
    a.nonzeros()
        .map(|(off, _)| a.multi_index(off))
        .find(|idx| idx[1..].iter().any(|&k| k < idx[0]))
        .map(|idx| idx.iter().map(|i| i + 1).collect())
}

/// First index (1-based, row-major) of a nonzero entry violating lower
/// triangularity, i.e. with `max(i_2..i_m) > i_1`.
pub fn first_lower_violation<S: Scalar>(a: &Tensor<S>) -> Option<Vec<usize>> {
    a.nonzeros()
        .map(|(off, _)| a.multi_index(off))
        .find(|idx| idx[1..].iter().any(|&k| k > idx[0]))
        .map(|idx| idx.iter().map(|i| i + 1).collect())
}

/// A permutation `sigma` such that `relabel(Z(A), sigma)` is upper
/// triangular, or `None` when no relabeling works. The search places
/// vertices rank by rank and only admits a vertex once every leading index
/// that must precede it has been placed.
pub fn triangularizable_pattern<S: Scalar>(a: &Tensor<S>) -> Result<Option<Permutation>> {
    if a.order() < 3 {
        return Err(Error::OrderOutOfRange {
            order: a.order(),
            reason: "triangular tensors are defined for order >= 3",
        });
    }
    let n = a.dim();
    if n > MAX_TRIANGULAR_SEARCH_DIM {
        return Err(Error::SearchTooLarge { dim: n, max: MAX_TRIANGULAR_SEARCH_DIM });
    }
    // before[v]: leading indices that must be ranked strictly ahead of v
    let mut before: Vec<HashSet<usize>> = vec![HashSet::new(); n];
    for (off, _) in a.nonzeros() {
        let idx = a.multi_index(off);
        for &k in &idx[1..] {
            if k != idx[0] {
                before[k].insert(idx[0]);
            }
        }
    }

    fn place(before: &[HashSet<usize>], ranked: &mut Vec<usize>, placed: &mut [bool]) -> bool {
        let n = placed.len();
        if ranked.len() == n {
            return true;
        }
        for v in 0..n {
            if placed[v] || before[v].iter().any(|&u| !placed[u]) {
                continue;
            }
            placed[v] = true;
            ranked.push(v);
            if place(before, ranked, placed) {
                return true;
            }
            ranked.pop();
            placed[v] = false;
        }
        false
    }

    let mut ranked = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    if !place(&before, &mut ranked, &mut placed) {
        return Ok(None);
    }
    Ok(Some(Permutation::new(ranked)?))
}

/// Similarity invariants for order `m >= 3`. Similar tensors produce equal
/// reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    pub order: usize,
    pub dim: usize,
    pub nnz: usize,
    /// SHA-256 of the canonical relabeling of the zero pattern; `None` when
    /// `dim` exceeds [`MAX_CANONICAL_DIM`].
    pub pattern_hash: Option<String>,
    pub hash_omitted: bool,
    pub diagonal: bool,
    /// `None` when the order is below 3 or the dimension is too large.
    pub triangularizable: Option<bool>,
}

/// The nonzero offsets of the canonical relabeling of `Z(A)`: among all
/// relabelings, the one whose row-major 0/1 string is lexicographically
/// smallest (equivalently, whose sorted offset list is largest).
pub fn canonical_pattern<S: Scalar>(a: &Tensor<S>) -> Result<Vec<usize>> {
    let n = a.dim();
    if n > MAX_CANONICAL_DIM {
        return Err(Error::SearchTooLarge { dim: n, max: MAX_CANONICAL_DIM });
    }
    let positions: Vec<Vec<usize>> = a.nonzeros().map(|(off, _)| a.multi_index(off)).collect();
    let mut best: Option<Vec<usize>> = None;
    let mut offsets = Vec::with_capacity(positions.len());
    for sigma in Permutation::all(n) {
        // relabel by sigma moves the entry at j to sigma^-1(j)
        let inv = sigma.inverse();
        offsets.clear();
        offsets.extend(positions.iter().map(|idx| idx.iter().fold(0, |acc, &j| acc * n + inv.apply(j))));
        offsets.sort_unstable();
        if best.as_ref().is_none_or(|b| offsets > *b) {
            best = Some(offsets.clone());
        }
    }
    Ok(best.unwrap_or_default())
}

pub fn similarity_invariants<S: Scalar>(a: &Tensor<S>) -> Result<InvariantReport> {
    let pattern_hash = match canonical_pattern(a) {
        Ok(offsets) => {
            let mut hasher = Sha256::new();
            hasher.update((a.order() as u64).to_le_bytes());
            hasher.update((a.dim() as u64).to_le_bytes());
            for off in offsets {
                hasher.update((off as u64).to_le_bytes());
            }
            Some(hex::encode(hasher.finalize()))
        }
        Err(Error::SearchTooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    let triangularizable = match triangularizable_pattern(a) {
        Ok(found) => Some(found.is_some()),
        Err(Error::SearchTooLarge { .. } | Error::OrderOutOfRange { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(InvariantReport {
        order: a.order(),
        dim: a.dim(),
        nnz: nnz(a),
        hash_omitted: pattern_hash.is_none(),
        pattern_hash,
        diagonal: is_diagonal(a),
        triangularizable,
    })
}

//! Characteristic polynomial and spectrum of dimension-2 tensors.
//!
//! For `n = 2` the eigen-equations `(A x^(m-1))_i = lambda x_i^(m-1)` are two
//! binary forms of degree `d = m - 1` in `(x_1, x_2)`, and the characteristic
//! polynomial is their resultant, a polynomial of degree `2d` in `lambda`.
//! It is computed by evaluating the `2d x 2d` Sylvester determinant on a
//! circle of `2d + 1` sample points and interpolating with an inverse DFT.
//!
//! Before sampling, the tensor is replaced by a diagonally similar one whose
//! entry magnitudes are balanced in the least-squares sense. The resultant
//! is exactly invariant under diagonal similarity, and the balanced tensor
//! keeps the sample circle on the scale of the spectrum.

use num_complex::Complex;
use num_traits::{Float, One, Zero};

use crate::error::{Error, Result};
use crate::product::apply_to_vector;
use crate::scalar::{int_pow, Real, Scalar};
use crate::similarity::{diagonal_transform, DiagonalScaling};
use crate::tensor::Tensor;

/// Coefficients of a polynomial in `lambda`, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPoly<F> {
    coeffs: Vec<Complex<F>>,
    normalized: bool,
}

impl<F: Real> CharPoly<F> {
    /// Wraps raw coefficients (lowest degree first) without rescaling.
    pub fn from_coeffs(coeffs: Vec<Complex<F>>) -> Self {
        let normalized = coeffs.last().is_some_and(|c| c.is_one());
        CharPoly { coeffs, normalized }
    }

    pub fn coeffs(&self) -> &[Complex<F>] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Leading coefficient scaled to 1.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, z: Complex<F>) -> Complex<F> {
        horner(&self.coeffs, z)
    }

    /// Divides by the leading coefficient; unchanged when it is zero.
    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            Some(lead) if !lead.is_zero() => {
                let lead = *lead;
                CharPoly { coeffs: self.coeffs.iter().map(|c| c / lead).collect(), normalized: true }
            }
            _ => self.clone(),
        }
    }

    /// Largest coefficient difference of the monic forms, relative to the
    /// largest coefficient magnitude of either. Infinite when degrees differ.
    pub fn max_normalized_diff(&self, other: &Self) -> F {
        if self.coeffs.len() != other.coeffs.len() {
            return F::infinity();
        }
        let (a, b) = (self.monic(), other.monic());
        let scale = a.coeffs.iter().chain(&b.coeffs).map(|c| c.norm()).fold(F::zero(), F::max);
        if scale.is_zero() {
            return F::zero();
        }
        let diff = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x - y).norm()).fold(F::zero(), F::max);
        diff / scale
    }
}

fn horner<F: Real>(coeffs: &[Complex<F>], z: Complex<F>) -> Complex<F> {
    coeffs.iter().rev().fold(Complex::zero(), |acc, c| acc * z + c)
}

fn derivative<F: Real>(coeffs: &[Complex<F>]) -> Vec<Complex<F>> {
    coeffs.iter().enumerate().skip(1).map(|(i, c)| c * F::lit(i as f64)).collect()
}

fn check_dim2<S: Scalar>(a: &Tensor<S>) -> Result<()> {
    if a.dim() != 2 {
        return Err(Error::UnsupportedDimension { dim: a.dim(), reason: "spectral routines support dimension 2 only" });
    }
    if a.order() < 2 {
        return Err(Error::OrderOutOfRange { order: a.order(), reason: "eigenvalues need order >= 2" });
    }
    Ok(())
}

/// Coefficients of the two eigen-equation forms at `lambda`. Entry `k` of
/// form `i` multiplies `x_1^(d-k) x_2^k`.
pub fn eigen_forms<F: Real>(a: &Tensor<Complex<F>>, lambda: Complex<F>) -> Result<[Vec<Complex<F>>; 2]> {
    check_dim2(a)?;
    let d = a.order() - 1;
    let mut forms = [vec![Complex::zero(); d + 1], vec![Complex::zero(); d + 1]];
    for (off, v) in a.nonzeros() {
        let idx = a.multi_index(off);
        let k = idx[1..].iter().filter(|&&i| i == 1).count();
        forms[idx[0]][k] += v;
    }
    forms[0][0] -= lambda;
    forms[1][d] -= lambda;
    Ok(forms)
}

fn determinant<F: Real>(mut m: Vec<Vec<Complex<F>>>) -> Complex<F> {
    let n = m.len();
    let mut det = Complex::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| m[r][col].norm().partial_cmp(&m[s][col].norm()).unwrap_or(std::cmp::Ordering::Equal))
            .expect("nonempty range");
        if m[pivot][col].is_zero() {
            return Complex::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for r in col + 1..n {
            let factor = m[r][col] / p;
            if factor.is_zero() {
                continue;
            }
            for c in col..n {
                let t = m[col][c] * factor;
                m[r][c] -= t;
            }
        }
    }
    det
}

/// The resultant of the two eigen-equation forms at a single `lambda`, as
/// the Sylvester determinant.
pub fn resultant_dim2<F: Real>(a: &Tensor<Complex<F>>, lambda: Complex<F>) -> Result<Complex<F>> {
    let [f, g] = eigen_forms(a, lambda)?;
    let d = f.len() - 1;
    let size = 2 * d;
    let mut sylvester = vec![vec![Complex::zero(); size]; size];
    for r in 0..d {
        for k in 0..=d {
            sylvester[r][r + k] = f[k];
            sylvester[d + r][r + k] = g[k];
        }
    }
    Ok(determinant(sylvester))
}

/// A diagonally similar tensor `D^(1-m) A D`, `D = diag(1, s)`, with `s`
/// minimizing the spread of `ln |entry|` over the nonzero entries.
pub fn balance_dim2<F: Real>(a: &Tensor<Complex<F>>) -> Result<Tensor<Complex<F>>> {
    check_dim2(a)?;
    let m = a.order() as f64;
    let (mut num, mut den) = (F::zero(), F::zero());
    for (off, v) in a.nonzeros() {
        let idx = a.multi_index(off);
        let trailing = idx[1..].iter().filter(|&&i| i == 1).count() as f64;
        let kappa = F::lit(if idx[0] == 1 { 1.0 - m } else { 0.0 } + trailing);
        num += kappa * v.norm().ln();
        den += kappa * kappa;
    }
    if den.is_zero() {
        return Ok(a.clone());
    }
    let s = (-num / den).exp();
    match DiagonalScaling::new(vec![Complex::one(), Complex::new(s, F::zero())]) {
        Ok(d) if s.is_finite() => diagonal_transform(a, &d),
        _ => Ok(a.clone()),
    }
}

/// Characteristic polynomial of a dimension-2 tensor of order `m >= 2`,
/// degree `2(m-1)`, scaled to be monic. For `m = 2` this is the matrix
/// characteristic polynomial.
pub fn char_poly_dim2<F: Real>(a: &Tensor<Complex<F>>) -> Result<CharPoly<F>> {
    check_dim2(a)?;
    // phi_{cA}(l) = c^(2d) phi_A(l / c): sample the unit-scale tensor A / mu
    // and scale coefficient j by mu^(2d - j) afterwards
    let balanced = balance_dim2(a)?;
    let mu = balanced.max_modulus();
    let b = if mu.is_zero() { balanced } else { balanced.scale(&Complex::new(mu.recip(), F::zero())) };
    let mu = if mu.is_zero() { F::one() } else { mu };

    let degree = 2 * (a.order() - 1);
    let samples = degree + 1;
    let rho = F::one() + b.max_modulus();
    let unit = |k: usize| {
        let angle = F::lit(2.0) * F::PI() * F::lit((k % samples) as f64) / F::lit(samples as f64);
        Complex::from_polar(F::one(), angle)
    };

    let values: Vec<Complex<F>> = (0..samples).map(|k| resultant_dim2(&b, unit(k) * rho)).collect::<Result<_>>()?;
    let mut points: Vec<Complex<F>> = (0..samples).map(|k| unit(k) * rho).collect();
    points.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap_or(std::cmp::Ordering::Equal));
    assert!(points.windows(2).all(|w| w[0] != w[1]), "interpolation nodes must be distinct");

    let peak = values.iter().map(|v| v.norm()).fold(F::zero(), F::max);
    let noise = F::lit(16.0 * samples as f64) * F::epsilon() * peak;
    let inv_n = F::one() / F::lit(samples as f64);
    let mut coeffs = Vec::with_capacity(samples);
    for j in 0..samples {
        // c_j rho^j = (1/N) sum_k phi(lambda_k) omega^(-jk)
        let mut acc = Complex::zero();
        for (k, v) in values.iter().enumerate() {
            acc += v * unit(j * k).conj();
        }
        acc = acc * inv_n;
        let c =
            if acc.norm() <= noise { Complex::zero() } else { acc / rho.powi(j as i32) * mu.powi((degree - j) as i32) };
        coeffs.push(c);
    }
    Ok(CharPoly { coeffs, normalized: false }.monic())
}

/// Roots of a characteristic polynomial, with multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<F> {
    /// Sorted by real part, then imaginary part.
    pub roots: Vec<Complex<F>>,
    /// Set when the characteristic polynomial vanished identically.
    pub degenerate: bool,
}

pub fn spectrum_dim2<F: Real>(a: &Tensor<Complex<F>>) -> Result<Spectrum<F>> {
    let phi = char_poly_dim2(a)?;
    if phi.is_zero() {
        return Ok(Spectrum { roots: Vec::new(), degenerate: true });
    }
    Ok(Spectrum { roots: poly_roots(phi.coeffs())?, degenerate: false })
}

/// Greedy nearest matching of two root multisets; every matched pair must
/// lie within `tol`.
pub fn spectra_match<F: Real>(a: &[Complex<F>], b: &[Complex<F>], tol: F) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    for x in sort_roots(a.to_vec()) {
        let best = (0..b.len())
            .filter(|&j| !used[j])
            .min_by(|&i, &j| (x - b[i]).norm().partial_cmp(&(x - b[j]).norm()).unwrap_or(std::cmp::Ordering::Equal));
        let Some(j) = best else { return false };
        let dist = (x - b[j]).norm();
        if !(dist <= tol) {
            return false;
        }
        used[j] = true;
    }
    true
}

fn sort_roots<F: Real>(mut roots: Vec<Complex<F>>) -> Vec<Complex<F>> {
    roots.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap_or(std::cmp::Ordering::Equal));
    roots
}

/// All roots of `sum coeffs[i] z^i`, sorted by real then imaginary part.
/// Leading zero coefficients are dropped (roots at infinity).
///
/// Roots come from the companion matrix by shifted QR, are polished with
/// Newton steps, and tight clusters that behave like a multiple root
/// (small derivatives at their centroid) are merged onto the simple root of
/// the matching derivative.
pub fn poly_roots<F: Real>(coeffs: &[Complex<F>]) -> Result<Vec<Complex<F>>> {
    let top = match coeffs.iter().rposition(|c| !c.is_zero()) {
        Some(t) => t,
        None => return Ok(Vec::new()),
    };
    let low = coeffs.iter().position(|c| !c.is_zero()).expect("some coefficient is nonzero");
    let mut roots = vec![Complex::zero(); low];
    let p: Vec<Complex<F>> = coeffs[low..=top].to_vec();
    let n = p.len() - 1;
    if n == 0 {
        return Ok(roots);
    }

    // z = s w puts every root of q(w) = p(s w) / (lead s^n) inside |w| <= 2
    let lead = p[n];
    let s = (0..n).map(|i| (p[i] / lead).norm().powf(F::one() / F::lit((n - i) as f64))).fold(F::zero(), F::max);
    let q: Vec<Complex<F>> = p.iter().enumerate().map(|(i, c)| c / lead * s.powi(i as i32 - n as i32)).collect();

    let mut companion = vec![vec![Complex::zero(); n]; n];
    for j in 0..n {
        companion[0][j] = -q[n - 1 - j];
    }
    for i in 1..n {
        companion[i][i - 1] = Complex::one();
    }
    let mut w = hessenberg_eigenvalues(companion)?;
    let dq = derivative(&q);
    for z in w.iter_mut() {
        *z = newton_polish(&q, &dq, *z);
    }
    let w = merge_clusters(&q, w);
    roots.extend(w.into_iter().map(|z| z * s));
    Ok(sort_roots(roots))
}

fn newton_polish<F: Real>(p: &[Complex<F>], dp: &[Complex<F>], mut z: Complex<F>) -> Complex<F> {
    let mut val = horner(p, z).norm();
    for _ in 0..8 {
        let slope = horner(dp, z);
        if slope.is_zero() {
            break;
        }
        let next = z - horner(p, z) / slope;
        let next_val = horner(p, next).norm();
        if !(next_val < val) {
            break;
        }
        z = next;
        val = next_val;
    }
    z
}

fn merge_clusters<F: Real>(q: &[Complex<F>], roots: Vec<Complex<F>>) -> Vec<Complex<F>> {
    let mut out = Vec::with_capacity(roots.len());
    let mut pending = vec![roots];
    while let Some(group) = pending.pop() {
        if group.len() == 1 {
            out.extend(group);
            continue;
        }
        if let Some(z) = multiple_root(q, &group) {
            out.extend(std::iter::repeat_n(z, group.len()));
            continue;
        }
        let (left, right) = split_longest_edge(&group);
        pending.push(left);
        pending.push(right);
    }
    out
}

/// Refined location when `group` looks like a single root of multiplicity
/// `k = group.len()`. The candidate is the simple root of the `(k-1)`-th
/// derivative nearest the centroid; it is accepted when every lower
/// derivative vanishes there up to coefficient noise.
fn multiple_root<F: Real>(q: &[Complex<F>], group: &[Complex<F>]) -> Option<Complex<F>> {
    let k = group.len();
    let centroid = group.iter().fold(Complex::zero(), |acc, z| acc + z) / F::lit(k as f64);
    let radius = group.iter().map(|z| (z - centroid).norm()).fold(F::zero(), F::max);

    let mut derivatives = vec![q.to_vec()];
    for j in 0..k {
        let next = derivative(&derivatives[j]);
        derivatives.push(next);
    }
    let (g, dg) = (&derivatives[k - 1], &derivatives[k]);
    let mut z = centroid;
    for _ in 0..30 {
        let slope = horner(dg, z);
        if slope.is_zero() {
            return None;
        }
        let step = horner(g, z) / slope;
        z -= step;
        if step.norm() <= F::epsilon() * z.norm().max(F::one()) {
            break;
        }
    }
    let reach = F::lit(4.0) * radius + F::epsilon() * F::lit(100.0);
    if !(z.re.is_finite() && z.im.is_finite() && (z - centroid).norm() <= reach) {
        return None;
    }

    let noise = F::epsilon() * F::lit(1e3 * q.len() as f64) * q.iter().map(|c| c.norm()).fold(F::zero(), F::max);
    let r = z.norm();
    for (j, dj) in derivatives.iter().enumerate().take(k - 1) {
        // bound on coefficient noise propagated into the j-th derivative
        let scale: F =
            (j..q.len()).map(|i| F::lit(falling(i, j)) * r.powi((i - j) as i32)).fold(F::zero(), |acc, t| acc + t);
        if horner(dj, z).norm() > noise * scale {
            return None;
        }
    }
    Some(z)
}

fn falling(i: usize, j: usize) -> f64 {
    ((i - j + 1)..=i).map(|t| t as f64).product()
}

/// Splits a point set along the longest edge of its minimum spanning tree.
fn split_longest_edge<F: Real>(points: &[Complex<F>]) -> (Vec<Complex<F>>, Vec<Complex<F>>) {
    let n = points.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![(F::infinity(), 0usize); n];
    let mut parent = vec![usize::MAX; n];
    in_tree[0] = true;
    for j in 1..n {
        best[j] = ((points[j] - points[0]).norm(), 0);
    }
    let mut edges = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let next = (0..n)
            .filter(|&j| !in_tree[j])
            .min_by(|&i, &j| best[i].0.partial_cmp(&best[j].0).unwrap_or(std::cmp::Ordering::Equal))
            .expect("vertices remain");
        in_tree[next] = true;
        parent[next] = best[next].1;
        edges.push((best[next].0, next));
        for j in 0..n {
            let d = (points[j] - points[next]).norm();
            if !in_tree[j] && d < best[j].0 {
                best[j] = (d, next);
            }
        }
    }
    let cut = edges
        .iter()
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
        .map(|e| e.1)
        .expect("at least one edge");
    // vertices below `cut` in the tree rooted at 0
    let mut side = vec![false; n];
    side[cut] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for j in 0..n {
            if !side[j] && parent[j] != usize::MAX && side[parent[j]] {
                side[j] = true;
                changed = true;
            }
        }
    }
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for (j, z) in points.iter().enumerate() {
        if side[j] {
            right.push(*z)
        } else {
            left.push(*z)
        }
    }
    (left, right)
}

/// Eigenvalues of an upper Hessenberg matrix by single-shift complex QR
/// with Wilkinson shifts and deflation.
fn hessenberg_eigenvalues<F: Real>(mut h: Vec<Vec<Complex<F>>>) -> Result<Vec<Complex<F>>> {
    let n = h.len();
    let eps = F::epsilon();
    let norm = h.iter().flatten().map(|z| z.norm_sqr()).fold(F::zero(), |a, b| a + b).sqrt();
    let limit = 60 * n.max(1);
    let mut out = Vec::with_capacity(n);
    let mut hi = n;
    let (mut since_deflation, mut total) = (0usize, 0usize);

    while hi > 0 {
        let mut lo = hi - 1;
        while lo > 0 {
            let sub = h[lo][lo - 1].norm();
            let mut scale = h[lo][lo].norm() + h[lo - 1][lo - 1].norm();
            if scale.is_zero() {
                scale = norm;
            }
            if sub <= eps * scale {
                h[lo][lo - 1] = Complex::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            out.push(h[hi - 1][hi - 1]);
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > limit {
            return Err(Error::NoConvergence { iterations: total });
        }
        let shift = if since_deflation % 10 == 0 {
            let kick = h[hi - 1][hi - 2].norm() * F::lit(0.75) + eps;
            h[hi - 1][hi - 1] + Complex::from_polar(kick, F::lit(since_deflation as f64))
        } else {
            wilkinson_shift(h[hi - 2][hi - 2], h[hi - 2][hi - 1], h[hi - 1][hi - 2], h[hi - 1][hi - 1])
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Ok(out)
}

fn wilkinson_shift<F: Real>(a: Complex<F>, b: Complex<F>, c: Complex<F>, d: Complex<F>) -> Complex<F> {
    let half = F::lit(0.5);
    let mean = (a + d) * half;
    let disc = ((a - d) * half * ((a - d) * half) + b * c).sqrt();
    let (r1, r2) = (mean + disc, mean - disc);
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

fn qr_step<F: Real>(h: &mut [Vec<Complex<F>>], lo: usize, hi: usize, shift: Complex<F>) {
    for k in lo..hi {
        h[k][k] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi - 1 {
        let (x, y) = (h[k][k], h[k + 1][k]);
        let r = x.norm().hypot(y.norm());
        let (c, s) = if r.is_zero() { (Complex::one(), Complex::zero()) } else { (x / r, y / r) };
        for j in k..hi {
            let (u, v) = (h[k][j], h[k + 1][j]);
            h[k][j] = c.conj() * u + s.conj() * v;
            h[k + 1][j] = -s * u + c * v;
        }
        rotations.push((c, s));
    }
    for (off, (c, s)) in rotations.into_iter().enumerate() {
        let k = lo + off;
        for row in h.iter_mut().take((k + 2).min(hi - 1) + 1).skip(lo) {
            let (u, v) = (row[k], row[k + 1]);
            row[k] = u * c + v * s;
            row[k + 1] = -u * s.conj() + v * c.conj();
        }
    }
    for k in lo..hi {
        h[k][k] += shift;
    }
}

/// `||A x^(m-1) - lambda x^[m-1]||_inf`, where `x^[m-1]` is the entrywise power.
pub fn eigen_residual<S: Scalar>(a: &Tensor<S>, lambda: &S, x: &[S]) -> Result<S::Real> {
    if x.iter().all(Zero::is_zero) {
        return Err(Error::ZeroVector);
    }
    let ax = apply_to_vector(a, x)?;
    let power = a.order() as i64 - 1;
    Ok(ax
        .iter()
        .zip(x)
        .map(|(y, xi)| (y.clone() - lambda.clone() * int_pow(xi, power)).modulus())
        .fold(S::Real::zero(), Float::max))
}

fn eval_form<F: Real>(form: &[Complex<F>], x: &[Complex<F>; 2]) -> Complex<F> {
    let d = form.len() - 1;
    form.iter()
        .enumerate()
        .fold(Complex::zero(), |acc, (k, c)| acc + c * int_pow(&x[0], (d - k) as i64) * int_pow(&x[1], k as i64))
}

/// An eigenvector for an eigenvalue `lambda` of a dimension-2 tensor,
/// scaled to unit max-norm: the common root of the two eigen-equation forms
/// that leaves the smallest residual.
pub fn eigenvector_dim2<F: Real>(a: &Tensor<Complex<F>>, lambda: Complex<F>) -> Result<Vec<Complex<F>>> {
    let forms = eigen_forms(a, lambda)?;
    let mut candidates: Vec<[Complex<F>; 2]> =
        vec![[Complex::one(), Complex::zero()], [Complex::zero(), Complex::one()]];
    for form in &forms {
        for t in poly_roots(form)? {
            // x = (1, t), rescaled to unit max-norm
            let v = if t.norm() <= F::one() { [Complex::one(), t] } else { [t.inv(), Complex::one()] };
            candidates.push(v);
        }
    }
    let badness = |x: &[Complex<F>; 2]| forms.iter().map(|f| eval_form(f, x).norm()).fold(F::zero(), F::max);
    let best = candidates
        .into_iter()
        .min_by(|x, y| badness(x).partial_cmp(&badness(y)).unwrap_or(std::cmp::Ordering::Equal))
        .expect("candidates are nonempty");
    Ok(best.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::unit_tensor;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag3(d1: f64, d2: f64) -> Tensor<Complex64> {
        Tensor::from_entries(3, 2, [([0, 0, 0].as_slice(), c(d1)), ([1, 1, 1].as_slice(), c(d2))]).unwrap()
    }

    fn assert_coeffs(p: &CharPoly<f64>, expect: &[f64], tol: f64) {
        assert_eq!(p.coeffs().len(), expect.len());
        for (x, y) in p.coeffs().iter().zip(expect) {
            assert!((x - c(*y)).norm() <= tol, "{:?} vs {:?}", p.coeffs(), expect);
        }
    }

    // Leibniz expansion over all 24 permutations
    fn det4(m: &[[Complex64; 4]; 4]) -> Complex64 {
        let mut total = Complex64::zero();
        let perms = crate::similarity::Permutation::all(4);
        for p in perms {
            let img = p.images();
            let inversions =
                (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| img[i] > img[j]).count();
            let term = (0..4).fold(Complex64::one(), |acc, i| acc * m[i][img[i]]);
            total += if inversions % 2 == 0 { term } else { -term };
        }
        total
    }

    #[test]
    fn unit_tensor_polynomial() {
        let u: Tensor<Complex64> = unit_tensor(3, 2).unwrap();
        let phi = char_poly_dim2(&u).unwrap();
        assert_eq!(phi.degree(), 4);
        assert!(phi.is_normalized());
        assert_coeffs(&phi, &[1.0, -4.0, 6.0, -4.0, 1.0], 1e-12);

        for lambda in [c(0.3), Complex64::new(-1.0, 2.0)] {
            let e = c(1.0) - lambda;
            let z = Complex64::zero();
            let sylvester = [[e, z, z, z], [z, e, z, z], [z, z, e, z], [z, z, z, e]];
            let oracle = det4(&sylvester);
            assert!((resultant_dim2(&u, lambda).unwrap() - oracle).norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_polynomial_and_spectrum() {
        let phi = char_poly_dim2(&diag3(2.0, 3.0)).unwrap();
        // (l^2 - 5l + 6)^2
        assert_coeffs(&phi, &[36.0, -60.0, 37.0, -10.0, 1.0], 1e-10);
        let spectrum = spectrum_dim2(&diag3(2.0, 3.0)).unwrap();
        let expect = [c(2.0), c(2.0), c(3.0), c(3.0)];
        assert!(spectrum.roots.iter().zip(&expect).all(|(x, y)| (x - y).norm() < 1e-8), "{:?}", spectrum.roots);
    }

    #[test]
    fn unit_and_zero_spectra() {
        let u: Tensor<Complex64> = unit_tensor(3, 2).unwrap();
        let spectrum = spectrum_dim2(&u).unwrap();
        assert!(spectrum.roots.iter().all(|z| (z - c(1.0)).norm() < 1e-8), "{:?}", spectrum.roots);
        assert_eq!(spectrum.roots.len(), 4);

        let z: Tensor<Complex64> = Tensor::zeros(3, 2).unwrap();
        let phi = char_poly_dim2(&z).unwrap();
        assert_coeffs(&phi, &[0.0, 0.0, 0.0, 0.0, 1.0], 1e-14);
        let spectrum = spectrum_dim2(&z).unwrap();
        assert!(!spectrum.degenerate);
        assert!(spectrum.roots.iter().all(|r| r.norm() < 1e-8) && spectrum.roots.len() == 4);
    }

    #[test]
    fn matrix_case_is_ordinary_characteristic_polynomial() {
        let a = Tensor::from_vec(2, 2, vec![c(1.0), c(2.0), c(3.0), c(4.0)]).unwrap();
        let phi = char_poly_dim2(&a).unwrap();
        assert_coeffs(&phi, &[-2.0, -5.0, 1.0], 1e-12);
    }

    #[test]
    fn rejects_other_dimensions() {
        let a: Tensor<Complex64> = Tensor::zeros(3, 3).unwrap();
        assert!(matches!(char_poly_dim2(&a), Err(Error::UnsupportedDimension { dim: 3, .. })));
    }

    #[test]
    fn high_multiplicity_roots() {
        for m in 3..=6 {
            for (d1, d2) in [(0.5, -1.25), (2.0, 2.0), (1.0, 1.3), (-3.0, 0.0)] {
                let a = Tensor::from_fn(m, 2, |idx| {
                    if idx.iter().all(|&i| i == 0) {
                        c(d1)
                    } else if idx.iter().all(|&i| i == 1) {
                        c(d2)
                    } else {
                        c(0.0)
                    }
                })
                .unwrap();
                let spectrum = spectrum_dim2(&a).unwrap();
                let mut expect = vec![c(d1); m - 1];
                expect.extend(vec![c(d2); m - 1]);
                assert!(spectra_match(&spectrum.roots, &expect, 1e-8), "m={m} d=({d1},{d2}): {:?}", spectrum.roots);
            }
        }
    }

    #[test]
    fn poly_roots_simple_and_repeated() {
        // (z - 1)^3 (z + 2) = z^4 - z^3 - 3z^2 + 5z - 2
        let roots = poly_roots(&[c(-2.0), c(5.0), c(-3.0), c(-1.0), c(1.0)]).unwrap();
        let expect = [c(-2.0), c(1.0), c(1.0), c(1.0)];
        assert!(roots.iter().zip(&expect).all(|(x, y)| (x - y).norm() < 1e-10), "{roots:?}");
        // z^2 + 1
        let roots = poly_roots(&[c(1.0), c(0.0), c(1.0)]).unwrap();
        assert!((roots[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((roots[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn residual_examples() {
        let u: Tensor<Complex64> = unit_tensor(3, 2).unwrap();
        assert_eq!(eigen_residual(&u, &c(1.0), &[c(1.0), c(1.0)]).unwrap(), 0.0);
        let d = diag3(2.0, 3.0);
        assert_eq!(eigen_residual(&d, &c(2.0), &[c(1.0), c(0.0)]).unwrap(), 0.0);
        assert!(matches!(eigen_residual(&d, &c(2.0), &[c(0.0), c(0.0)]), Err(Error::ZeroVector)));
    }

    #[test]
    fn eigenvectors_of_a_general_tensor() {
        let a = Tensor::from_fn(3, 2, |idx| {
            Complex64::new(1.0 + idx[0] as f64 - 0.5 * idx[2] as f64, 0.25 * idx[1] as f64)
        })
        .unwrap();
        for lambda in spectrum_dim2(&a).unwrap().roots {
            let x = eigenvector_dim2(&a, lambda).unwrap();
            assert!(eigen_residual(&a, &lambda, &x).unwrap() < 1e-8);
        }
    }
}

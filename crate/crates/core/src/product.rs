//! The general tensor product and its matrix/vector specializations.
//!
//! For `A` of order `m >= 2` and `B` of order `k >= 1`, both of dimension
//! `n`, the product `AB` has order `(m-1)(k-1)+1` and entries
//!
//! ```text
//! d[i, a_1, ..., a_{m-1}] = sum_{i_2..i_m} a[i, i_2, ..., i_m] * b[i_2, a_1] * ... * b[i_m, a_{m-1}]
//! ```
//!
//! where each `a_t` is a multi-index of length `k-1`. Every output entry is
//! accumulated in lexicographic order of `(i_2, ..., i_m)` with plain
//! summation, so results do not depend on scheduling. Products with a matrix
//! on the right take a cheaper mode-by-mode route.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::tensor::{entry_count, Tensor};

pub fn general_product<S: Scalar>(a: &Tensor<S>, b: &Tensor<S>) -> Result<Tensor<S>> {
    let m = a.order();
    let k = b.order();
    let n = a.dim();
    if m < 2 {
        return Err(Error::InvalidOrder { order: m, reason: "left factor of a product needs order >= 2" });
    }
    if b.dim() != n {
        return Err(Error::DimensionMismatch { left: n, right: b.dim() });
    }
    let out_order = (m - 1) * (k - 1) + 1;
    let out_len = entry_count(out_order, n)?;

    // length of one row b[i, ...] and of one tail block a[i, ...]
    let b_row = b.len() / n;
    let a_tail = a.len() / n;
    let blocks = out_len / n;

    let a_data = a.as_slice();
    let b_data = b.as_slice();
    let mut out = Vec::with_capacity(out_len);
    let mut alpha = vec![0usize; m - 1];
    let mut tail = vec![0usize; m - 1];

    for o in 0..out_len {
        let i = o / blocks;
        // split the remaining offset into m-1 digits in base b_row
        let mut rest = o % blocks;
        for slot in alpha.iter_mut().rev() {
            *slot = rest % b_row;
            rest /= b_row;
        }

        let mut acc = S::zero();
        tail.iter_mut().for_each(|t| *t = 0);
        for j in 0..a_tail {
            let mut term = a_data[i * a_tail + j].clone();
            for (t, al) in tail.iter().zip(&alpha) {
                term = term * b_data[t * b_row + al].clone();
            }
            acc = acc + term;

            // advance tail odometer in lockstep with j
            for t in tail.iter_mut().rev() {
                *t += 1;
                if *t < n {
                    break;
                }
                *t = 0;
            }
        }
        out.push(acc);
    }
    Tensor::from_vec(out_order, n, out)
}

/// `P A`, order preserved.
pub fn left_matrix_product<S: Scalar>(p: &Matrix<S>, a: &Tensor<S>) -> Result<Tensor<S>> {
    general_product(p.as_tensor(), a)
}

/// `A Q`, order preserved. Contracts one trailing index at a time instead
/// of summing over all of them per entry; each entry is then accumulated
/// mode by mode, in a fixed order.
pub fn right_matrix_product<S: Scalar>(a: &Tensor<S>, q: &Matrix<S>) -> Result<Tensor<S>> {
    let (m, n) = (a.order(), a.dim());
    if m < 2 {
        return Err(Error::InvalidOrder { order: m, reason: "left factor of a product needs order >= 2" });
    }
    if q.n() != n {
        return Err(Error::DimensionMismatch { left: n, right: q.n() });
    }
    let q = q.as_slice();
    let mut cur = a.as_slice().to_vec();
    let mut next = cur.clone();
    for t in 1..m {
        // index t has stride n^(m-1-t)
        let stride = n.pow((m - 1 - t) as u32);
        for base in (0..cur.len()).step_by(stride * n) {
            for inner in 0..stride {
                for alpha in 0..n {
                    let mut acc = S::zero();
                    for j in 0..n {
                        acc = acc + cur[base + j * stride + inner].clone() * q[j * n + alpha].clone();
                    }
                    next[base + alpha * stride + inner] = acc;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    Tensor::from_vec(m, n, cur)
}

/// `A x^(m-1)`: component `i` is `sum a[i, i_2..i_m] x[i_2] ... x[i_m]`.
pub fn apply_to_vector<S: Scalar>(a: &Tensor<S>, x: &[S]) -> Result<Vec<S>> {
    if x.len() != a.dim() {
        return Err(Error::LengthMismatch { expected: a.dim(), got: x.len() });
    }
    let v = Tensor::from_vec(1, a.dim(), x.to_vec())?;
    Ok(general_product(a, &v)?.into_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{unit_tensor, zero_pattern};

    fn mat(rows: &[[f64; 2]; 2]) -> Matrix<f64> {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn at(t: &Tensor<f64>, idx1: &[usize]) -> f64 {
        let idx: Vec<usize> = idx1.iter().map(|i| i - 1).collect();
        *t.get(&idx)
    }

    #[test]
    fn unit_times_upper_matrix() {
        let q = mat(&[[1.0, 2.0], [0.0, 1.0]]);
        let u: Tensor<f64> = unit_tensor(3, 2).unwrap();
        let iq = right_matrix_product(&u, &q).unwrap();
        assert_eq!(iq.order(), 3);
        assert_eq!(at(&iq, &[1, 1, 2]), 2.0);
        assert_eq!(at(&iq, &[1, 2, 2]), 4.0);
        // closed form q_{i1 i2} q_{i1 i3}
        for idx in iq.indices() {
            let expect = q.get(idx[0], idx[1]) * q.get(idx[0], idx[2]);
            assert_eq!(*iq.get(&idx), expect);
        }
    }

    #[test]
    fn unit_times_antidiagonal() {
        let q = mat(&[[0.0, 2.0], [3.0, 0.0]]);
        let u: Tensor<f64> = unit_tensor(3, 2).unwrap();
        let iq = right_matrix_product(&u, &q).unwrap();
        let nz: Vec<(Vec<usize>, f64)> = iq.nonzeros().map(|(o, v)| (iq.multi_index(o), *v)).collect();
        assert_eq!(nz, vec![(vec![0, 1, 1], 4.0), (vec![1, 0, 0], 9.0)]);
    }

    #[test]
    fn unit_times_vector_is_power() {
        let u: Tensor<f64> = unit_tensor(3, 2).unwrap();
        let x = Tensor::from_vec(1, 2, vec![1.0, 2.0]).unwrap();
        let y = general_product(&u, &x).unwrap();
        assert_eq!(y.order(), 1);
        assert_eq!(y.as_slice(), &[1.0, 4.0]);
        let u4: Tensor<f64> = unit_tensor(4, 3).unwrap();
        assert_eq!(apply_to_vector(&u4, &[2.0, -1.0, 3.0]).unwrap(), vec![8.0, -1.0, 27.0]);
    }

    #[test]
    fn apply_to_vector_cases() {
        let a = Tensor::from_entries(3, 2, [([0, 0, 1].as_slice(), 1.0), ([0, 1, 0].as_slice(), 1.0)]).unwrap();
        assert_eq!(apply_to_vector(&a, &[1.0, 2.0]).unwrap(), vec![4.0, 0.0]);
        let z: Tensor<f64> = Tensor::zeros(4, 3).unwrap();
        assert_eq!(apply_to_vector(&z, &[1.0, 2.0, 3.0]).unwrap(), vec![0.0; 3]);
        assert!(matches!(apply_to_vector(&z, &[1.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn identity_law() {
        let a = Tensor::from_fn(3, 3, |idx| (idx[0] * 9 + idx[1] * 3 + idx[2]) as f64 - 4.0).unwrap();
        let i = Matrix::identity(3);
        assert_eq!(left_matrix_product(&i, &a).unwrap(), a);
        assert_eq!(right_matrix_product(&a, &i).unwrap(), a);
    }

    #[test]
    fn product_of_matrices_is_matmul() {
        let p = mat(&[[1.0, 2.0], [3.0, 4.0]]);
        let q = mat(&[[0.0, 1.0], [-1.0, 5.0]]);
        let pq = general_product(p.as_tensor(), q.as_tensor()).unwrap();
        assert_eq!(pq, p.mul(&q).unwrap().into_tensor());
    }

    #[test]
    fn order_law_small() {
        let a: Tensor<f64> = unit_tensor(3, 2).unwrap();
        let b: Tensor<f64> = unit_tensor(4, 2).unwrap();
        let d = general_product(&a, &b).unwrap();
        assert_eq!(d.order(), 7);
        // delta times delta stays a delta
        assert_eq!(zero_pattern(&d), unit_tensor(7, 2).unwrap());
    }

    #[test]
    fn errors() {
        let v: Tensor<f64> = Tensor::zeros(1, 2).unwrap();
        let a: Tensor<f64> = Tensor::zeros(3, 3).unwrap();
        assert!(matches!(general_product(&v, &v), Err(Error::InvalidOrder { .. })));
        assert!(matches!(general_product(&a, &v), Err(Error::DimensionMismatch { .. })));
    }
}

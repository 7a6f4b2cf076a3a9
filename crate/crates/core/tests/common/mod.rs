#![allow(dead_code)]

use std::f64::consts::TAU;

use proptest::prelude::*;
use tensim::{
    CStructuredWitness, CTensor, Complex64, DiagonalScaling, Permutation, RatTensor, Rational64, StructuredWitness,
    Tensor,
};

/// Complex number with modulus in `[0.1, 10]` (log-uniform) and uniform phase.
pub fn unit_scale_complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, 0.0..TAU).prop_map(|(e, phase)| Complex64::from_polar(10f64.powf(e), phase))
}

pub fn small_complex() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| Complex64::new(re, im))
}

/// Dense complex tensor; each entry is zero with probability `zero_prob`,
/// otherwise of modulus in `[0.1, 10]`.
pub fn tensor(order: usize, dim: usize, zero_prob: f64) -> impl Strategy<Value = CTensor> {
    let len = dim.pow(order as u32);
    proptest::collection::vec((0.0f64..1.0, unit_scale_complex()), len).prop_map(move |entries| {
        let data = entries.into_iter().map(|(u, z)| if u < zero_prob { Complex64::new(0.0, 0.0) } else { z }).collect();
        Tensor::from_vec(order, dim, data).unwrap()
    })
}

pub fn sized_tensor(
    orders: std::ops::RangeInclusive<usize>,
    dims: std::ops::RangeInclusive<usize>,
    zero_prob: f64,
) -> impl Strategy<Value = CTensor> {
    (orders, dims).prop_flat_map(move |(m, n)| tensor(m, n, zero_prob))
}

pub fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Permutation::new(v).unwrap())
}

pub fn structured_witness(order: usize, n: usize) -> impl Strategy<Value = CStructuredWitness> {
    (permutation(n), proptest::collection::vec(unit_scale_complex(), n))
        .prop_map(move |(sigma, d)| StructuredWitness::new(sigma, DiagonalScaling::new(d).unwrap(), order).unwrap())
}

/// A tensor together with a structured witness of matching shape.
pub fn tensor_and_witness(
    orders: std::ops::RangeInclusive<usize>,
    dims: std::ops::RangeInclusive<usize>,
    zero_prob: f64,
) -> impl Strategy<Value = (CTensor, CStructuredWitness)> {
    (orders, dims).prop_flat_map(move |(m, n)| (tensor(m, n, zero_prob), structured_witness(m, n)))
}

pub fn rational() -> impl Strategy<Value = Rational64> {
    (-6i64..=6, 1i64..=3).prop_map(|(p, q)| Rational64::new(p, q))
}

pub fn rat_tensor(order: usize, dim: usize) -> impl Strategy<Value = RatTensor> {
    proptest::collection::vec(rational(), dim.pow(order as u32))
        .prop_map(move |data| Tensor::from_vec(order, dim, data).unwrap())
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

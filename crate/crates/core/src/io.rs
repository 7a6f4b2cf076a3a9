//! JSON interchange for tensors, witnesses and characteristic polynomials.
//!
//! Tensor files look like
//!
//! ```json
//! {"order": 3, "dim": 2, "format": "sparse",
//!  "data": [{"idx": [1, 2, 2], "val": 5}, {"idx": [2, 1, 1], "val": [0, -1]}]}
//! ```
//!
//! with `"format": "dense"` taking nested arrays of depth `order` under
//! `"data"` instead. Scalars are a number or a `[re, im]` pair; indices are
//! 1-based. Matrices inside witness files may be a full tensor object or a
//! bare nested array.

use std::collections::HashSet;

use num_complex::Complex64;
use serde_json::{json, Map, Number, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::similarity::{DiagonalScaling, Permutation, StructuredWitness, Witness};
use crate::spectral::CharPoly;
use crate::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorFormat {
    Dense,
    Sparse,
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| format_err(format!("missing field \"{key}\"")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| format_err(format!("{what} must be a nonnegative integer")))
}

pub fn parse_scalar(v: &Value) -> Result<Complex64> {
    let num = |x: &Value| x.as_f64().ok_or_else(|| format_err("scalar parts must be numbers"));
    match v {
        Value::Number(_) => Ok(Complex64::new(num(v)?, 0.0)),
        Value::Array(parts) if parts.len() == 2 => Ok(Complex64::new(num(&parts[0])?, num(&parts[1])?)),
        _ => Err(format_err("a scalar is a number or a [re, im] pair")),
    }
}

fn real_number(x: f64) -> Result<Value> {
    // drop the sign of negative zero so output does not depend on it
    let x = if x == 0.0 { 0.0 } else { x };
    Number::from_f64(x).map(Value::Number).ok_or_else(|| format_err("cannot write a non-finite number"))
}

/// A number for real values, `[re, im]` otherwise.
pub fn scalar_to_json(z: &Complex64) -> Result<Value> {
    if z.im == 0.0 {
        real_number(z.re)
    } else {
        Ok(Value::Array(vec![real_number(z.re)?, real_number(z.im)?]))
    }
}

/// Always a `[re, im]` pair.
pub fn complex_pair(z: &Complex64) -> Result<Value> {
    Ok(Value::Array(vec![real_number(z.re)?, real_number(z.im)?]))
}

fn check_shape(order: usize, dim: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::InvalidOrder { order, reason: "a tensor has order >= 1" });
    }
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    Ok(())
}

fn flatten_dense(v: &Value, depth: usize, dim: usize, out: &mut Vec<Complex64>) -> Result<()> {
    if depth == 0 {
        out.push(parse_scalar(v)?);
        return Ok(());
    }
    let items = v.as_array().ok_or_else(|| format_err("dense data nesting is shallower than the order"))?;
    if items.len() != dim {
        return Err(format_err(format!("dense data has a row of length {} where {dim} was expected", items.len())));
    }
    for item in items {
        flatten_dense(item, depth - 1, dim, out)?;
    }
    Ok(())
}

/// Nested arrays of depth `order`, each of length `dim`.
pub fn parse_dense(v: &Value, order: usize, dim: usize) -> Result<Tensor<Complex64>> {
    check_shape(order, dim)?;
    let template: Tensor<Complex64> = Tensor::zeros(order, dim)?;
    let mut data = Vec::with_capacity(template.len());
    flatten_dense(v, order, dim, &mut data)?;
    Tensor::from_vec(order, dim, data)
}

pub fn parse_tensor(v: &Value) -> Result<Tensor<Complex64>> {
    let obj = v.as_object().ok_or_else(|| format_err("a tensor file is a JSON object"))?;
    let order = as_usize(field(obj, "order")?, "\"order\"")?;
    let dim = as_usize(field(obj, "dim")?, "\"dim\"")?;
    check_shape(order, dim)?;
    let data = field(obj, "data")?;
    match field(obj, "format")?.as_str() {
        Some("dense") => parse_dense(data, order, dim),
        Some("sparse") => {
            let items = data.as_array().ok_or_else(|| format_err("sparse data is a list of entries"))?;
            let mut t = Tensor::zeros(order, dim)?;
            let mut seen = HashSet::new();
            let mut entries = Vec::with_capacity(items.len());
            for item in items {
                let e = item.as_object().ok_or_else(|| format_err("a sparse entry is an object"))?;
                let idx = field(e, "idx")?
                    .as_array()
                    .ok_or_else(|| format_err("\"idx\" is a list of indices"))?
                    .iter()
                    .map(|i| as_usize(i, "an index"))
                    .collect::<Result<Vec<_>>>()?;
                if idx.len() != order || idx.iter().any(|&i| i == 0 || i > dim) {
                    return Err(Error::IndexOutOfRange { index: idx, dim });
                }
                let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
                let off = t.checked_offset(&zero_based)?;
                if !seen.insert(off) {
                    return Err(format_err(format!("duplicate sparse index {idx:?}")));
                }
                entries.push((zero_based, parse_scalar(field(e, "val")?)?));
            }
            t = Tensor::from_entries(order, dim, entries.iter().map(|(i, v)| (i.as_slice(), *v)))?;
            Ok(t)
        }
        _ => Err(format_err("\"format\" must be \"dense\" or \"sparse\"")),
    }
}

pub fn tensor_from_str(s: &str) -> Result<Tensor<Complex64>> {
    parse_tensor(&serde_json::from_str(s)?)
}

fn nest(t: &Tensor<Complex64>, depth: usize, base: usize, stride: usize) -> Result<Value> {
    if depth == 0 {
        return scalar_to_json(&t.as_slice()[base]);
    }
    let inner = stride / t.dim();
    (0..t.dim()).map(|i| nest(t, depth - 1, base + i * inner, inner)).collect::<Result<Vec<_>>>().map(Value::Array)
}

pub fn tensor_to_json(t: &Tensor<Complex64>, format: TensorFormat) -> Result<Value> {
    let data = match format {
        TensorFormat::Dense => nest(t, t.order(), 0, t.len())?,
        TensorFormat::Sparse => Value::Array(
            t.nonzeros()
                .map(|(off, v)| {
                    let idx: Vec<usize> = t.multi_index(off).iter().map(|i| i + 1).collect();
                    Ok(json!({"idx": idx, "val": scalar_to_json(v)?}))
                })
                .collect::<Result<_>>()?,
        ),
    };
    let name = if format == TensorFormat::Dense { "dense" } else { "sparse" };
    Ok(json!({"order": t.order(), "dim": t.dim(), "format": name, "data": data}))
}

/// A full tensor object of order 2 or a bare nested array.
pub fn parse_matrix(v: &Value) -> Result<Matrix<Complex64>> {
    let t = match v {
        Value::Array(rows) => parse_dense(v, 2, rows.len())?,
        _ => parse_tensor(v)?,
    };
    Matrix::try_from(t)
}

pub fn matrix_to_json(m: &Matrix<Complex64>) -> Result<Value> {
    tensor_to_json(m.as_tensor(), TensorFormat::Dense)
}

fn parse_order(obj: &Map<String, Value>) -> Result<usize> {
    as_usize(field(obj, "m")?, "\"m\"")
}

/// `{"m": int, "P": matrix, "Q": matrix}`.
pub fn parse_witness(v: &Value) -> Result<Witness<Complex64>> {
    let obj = v.as_object().ok_or_else(|| format_err("a witness file is a JSON object"))?;
    let order = parse_order(obj)?;
    Witness::new(parse_matrix(field(obj, "P")?)?, parse_matrix(field(obj, "Q")?)?, order)
}

pub fn witness_to_json(w: &Witness<Complex64>) -> Result<Value> {
    Ok(json!({"m": w.order, "P": matrix_to_json(&w.p)?, "Q": matrix_to_json(&w.q)?}))
}

/// `{"m": int, "sigma": [sigma(1), ...], "d": [[re, im], ...]}`.
pub fn parse_structured_witness(v: &Value) -> Result<StructuredWitness<Complex64>> {
    let obj = v.as_object().ok_or_else(|| format_err("a structured witness is a JSON object"))?;
    let order = parse_order(obj)?;
    let sigma = field(obj, "sigma")?
        .as_array()
        .ok_or_else(|| format_err("\"sigma\" is a list"))?
        .iter()
        .map(|i| as_usize(i, "a permutation image"))
        .collect::<Result<Vec<_>>>()?;
    let d = field(obj, "d")?
        .as_array()
        .ok_or_else(|| format_err("\"d\" is a list"))?
        .iter()
        .map(parse_scalar)
        .collect::<Result<Vec<_>>>()?;
    StructuredWitness::new(Permutation::from_one_based(&sigma)?, DiagonalScaling::new(d)?, order)
}

pub fn structured_witness_to_json(s: &StructuredWitness<Complex64>) -> Result<Value> {
    let d = s.scaling.entries().iter().map(complex_pair).collect::<Result<Vec<_>>>()?;
    Ok(json!({"m": s.order, "sigma": s.sigma.to_one_based(), "d": d}))
}

/// `{"degree": int, "coeffs": [[re, im], ...]}`, lowest degree first.
pub fn charpoly_to_json(p: &CharPoly<f64>) -> Result<Value> {
    let coeffs = p.coeffs().iter().map(complex_pair).collect::<Result<Vec<_>>>()?;
    Ok(json!({"degree": p.degree(), "coeffs": coeffs}))
}

pub fn parse_charpoly(v: &Value) -> Result<CharPoly<f64>> {
    let obj = v.as_object().ok_or_else(|| format_err("a characteristic polynomial is a JSON object"))?;
    let degree = as_usize(field(obj, "degree")?, "\"degree\"")?;
    let coeffs = field(obj, "coeffs")?
        .as_array()
        .ok_or_else(|| format_err("\"coeffs\" is a list"))?
        .iter()
        .map(parse_scalar)
        .collect::<Result<Vec<_>>>()?;
    if coeffs.len() != degree + 1 {
        return Err(Error::LengthMismatch { expected: degree + 1, got: coeffs.len() });
    }
    Ok(CharPoly::from_coeffs(coeffs))
}

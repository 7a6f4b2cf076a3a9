//! Self-contained worked examples. All arithmetic is exact (rational);
//! tensors are printed in the interchange format.

use num_complex::Complex64;
use num_rational::Rational64;
use serde_json::{json, Value};
use tensim::io::{tensor_to_json, TensorFormat};
use tensim::{
    check_unit_preserving, compose_witness, first_lower_violation, first_upper_violation, general_transform,
    is_diagonal, nnz, permutation_transform, triangularizable_pattern, unit_tensor, zero_pattern, DiagonalScaling,
    Matrix, Permutation, RatMatrix, RatTensor, Result, StructuredWitness, Tensor, Witness,
};

/// Structured output plus whether the demonstrated claims all held.
pub struct Demo {
    pub doc: Value,
    pub holds: bool,
    pub summary: String,
}

fn r(p: i64, q: i64) -> Rational64 {
    Rational64::new(p, q)
}

fn int_matrix(rows: [[i64; 2]; 2]) -> RatMatrix {
    Matrix::from_rows(&rows.map(|row| row.map(|v| r(v, 1)).to_vec())).expect("2 x 2")
}

fn show(t: &RatTensor) -> Result<Value> {
    let c = t.map(|v| Complex64::new(*v.numer() as f64 / *v.denom() as f64, 0.0));
    tensor_to_json(&c, TensorFormat::Dense)
}

fn show_matrix(m: &RatMatrix) -> Result<Value> {
    show(m.as_tensor())
}

pub fn nnz_not_invariant() -> Result<Demo> {
    let p = int_matrix([[1, 0], [1, 1]]);
    let q = int_matrix([[1, 0], [-1, 1]]);
    let a = int_matrix([[0, 1], [0, 0]]);
    let w = Witness::new(p.clone(), q.clone(), 2)?;
    let b = general_transform(a.as_tensor(), &w)?;
    let (pq, qp) = (p.mul(&q)?, q.mul(&p)?);
    let identity = Matrix::identity(2);
    let pq_ok = pq == identity && qp == identity;
    let (nnz_a, nnz_b) = (nnz(a.as_tensor()), nnz(&b));

    // the commonly quoted witness; PQ != I, so it is shown only for comparison
    let uncorrected_p = int_matrix([[1, 1], [1, 0]]);
    let uncorrected_q = int_matrix([[1, -1], [1, 0]]);
    let uncorrected_a = int_matrix([[0, 0], [1, 0]]);
    let uncorrected_b = int_matrix([[1, -1], [1, -1]]);
    let uncorrected_pq = uncorrected_p.mul(&uncorrected_q)?;
    let uncorrected_paq = uncorrected_p.mul(&uncorrected_a)?.mul(&uncorrected_q)?;

    let doc = json!({
        "demo": "remark-3-4",
        "order": 2,
        "A": show_matrix(&a)?,
        "P": show_matrix(&p)?,
        "Q": show_matrix(&q)?,
        "B": show(&b)?,
        "PQ": show_matrix(&pq)?,
        "QP": show_matrix(&qp)?,
        "pq_is_identity": pq == identity,
        "qp_is_identity": qp == identity,
        "nnz_A": nnz_a,
        "nnz_B": nnz_b,
        "uncorrected_example": {
            "A": show_matrix(&uncorrected_a)?,
            "P": show_matrix(&uncorrected_p)?,
            "Q": show_matrix(&uncorrected_q)?,
            "B": show_matrix(&uncorrected_b)?,
            "PQ": show_matrix(&uncorrected_pq)?,
            "PAQ": show_matrix(&uncorrected_paq)?,
            "pq_is_identity": uncorrected_pq == identity,
            "paq_equals_B": uncorrected_paq == uncorrected_b,
        },
    });
    Ok(Demo {
        holds: pq_ok && nnz_a == 1 && nnz_b == 4,
        summary: format!(
            "order 2: B = PAQ with PQ = QP = I exactly, yet N(A) = {nnz_a} and N(B) = {nnz_b}; \
             the uncorrected witness has PQ != I and PAQ != B"
        ),
        doc,
    })
}

pub fn diagonal_contrast() -> Result<Demo> {
    // a symmetric matrix and its eigenvector basis
    let s = int_matrix([[2, 1], [1, 2]]);
    let q = int_matrix([[1, 1], [1, -1]]);
    let p = Matrix::from_rows(&[vec![r(1, 2), r(1, 2)], vec![r(1, 2), r(-1, 2)]])?;
    let b = general_transform(s.as_tensor(), &Witness::new(p.clone(), q.clone(), 2)?)?;
    let matrix_holds = !is_diagonal(s.as_tensor()) && is_diagonal(&b) && p.mul(&q)? == Matrix::identity(2);

    // order 3: a diagonal tensor stays diagonal under any witness
    let diag: RatTensor =
        Tensor::from_entries(3, 2, [([0, 0, 0].as_slice(), r(2, 1)), ([1, 1, 1].as_slice(), r(3, 1))])?;
    let sw = StructuredWitness::new(
        Permutation::from_one_based(&[2, 1])?,
        DiagonalScaling::new(vec![r(2, 1), r(3, 1)])?,
        3,
    )?;
    let w3 = compose_witness(&sw)?;
    let diag_image = general_transform(&diag, &w3)?;

    // order 3: the all-ones tensor has more nonzeros than any diagonal tensor
    let ones: RatTensor = Tensor::from_fn(3, 2, |_| r(1, 1))?;
    let eigenbasis_at_order_3 = check_unit_preserving(&Witness::new(p.clone(), q.clone(), 3)?)?;
    let tensor_holds = is_diagonal(&diag_image) && nnz(&ones) > 2 && !eigenbasis_at_order_3;

    let doc = json!({
        "demo": "remark-3-7",
        "matrix_case": {
            "order": 2,
            "S": show_matrix(&s)?,
            "P": show_matrix(&p)?,
            "Q": show_matrix(&q)?,
            "B": show(&b)?,
            "S_is_diagonal": is_diagonal(s.as_tensor()),
            "B_is_diagonal": is_diagonal(&b),
        },
        "tensor_case": {
            "order": 3,
            "diagonal": {
                "A": show(&diag)?,
                "P": show_matrix(&w3.p)?,
                "Q": show_matrix(&w3.q)?,
                "B": show(&diag_image)?,
                "B_is_diagonal": is_diagonal(&diag_image),
            },
            "all_ones": {
                "A": show(&ones)?,
                "nnz": nnz(&ones),
                "max_nnz_of_a_diagonal_tensor": 2,
                "similar_to_a_diagonal_tensor": false,
                "matrix_witness_unit_preserving_at_order_3": eigenbasis_at_order_3,
            },
        },
    });
    Ok(Demo {
        holds: matrix_holds && tensor_holds,
        summary: "order 2: the symmetric S is similar to diag(3, 1); order 3: diagonal tensors stay diagonal, \
                  and the all-ones tensor (8 nonzeros) is similar to no diagonal tensor"
            .to_string(),
        doc,
    })
}

pub fn triangular_obstruction() -> Result<Demo> {
    let a: RatTensor = Tensor::from_entries(3, 2, [([0, 1, 1].as_slice(), r(1, 1)), ([1, 0, 0].as_slice(), r(1, 1))])?;
    let z = zero_pattern(&a);
    let mut certificate = Vec::new();
    let mut any_triangular = false;
    for sigma in Permutation::all(2) {
        let relabeled = permutation_transform(&z, &sigma)?;
        let nonzeros: Vec<Vec<usize>> =
            relabeled.nonzeros().map(|(off, _)| relabeled.multi_index(off).iter().map(|i| i + 1).collect()).collect();
        let upper = first_upper_violation(&relabeled);
        let lower = first_lower_violation(&relabeled);
        any_triangular |= upper.is_none() || lower.is_none();
        certificate.push(json!({
            "sigma": sigma.to_one_based(),
            "nonzeros": nonzeros,
            "upper_violation": upper,
            "lower_violation": lower,
        }));
    }
    let search = triangularizable_pattern(&a)?;
    let unit: RatTensor = unit_tensor(3, 2)?;

    let doc = json!({
        "demo": "remark-3-10",
        "A": show(&a)?,
        "relabelings_checked": certificate.len(),
        "certificate": certificate,
        "triangularizable": search.is_some(),
        "unit_tensor_triangularizable": triangularizable_pattern(&unit)?.is_some(),
    });
    Ok(Demo {
        holds: !any_triangular && search.is_none(),
        summary: "order 3, dimension 2: no relabeling of the pattern {(1,2,2), (2,1,1)} is upper or lower \
                  triangular, so no similar tensor is triangular"
            .to_string(),
        doc,
    })
}

//! Dense tensors, the general tensor product, and tensor similarity.
//!
//! Kernels are generic over the entry type through [`Scalar`], so the same
//! code runs on `f64`, `Complex<f64>` and exact rationals. The aliases below
//! name the concrete types used by the command-line tool.

pub mod decision;
pub mod error;
pub mod io;
pub mod matrix;
pub mod product;
pub mod scalar;
pub mod similarity;
pub mod spectral;
pub mod tensor;

pub use num_complex::Complex64;
pub use num_rational::Rational64;

pub use decision::{
    decide_similar, decide_similar_with, first_lower_violation, first_upper_violation, pattern_permutations,
    similarity_invariants, solve_diagonal, solve_diagonal_with, triangularizable_pattern, InvariantReport,
    PatternConstraintGraph, DECISION_TOL,
};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use product::{apply_to_vector, general_product, left_matrix_product, right_matrix_product};
pub use scalar::{Real, Scalar};
pub use similarity::{
    check_unit_preserving, check_unit_preserving_with, compose_witness, decompose_witness, decompose_witness_with,
    diagonal_transform, factor_similarity, general_transform, general_transform_with, permutation_transform,
    structured_transform, verify_lemma21, verify_lemma21_with, witness_products, DiagonalScaling, Factorization,
    Lemma21Report, Permutation, StructuredWitness, Tolerances, Witness, COMPARE_TOL, STRUCTURAL_TOL,
};
pub use spectral::{
    char_poly_dim2, eigen_residual, eigenvector_dim2, spectra_match, spectrum_dim2, CharPoly, Spectrum,
};
pub use tensor::{
    clean, is_diagonal, is_lower_triangular, is_upper_triangular, majorization_matrix, nnz, unit_tensor, zero_pattern,
    MultiIndex, Tensor,
};

/// Complex double-precision tensor.
pub type CTensor = Tensor<Complex64>;
pub type CMatrix = Matrix<Complex64>;
pub type CWitness = Witness<Complex64>;
pub type CStructuredWitness = StructuredWitness<Complex64>;
pub type CScaling = DiagonalScaling<Complex64>;
/// Real double-precision tensor.
pub type RTensor = Tensor<f64>;
/// Exact rational tensor.
pub type RatTensor = Tensor<Rational64>;
pub type RatMatrix = Matrix<Rational64>;
pub type RatWitness = Witness<Rational64>;

//! Sparse symmetric positive definite systems and small dense least squares.

mod cholesky;
mod dense;
mod sparse;

pub use cholesky::{reverse_cuthill_mckee, solve_spd, EnvelopeCholesky, SpdSolver, RESIDUAL_TOLERANCE};
pub use dense::{householder_least_squares, DenseMatrix, LeastSquares};
pub use sparse::{assemble_from_triplets, SparseSymMatrix, SYMMETRY_TOLERANCE};

/// Euclidean norm.
pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

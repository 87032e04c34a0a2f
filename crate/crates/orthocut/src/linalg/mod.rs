//! Field-generic dense linear algebra for small blocks: matrices over `f64`
//! or `Complex64`, one-sided Jacobi SVD, polar factors, Hermitian
//! eigenvalues, and seeded Gaussian sampling.

mod eigen;
mod matrix;
mod rng;
mod scalar;
mod svd;

pub use eigen::{EIGEN_CAP, PsdReport, hermitian_eigenvalues, is_psd, sym_eigen};
pub use matrix::Matrix;
pub use num_complex::Complex64;
pub use rng::{RngSeed, gaussian_matrix};
pub use scalar::{Field, Scalar};
pub use svd::{Polar, SvdResult, polar, svd_thin};

//! Symmetric and Hermitian eigenvalues via cyclic Jacobi, and the PSD check
//! built on them.
//!
//! Complex Hermitian matrices are handled through the standard real
//! embedding `[[Re, -Im], [Im, Re]]`, which is symmetric and carries every
//! eigenvalue of the original with multiplicity two.

// Kernels below update paired columns and parallel accumulators in
// lockstep; index loops keep those pairings visible.
#![allow(clippy::needless_range_loop)]

use super::matrix::Matrix;
use super::scalar::{Field, Scalar};
use crate::tol::HERMITIAN_TOL;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;
/// Largest dimension accepted by the dense eigenvalue routines. Cubic-cost
/// Jacobi is comfortable well past this; the cap keeps accidental huge
/// inputs from hanging a validation path.
pub const EIGEN_CAP: usize = 512;

/// Eigenvalues (ascending) and, on request, orthonormal eigenvectors in the
/// columns of the returned matrix, for a real symmetric input.
pub fn sym_eigen(a: &Matrix<f64>, want_vectors: bool) -> Result<(Vec<f64>, Option<Matrix<f64>>)> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Shape(format!(
            "sym_eigen: {}x{} is not square",
            a.rows(),
            a.cols()
        )));
    }
    if n > EIGEN_CAP {
        return Err(Error::Capacity(format!(
            "sym_eigen: dimension {n} exceeds cap {EIGEN_CAP}"
        )));
    }
    if !a.is_finite() {
        return Err(Error::Input("sym_eigen: non-finite entries".into()));
    }

    // Work on the symmetrized copy; callers verify Hermitian-ness to their
    // own tolerance, here we just remove roundoff skew.
    let mut m = Matrix::from_fn(n, n, |i, j| 0.5 * (a.get(i, j) + a.get(j, i)));
    let mut v = if want_vectors {
        Some(Matrix::<f64>::identity(n))
    } else {
        None
    };

    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let mut converged = n <= 1;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() <= 1e-15 * scale {
                    continue;
                }
                rotated = true;
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // Rotate rows and columns p, q of m.
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                if let Some(vm) = v.as_mut() {
                    for k in 0..n {
                        let vkp = vm.get(k, p);
                        let vkq = vm.get(k, q);
                        vm.set(k, p, c * vkp - s * vkq);
                        vm.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Jacobi eigenvalue iteration did not converge in {MAX_SWEEPS} sweeps (n = {n})"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).partial_cmp(&m.get(j, j)).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let vectors = v.map(|vm| Matrix::from_fn(n, n, |i, k| vm.get(i, order[k])));
    Ok((eigenvalues, vectors))
}

/// Eigenvalues (ascending) of a Hermitian matrix over either field.
pub fn hermitian_eigenvalues<T: Scalar>(a: &Matrix<T>) -> Result<Vec<f64>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Shape(format!(
            "hermitian_eigenvalues: {}x{} is not square",
            a.rows(),
            a.cols()
        )));
    }
    match T::FIELD {
        Field::Real => {
            let re = Matrix::from_fn(n, n, |i, j| a.get(i, j).re());
            let (vals, _) = sym_eigen(&re, false)?;
            Ok(vals)
        }
        Field::Complex => {
            // Real embedding doubles every eigenvalue's multiplicity; take
            // every other value of the sorted spectrum.
            let emb = Matrix::from_fn(2 * n, 2 * n, |i, j| {
                let (bi, ii) = (i / n, i % n);
                let (bj, jj) = (j / n, j % n);
                match (bi, bj) {
                    (0, 0) | (1, 1) => a.get(ii, jj).re(),
                    (1, 0) => a.get(ii, jj).im(),
                    _ => -a.get(ii, jj).im(),
                }
            });
            let (vals, _) = sym_eigen(&emb, false)?;
            Ok(vals.into_iter().step_by(2).collect())
        }
    }
}

/// Outcome of a positive-semidefiniteness check.
#[derive(Clone, Copy, Debug)]
pub struct PsdReport {
    pub hermitian_residual: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub psd: bool,
}

/// Verify Hermitian symmetry (hard error beyond [`HERMITIAN_TOL`]) and test
/// `lambda_min >= -tol * max(lambda_max, 0)`.
pub fn is_psd<T: Scalar>(a: &Matrix<T>, tol: f64) -> Result<PsdReport> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Shape(format!(
            "is_psd: {}x{} is not square",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::Input("is_psd: non-finite entries".into()));
    }
    let residual = a.hermitian_residual();
    let allowed = HERMITIAN_TOL * a.max_abs().max(1.0);
    if residual > allowed {
        return Err(Error::NotHermitian {
            residual,
            tol: allowed,
        });
    }
    let vals = hermitian_eigenvalues(a)?;
    let lambda_min = *vals.first().expect("nonempty spectrum");
    let lambda_max = *vals.last().expect("nonempty spectrum");
    let psd = lambda_min >= -tol * lambda_max.max(0.0);
    Ok(PsdReport {
        hermitian_residual: residual,
        lambda_min,
        lambda_max,
        psd,
    })
}

//! Thin SVD and polar decomposition for wide blocks.
//!
//! The factorization is a one-sided Jacobi (Hestenes) iteration: accuracy
//! over speed, which is the right trade at the block sizes this crate
//! handles (d up to a few tens, widths up to a few thousand). One-sided
//! Jacobi computes small singular values to high relative accuracy and has
//! no trouble with the repeated singular values that orthogonal inputs
//! produce.
//!
//! For a wide input `a` of shape `d x r`, `r >= d`, we orthogonalize the
//! `d` columns of `b = a^*` by unitary column operations accumulated in
//! `w`: when `b_final = v diag(sigma)` has orthogonal columns,
//! `a = w diag(sigma) v^*`, i.e. `left = w`, `right = v`.

// Kernels below update paired columns and parallel accumulators in
// lockstep; index loops keep those pairings visible.
#![allow(clippy::needless_range_loop)]

use super::matrix::Matrix;
use super::scalar::Scalar;
use crate::tol::RANK_TOL;
use crate::{Error, Result};

/// Thin SVD `a = left * diag(singular_values) * right^*` of a `d x r` input
/// with `r >= d`: `left` is `d x d` unitary, `right` is `r x d` with
/// orthonormal columns, singular values are nonincreasing.
#[derive(Clone, Debug)]
pub struct SvdResult<T: Scalar> {
    pub left: Matrix<T>,
    pub singular_values: Vec<f64>,
    pub right: Matrix<T>,
    /// Some singular value was zero (below `RANK_TOL` relative to the
    /// largest); the corresponding columns of `right` were completed to an
    /// orthonormal set and are not determined by the input.
    pub rank_deficient: bool,
}

impl<T: Scalar> SvdResult<T> {
    /// `left * diag(sigma) * right^*`, for residual checks.
    pub fn reconstruct(&self) -> Matrix<T> {
        let d = self.left.rows();
        let r = self.right.rows();
        Matrix::from_fn(d, r, |i, j| {
            let mut acc = T::ZERO;
            for k in 0..d {
                acc += (self.left.get(i, k) * self.right.get(j, k).conj())
                    .scale(self.singular_values[k]);
            }
            acc
        })
    }
}

/// Polar factor of a wide matrix: the closest point of the Stiefel manifold
/// `{p : p p^* = I}` in the sense that `p` maximizes `Re tr(p^* a)`, with
/// maximum value `sum_j sigma_j(a)`.
#[derive(Clone, Debug)]
pub struct Polar<T: Scalar> {
    pub factor: Matrix<T>,
    pub singular_values: Vec<f64>,
    /// False when `a` is rank deficient; the factor returned is still a
    /// valid Stiefel point but other maximizers exist.
    pub unique: bool,
}

const MAX_SWEEPS: usize = 64;
/// A column pair whose normalized inner product is below this is already
/// orthogonal to working precision.
const ORTHO_SKIP: f64 = 1e-15;
/// Squared-norm ratio below which the smaller column of a pair counts as
/// zero; the corresponding singular-value ratio (1e-13) sits safely under
/// RANK_TOL.
const NEGLIGIBLE_COLUMN_RATIO: f64 = 1e-26;

/// Norm of a column, exact in the single-entry case so that 1x1 polar
/// factors reduce to the sign function bit for bit.
fn col_norm<T: Scalar>(col: &[T]) -> f64 {
    if col.len() == 1 {
        col[0].abs()
    } else {
        col.iter().map(|x| x.abs2()).sum::<f64>().sqrt()
    }
}

pub fn svd_thin<T: Scalar>(a: &Matrix<T>) -> Result<SvdResult<T>> {
    let (d, r) = a.shape();
    if d == 0 || r == 0 {
        return Err(Error::Shape("svd_thin: empty matrix".into()));
    }
    if d > r {
        return Err(Error::Shape(format!(
            "svd_thin expects a wide matrix (rows <= cols), got {d}x{r}; pass the adjoint"
        )));
    }
    if !a.is_finite() {
        return Err(Error::Input("svd_thin: non-finite entries".into()));
    }

    // b = a^*, stored one column per Vec for contiguous column ops.
    let mut b: Vec<Vec<T>> = (0..d)
        .map(|j| (0..r).map(|i| a.get(j, i).conj()).collect())
        .collect();
    // w accumulates every column operation applied to b, starting from I.
    let mut w: Vec<Vec<T>> = (0..d)
        .map(|j| {
            (0..d)
                .map(|i| if i == j { T::ONE } else { T::ZERO })
                .collect()
        })
        .collect();

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..d {
            for q in (p + 1)..d {
                // Hermitian 2x2 Gram data of columns p, q.
                let mut gamma = T::ZERO;
                let (mut npp, mut nqq) = (0.0, 0.0);
                for i in 0..r {
                    gamma += b[p][i].conj() * b[q][i];
                    npp += b[p][i].abs2();
                    nqq += b[q][i].abs2();
                }
                let g = gamma.abs();
                if g == 0.0 || npp == 0.0 || nqq == 0.0 || g <= ORTHO_SKIP * (npp * nqq).sqrt() {
                    continue;
                }
                // A column vanishingly small next to its partner is
                // numerically zero (far below RANK_TOL, so the completion
                // pass replaces its direction anyway). Rotating such a pair
                // can cycle forever when the two are exactly parallel: each
                // annihilation leaves an eps-sized residue that is still
                // parallel, so the normalized coupling never drops.
                if npp.min(nqq) <= NEGLIGIBLE_COLUMN_RATIO * npp.max(nqq) {
                    continue;
                }
                rotated = true;

                // Absorb the phase of gamma into column q so the remaining
                // 2x2 problem is real symmetric with a positive coupling.
                // Over the reals the phase is a sign and the operation is
                // exact; a nonnegative gamma needs nothing.
                let phase = if gamma.im() == 0.0 {
                    if gamma.re() >= 0.0 {
                        None
                    } else {
                        Some(T::from_re(-1.0))
                    }
                } else {
                    Some(gamma.conj().scale(1.0 / g))
                };
                if let Some(s) = phase {
                    for i in 0..r {
                        let v = b[q][i];
                        b[q][i] = s * v;
                    }
                    for i in 0..d {
                        let v = w[q][i];
                        w[q][i] = s * v;
                    }
                }

                // Real Jacobi rotation annihilating the (p,q) Gram entry.
                let tau = (nqq - npp) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..r {
                    let bp = b[p][i];
                    let bq = b[q][i];
                    b[p][i] = bp.scale(c) - bq.scale(s);
                    b[q][i] = bp.scale(s) + bq.scale(c);
                }
                for i in 0..d {
                    let wp = w[p][i];
                    let wq = w[q][i];
                    w[p][i] = wp.scale(c) - wq.scale(s);
                    w[q][i] = wp.scale(s) + wq.scale(c);
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "one-sided Jacobi SVD did not converge in {MAX_SWEEPS} sweeps on a {d}x{r} input"
        )));
    }

    // Column norms are the singular values; sort nonincreasing.
    let mut order: Vec<usize> = (0..d).collect();
    let norms: Vec<f64> = (0..d).map(|j| col_norm(&b[j])).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let sigma_max = norms[order[0]];
    let mut singular_values = Vec::with_capacity(d);
    let mut left = Matrix::zeros(d, d);
    let mut right = Matrix::zeros(r, d);
    let mut deficient_cols = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        singular_values.push(sigma);
        for i in 0..d {
            left.set(i, k, w[j][i]);
        }
        if sigma > RANK_TOL * sigma_max && sigma > 0.0 {
            for i in 0..r {
                right.set(i, k, b[j][i].div_re(sigma));
            }
        } else {
            deficient_cols.push(k);
        }
    }

    // Complete undetermined right columns to an orthonormal set by
    // Gram-Schmidt over standard basis vectors.
    let rank_deficient = !deficient_cols.is_empty();
    for &k in &deficient_cols {
        let mut filled = false;
        for e in 0..r {
            let mut cand: Vec<T> = vec![T::ZERO; r];
            cand[e] = T::ONE;
            // two rounds of classical Gram-Schmidt for stability
            for _ in 0..2 {
                for kk in 0..d {
                    if deficient_cols.contains(&kk) && kk >= k {
                        continue; // not yet filled
                    }
                    let mut proj = T::ZERO;
                    for i in 0..r {
                        proj += right.get(i, kk).conj() * cand[i];
                    }
                    for i in 0..r {
                        let sub = right.get(i, kk) * proj;
                        cand[i] -= sub;
                    }
                }
            }
            let nrm = col_norm(&cand);
            if nrm > 0.5 {
                for i in 0..r {
                    right.set(i, k, cand[i].div_re(nrm));
                }
                filled = true;
                break;
            }
        }
        if !filled {
            return Err(Error::Numerical(
                "svd_thin: failed to complete an orthonormal basis".into(),
            ));
        }
    }

    Ok(SvdResult {
        left,
        singular_values,
        right,
        rank_deficient,
    })
}

/// Polar factor `left * right^*` of a `d x r` input, `r >= d`.
///
/// For `d = r = 1` over the reals this is exactly the sign function on
/// nonzero scalars. A rank-deficient input still yields a valid Stiefel
/// point with `unique: false`; in particular the zero matrix maps to
/// `[I 0]`-like frames produced by basis completion.
pub fn polar<T: Scalar>(a: &Matrix<T>) -> Result<Polar<T>> {
    let svd = svd_thin(a)?;
    let d = a.rows();
    let r = a.cols();
    let mut factor = Matrix::zeros(d, r);
    for i in 0..d {
        for j in 0..r {
            let mut acc = T::ZERO;
            for k in 0..d {
                acc += svd.left.get(i, k) * svd.right.get(j, k).conj();
            }
            factor.set(i, j, acc);
        }
    }
    Ok(Polar {
        factor,
        unique: !svd.rank_deficient,
        singular_values: svd.singular_values,
    })
}

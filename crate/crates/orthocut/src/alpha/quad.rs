//! Gaussian quadrature rules built by the Golub–Welsch method: nodes are the
//! eigenvalues of the Jacobi matrix of the orthogonal-polynomial recurrence,
//! weights come from the first components of its eigenvectors.

use crate::linalg::{Matrix, sym_eigen};
use crate::{Error, Result};

/// Nodes and weights of an n-point quadrature rule, nodes ascending.
#[derive(Clone, Debug)]
pub(crate) struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    /// Apply the rule to `f` as-is (over the rule's native support).
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .collect();
        pairwise_sum(&terms)
    }

    /// Apply a rule with native support [-1, 1] to `f` over `[a, b]`.
    pub fn integrate_on(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        half * self.integrate(|t| f(mid + half * t))
    }
}

/// Sum with a balanced reduction tree. The order is fixed by the slice, so
/// results are reproducible regardless of how the terms were produced, and
/// rounding error grows like log(n) rather than n.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1..=8 => xs.iter().sum(),
        n => {
            let (lo, hi) = xs.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

/// Quadrature rule from a symmetric-tridiagonal Jacobi matrix with diagonal
/// `diag`, off-diagonal `offdiag` (length one less), and zeroth moment `mu0`
/// of the weight function.
///
/// Nodes are the Jacobi-matrix eigenvalues. Weights come from the
/// Christoffel function, `w_k = 1 / sum_j p_j(x_k)^2` over the orthonormal
/// polynomials, rather than from squared eigenvector components: the
/// recurrence keeps exponentially small weights relatively accurate, where
/// eigenvector components only reach absolute (norm-wise) accuracy and the
/// resulting noise gets amplified by integrands that grow at far-out nodes.
fn golub_welsch(diag: &[f64], offdiag: &[f64], mu0: f64) -> Result<QuadRule> {
    let n = diag.len();
    if n == 0 || offdiag.len() + 1 != n {
        return Err(Error::Input(
            "golub_welsch: inconsistent recurrence lengths".into(),
        ));
    }
    let j = Matrix::from_fn(n, n, |r, c| {
        if r == c {
            diag[r]
        } else if r + 1 == c || c + 1 == r {
            offdiag[r.min(c)]
        } else {
            0.0
        }
    });
    let (nodes, _) = sym_eigen(&j, false)?;
    let weights: Vec<f64> = nodes
        .iter()
        .map(|&x| christoffel_weight(diag, offdiag, mu0, x))
        .collect();
    Ok(QuadRule { nodes, weights })
}

/// `1 / sum_{j<n} p_j(x)^2` for the orthonormal polynomials of the
/// recurrence `b_{i+1} p_{i+1}(x) = (x - a_i) p_i(x) - b_i p_{i-1}(x)`,
/// `p_0 = 1/sqrt(mu0)`. At a node of the n-point rule this is its weight.
/// An overflowing sum yields weight 0, which only happens where the true
/// weight is below the smallest positive double.
fn christoffel_weight(diag: &[f64], offdiag: &[f64], mu0: f64, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0 / mu0.sqrt();
    let mut sum = cur * cur;
    for (i, &b_next) in offdiag.iter().enumerate() {
        let b_prev = if i == 0 { 0.0 } else { offdiag[i - 1] };
        let next = ((x - diag[i]) * cur - b_prev * prev) / b_next;
        sum += next * next;
        prev = cur;
        cur = next;
    }
    1.0 / sum
}

/// n-point Gauss–Legendre rule on [-1, 1] (weight 1), exact for polynomials
/// of degree <= 2n - 1.
pub(crate) fn gauss_legendre(n: usize) -> Result<QuadRule> {
    if n == 0 {
        return Err(Error::Input(
            "gauss_legendre: need at least one node".into(),
        ));
    }
    let diag = vec![0.0; n];
    let offdiag: Vec<f64> = (1..n)
        .map(|k| k as f64 / ((4 * k * k - 1) as f64).sqrt())
        .collect();
    golub_welsch(&diag, &offdiag, 2.0)
}

/// n-point generalized Gauss–Laguerre rule for the weight `x^(1/2) e^(-x)`
/// on [0, inf), exact for polynomials of degree <= 2n - 1. The zeroth moment
/// is Gamma(3/2) = sqrt(pi)/2.
pub(crate) fn gauss_laguerre_half(n: usize) -> Result<QuadRule> {
    if n == 0 {
        return Err(Error::Input(
            "gauss_laguerre_half: need at least one node".into(),
        ));
    }
    const ALPHA: f64 = 0.5;
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + ALPHA + 1.0).collect();
    let offdiag: Vec<f64> = (1..n)
        .map(|k| (k as f64 * (k as f64 + ALPHA)).sqrt())
        .collect();
    let mu0 = core::f64::consts::PI.sqrt() / 2.0;
    golub_welsch(&diag, &offdiag, mu0)
}

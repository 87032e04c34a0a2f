//! Problem instances and variable tuples.
//!
//! An instance is a Hermitian block-PSD cost matrix `C` with `n x n` blocks
//! of size `d x d`; the objective over a tuple `T_1..T_n` of frames is
//! `sum_ij Re tr(C_ij^* T_i T_j^*)`. Tuples come in two flavors:
//! [`GroupTuple`] for group/Stiefel variables (`d x r` with `T T^* = I`,
//! `r = d` in the group case) and [`StiefelTuple`] for the wide relaxation
//! variables (`d x m`, default `m = d n`).
//!
//! Instances carry an optional Gram factor `C = scale * A A^*`; when present
//! the objective is evaluated through the factor in `O(n d R w)` instead of
//! `O(n^2 d^2 w)`, and positive semidefiniteness holds by construction.

use crate::linalg::{Matrix, RngSeed, Scalar, gaussian_matrix, is_psd, polar};
use crate::tol::{FEAS_BUILD_TOL, FEAS_OBJECTIVE_TOL, HERMITIAN_TOL, OBJECTIVE_IMAG_TOL, PSD_TOL};
use crate::{Error, Field, Result};
use serde::{Deserialize, Serialize};

/// Largest matrix dimension `d*n` for which construction-time PSD checks run
/// an eigendecomposition. Beyond this, use [`BlockPsdMatrix::from_factor`]
/// (PSD by construction) or [`BlockPsdMatrix::from_dense_unchecked`].
pub const PSD_CHECK_CAP: usize = crate::linalg::EIGEN_CAP;

/// Hard cap on exact sign enumeration in [`brute_force_opt`].
pub const BRUTE_EXACT_MAX_N: usize = 16;
/// Hard cap on the number of grid points visited by the complex phase search.
pub const BRUTE_GRID_BUDGET: u128 = 1 << 20;

// ── instances ──────────────────────────────────────────────────────────────

/// Gram factor `C = scale * A A^*` with `A` of shape `dn x rank`.
#[derive(Clone, Debug)]
pub struct GramFactor<T: Scalar> {
    a: Matrix<T>,
    scale: f64,
}

impl<T: Scalar> GramFactor<T> {
    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    pub fn rank(&self) -> usize {
        self.a.cols()
    }
}

/// Hermitian block-PSD cost matrix.
#[derive(Clone, Debug)]
pub struct BlockPsdMatrix<T: Scalar> {
    d: usize,
    n: usize,
    dense: Option<Matrix<T>>,
    factor: Option<GramFactor<T>>,
    validated: bool,
}

impl<T: Scalar> BlockPsdMatrix<T> {
    /// Validating constructor: checks Hermitian symmetry to
    /// [`HERMITIAN_TOL`] and positive semidefiniteness to [`PSD_TOL`].
    /// Capped at `d*n <=` [`PSD_CHECK_CAP`] because the check is a dense
    /// eigendecomposition.
    pub fn from_dense(d: usize, mat: Matrix<T>) -> Result<Self> {
        let n = Self::grid_shape(d, &mat)?;
        if d * n > PSD_CHECK_CAP {
            return Err(Error::Capacity(format!(
                "from_dense checks PSD by eigendecomposition and is capped at side {PSD_CHECK_CAP}; \
                 got {}; use from_factor or from_dense_unchecked",
                d * n
            )));
        }
        let report = is_psd(&mat, PSD_TOL)?;
        if !report.psd {
            return Err(Error::NotPsd {
                lambda_min: report.lambda_min,
            });
        }
        Ok(Self {
            d,
            n,
            dense: Some(mat),
            factor: None,
            validated: true,
        })
    }

    /// Non-validating constructor for experiments with indefinite `C`:
    /// Hermitian symmetry is still required (it is cheap to check and the
    /// objective's realness depends on it) but the PSD check is skipped and
    /// the instance is marked unvalidated.
    pub fn from_dense_unchecked(d: usize, mat: Matrix<T>) -> Result<Self> {
        let n = Self::grid_shape(d, &mat)?;
        let res = mat.hermitian_residual();
        let scale = mat.max_abs().max(1.0);
        if res > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian {
                residual: res,
                tol: HERMITIAN_TOL * scale,
            });
        }
        Ok(Self {
            d,
            n,
            dense: Some(mat),
            factor: None,
            validated: false,
        })
    }

    /// Gram constructor `C = scale * A A^*` with `A` of shape `dn x rank`;
    /// PSD holds by construction for `scale > 0`, so no eigendecomposition
    /// is run and the instance is validated at any size.
    pub fn from_factor(d: usize, a: Matrix<T>, scale: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Shape("block size d must be >= 1".into()));
        }
        if a.rows() == 0 || a.cols() == 0 || !a.rows().is_multiple_of(d) {
            return Err(Error::Shape(format!(
                "factor must be dn x rank with d = {d}, got {} x {}",
                a.rows(),
                a.cols()
            )));
        }
        if !a.is_finite() {
            return Err(Error::Input("factor has non-finite entries".into()));
        }
        if scale <= 0.0 || !scale.is_finite() {
            return Err(Error::Input(format!(
                "factor scale must be positive finite, got {scale}"
            )));
        }
        let n = a.rows() / d;
        Ok(Self {
            d,
            n,
            dense: None,
            factor: Some(GramFactor { a, scale }),
            validated: true,
        })
    }

    fn grid_shape(d: usize, mat: &Matrix<T>) -> Result<usize> {
        if d == 0 {
            return Err(Error::Shape("block size d must be >= 1".into()));
        }
        let (rows, cols) = mat.shape();
        if rows == 0 || rows != cols || rows % d != 0 {
            return Err(Error::Shape(format!(
                "instance matrix must be square with side divisible by d = {d}, got {rows} x {cols}"
            )));
        }
        if !mat.is_finite() {
            return Err(Error::Input(
                "instance matrix has non-finite entries".into(),
            ));
        }
        Ok(rows / d)
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn side(&self) -> usize {
        self.d * self.n
    }
    pub fn field(&self) -> Field {
        T::FIELD
    }
    /// True unless built through [`Self::from_dense_unchecked`].
    pub fn validated(&self) -> bool {
        self.validated
    }
    pub fn factor(&self) -> Option<&GramFactor<T>> {
        self.factor.as_ref()
    }
    pub fn dense(&self) -> Option<&Matrix<T>> {
        self.dense.as_ref()
    }

    /// Block `C_ij` as an owned `d x d` matrix.
    pub fn block(&self, i: usize, j: usize) -> Matrix<T> {
        assert!(i < self.n && j < self.n, "block index out of range");
        if let Some(m) = &self.dense {
            m.block(i * self.d, j * self.d, self.d, self.d)
        } else {
            let f = self.factor.as_ref().expect("instance has a representation");
            let ai = f.a.block(i * self.d, 0, self.d, f.a.cols());
            let aj = f.a.block(j * self.d, 0, self.d, f.a.cols());
            ai.mul_adjoint(&aj).scaled(f.scale)
        }
    }

    /// Materialize the full `dn x dn` matrix (from the factor if needed).
    pub fn to_dense(&self) -> Matrix<T> {
        if let Some(m) = &self.dense {
            m.clone()
        } else {
            let f = self.factor.as_ref().expect("instance has a representation");
            f.a.mul_adjoint(&f.a).scaled(f.scale)
        }
    }

    /// Sum of block traces `sum_i Re tr(C_ii)`.
    pub fn diagonal_trace(&self) -> f64 {
        if let Some(f) = &self.factor {
            // tr(C_ii) sums |A|^2 row by row
            f.scale * f.a.frob_norm_sq()
        } else {
            let m = self.dense.as_ref().expect("instance has a representation");
            (0..self.side()).map(|i| m.get(i, i).re()).sum()
        }
    }
}

// ── variable tuples ────────────────────────────────────────────────────────

/// Common access for the two tuple kinds; `objective` and the rounding code
/// are generic over it.
pub trait VariableTuple<T: Scalar> {
    fn d(&self) -> usize;
    /// Frame width: `r` for a [`GroupTuple`], `m` for a [`StiefelTuple`].
    fn width(&self) -> usize;
    fn blocks(&self) -> &[Matrix<T>];
    fn n(&self) -> usize {
        self.blocks().len()
    }
    /// Worst row-orthonormality residual `max_i ||T_i T_i^* - I||_F`.
    fn feasibility_residual(&self) -> f64 {
        self.blocks()
            .iter()
            .map(|b| b.stiefel_residual())
            .fold(0.0, f64::max)
    }
}

fn check_blocks<T: Scalar>(d: usize, width: usize, blocks: &[Matrix<T>]) -> Result<()> {
    if d == 0 || width < d {
        return Err(Error::Shape(format!(
            "frame shape {d} x {width} is not wide"
        )));
    }
    if blocks.is_empty() {
        return Err(Error::Shape("tuple needs at least one block".into()));
    }
    for (i, b) in blocks.iter().enumerate() {
        if b.shape() != (d, width) {
            return Err(Error::Shape(format!(
                "block {i} has shape {} x {}, expected {d} x {width}",
                b.rows(),
                b.cols()
            )));
        }
        if !b.is_finite() {
            return Err(Error::Input(format!("block {i} has non-finite entries")));
        }
        let res = b.stiefel_residual();
        if res > FEAS_BUILD_TOL {
            return Err(Error::Infeasible(format!(
                "block {i} violates T T^* = I by {res:.3e} (tolerance {FEAS_BUILD_TOL:.0e})"
            )));
        }
    }
    Ok(())
}

/// Tuple of group/Stiefel frames `V_i` of shape `d x r`, `V_i V_i^* = I`.
/// `r = d` gives O(d) / U(d) elements.
#[derive(Clone, Debug)]
pub struct GroupTuple<T: Scalar> {
    d: usize,
    r: usize,
    blocks: Vec<Matrix<T>>,
}

impl<T: Scalar> GroupTuple<T> {
    pub fn from_blocks(d: usize, r: usize, blocks: Vec<Matrix<T>>) -> Result<Self> {
        check_blocks(d, r, &blocks)?;
        Ok(Self { d, r, blocks })
    }

    /// `n` copies of the canonical frame `[I 0]`.
    pub fn identity(d: usize, r: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("tuple needs at least one block".into()));
        }
        let blocks = vec![Matrix::identity_pad(d, r); n];
        Self::from_blocks(d, r, blocks)
    }

    pub fn r(&self) -> usize {
        self.r
    }
    pub fn into_blocks(self) -> Vec<Matrix<T>> {
        self.blocks
    }
}

impl<T: Scalar> VariableTuple<T> for GroupTuple<T> {
    fn d(&self) -> usize {
        self.d
    }
    fn width(&self) -> usize {
        self.r
    }
    fn blocks(&self) -> &[Matrix<T>] {
        &self.blocks
    }
}

/// Tuple of wide relaxation frames `X_i` of shape `d x m`.
#[derive(Clone, Debug)]
pub struct StiefelTuple<T: Scalar> {
    d: usize,
    m: usize,
    blocks: Vec<Matrix<T>>,
}

impl<T: Scalar> StiefelTuple<T> {
    pub fn from_blocks(d: usize, m: usize, blocks: Vec<Matrix<T>>) -> Result<Self> {
        check_blocks(d, m, &blocks)?;
        Ok(Self { d, m, blocks })
    }

    /// Zero-pad a group tuple into ambient width `m`; the objective value is
    /// unchanged because the Gram matrix `T_i T_j^*` is.
    pub fn from_group(t: &GroupTuple<T>, m: usize) -> Result<Self> {
        if m < t.r {
            return Err(Error::Shape(format!(
                "ambient width {m} < tuple width {}",
                t.r
            )));
        }
        let blocks = t
            .blocks
            .iter()
            .map(|b| {
                let mut wide = Matrix::zeros(t.d, m);
                wide.set_block(0, 0, b);
                wide
            })
            .collect();
        Self::from_blocks(t.d, m, blocks)
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn into_blocks(self) -> Vec<Matrix<T>> {
        self.blocks
    }
}

impl<T: Scalar> VariableTuple<T> for StiefelTuple<T> {
    fn d(&self) -> usize {
        self.d
    }
    fn width(&self) -> usize {
        self.m
    }
    fn blocks(&self) -> &[Matrix<T>] {
        &self.blocks
    }
}

// ── objective ──────────────────────────────────────────────────────────────

/// `sum_ij Re tr(C_ij^* T_i T_j^*)`.
///
/// Through a Gram factor this is `scale * ||sum_i A_i^* T_i||_F^2`, which is
/// exactly real and nonnegative. On the dense path the imaginary part of the
/// accumulated sum is asserted below [`OBJECTIVE_IMAG_TOL`] (relative) and
/// discarded; a Hermitian `C` makes it roundoff only.
pub fn objective<T: Scalar, V: VariableTuple<T>>(c: &BlockPsdMatrix<T>, t: &V) -> Result<f64> {
    if c.d() != t.d() || c.n() != t.n() {
        return Err(Error::Shape(format!(
            "instance is d = {}, n = {}; tuple is d = {}, n = {}",
            c.d(),
            c.n(),
            t.d(),
            t.n()
        )));
    }
    let feas = t.feasibility_residual();
    if feas > FEAS_OBJECTIVE_TOL {
        return Err(Error::Infeasible(format!(
            "tuple violates T T^* = I by {feas:.3e} (tolerance {FEAS_OBJECTIVE_TOL:.0e})"
        )));
    }

    if let Some(f) = c.factor() {
        // stack the blocks into dn x w and contract against the factor once
        let (d, w) = (t.d(), t.width());
        let mut stacked = Matrix::zeros(d * t.n(), w);
        for (i, b) in t.blocks().iter().enumerate() {
            stacked.set_block(i * d, 0, b);
        }
        let s = f.a().adjoint_mul(&stacked); // rank x w
        return Ok(f.scale() * s.frob_norm_sq());
    }

    let mat = c.dense().expect("instance has a representation");
    let d = t.d();
    let blocks = t.blocks();
    let (mut acc_re, mut acc_im) = (0.0, 0.0);
    for (i, ti) in blocks.iter().enumerate() {
        for (j, tj) in blocks.iter().enumerate() {
            let gram = ti.mul_adjoint(tj); // d x d
            for a in 0..d {
                for b in 0..d {
                    let term = mat.get(i * d + a, j * d + b).conj() * gram.get(a, b);
                    acc_re += term.re();
                    acc_im += term.im();
                }
            }
        }
    }
    if acc_im.abs() > OBJECTIVE_IMAG_TOL * acc_re.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "objective has non-real value {acc_im:.3e}; instance is not Hermitian enough"
        )));
    }
    Ok(acc_re)
}

// ── builders ───────────────────────────────────────────────────────────────

/// Random Gram instance `C = A A^*` with `A` a `dn x rank` matrix of
/// standard Gaussians scaled by `1/sqrt(rank)`. Dense storage plus factor,
/// so both objective paths are exercised by tests.
pub fn build_random_psd<T: Scalar>(
    d: usize,
    n: usize,
    rank: usize,
    seed: RngSeed,
) -> Result<BlockPsdMatrix<T>> {
    if rank == 0 {
        return Err(Error::Input("rank must be >= 1".into()));
    }
    if d == 0 || n == 0 {
        return Err(Error::Shape("d and n must be >= 1".into()));
    }
    let a = gaussian_matrix::<T>(d * n, rank, 1.0 / rank as f64, seed)?;
    let dense = a.mul_adjoint(&a);
    Ok(BlockPsdMatrix {
        d,
        n,
        dense: Some(dense),
        factor: Some(GramFactor { a, scale: 1.0 }),
        validated: true,
    })
}

/// Procrustes alignment instance: clouds `A_1..A_n`, each `d x k`, give
/// `C_ij = A_i A_j^T`. Maximizing the objective over rotations minimizes the
/// pairwise misalignment `sum_ij ||O_i^T A_i - O_j^T A_j||_F^2`.
pub fn build_procrustes(clouds: &[Matrix<f64>]) -> Result<BlockPsdMatrix<f64>> {
    let n = clouds.len();
    if n == 0 {
        return Err(Error::Shape("need at least one point cloud".into()));
    }
    let (d, k) = clouds[0].shape();
    if d == 0 || k == 0 {
        return Err(Error::Shape(
            "clouds must be nonempty d x k matrices".into(),
        ));
    }
    for (i, a) in clouds.iter().enumerate() {
        if a.shape() != (d, k) {
            return Err(Error::Shape(format!(
                "cloud {i} has shape {} x {}, expected {d} x {k}",
                a.rows(),
                a.cols()
            )));
        }
        if !a.is_finite() {
            return Err(Error::Input(format!("cloud {i} has non-finite entries")));
        }
    }
    let mut stacked = Matrix::zeros(d * n, k);
    for (i, a) in clouds.iter().enumerate() {
        stacked.set_block(i * d, 0, a);
    }
    let dense = stacked.mul_adjoint(&stacked);
    Ok(BlockPsdMatrix {
        d,
        n,
        dense: Some(dense),
        factor: Some(GramFactor {
            a: stacked,
            scale: 1.0,
        }),
        validated: true,
    })
}

// ── brute-force oracle ─────────────────────────────────────────────────────

/// Output of [`brute_force_opt`]. `certified` is true only for the exact
/// d = 1 real enumeration; the other branches return lower bounds.
#[derive(Clone, Debug)]
pub struct BruteForceResult<T: Scalar> {
    pub value: f64,
    pub tuple: GroupTuple<T>,
    pub certified: bool,
}

/// Small-instance oracle for the group problem (`r = d`).
///
/// - d = 1 real, n <= 16: exact maximum over sign vectors (global sign fixed,
///   so `2^(n-1)` evaluations). Certified.
/// - d = 1 complex: each phase ranges over `grid` roots of unity, first
///   variable pinned to 1 (global phase invariance); the value is monotone
///   nondecreasing in `grid` and a lower bound on the true optimum.
/// - d = 2, n <= 3: best of `grid` random-restart block ascents; lower bound.
///
/// Sizes beyond these caps return a capacity error.
pub fn brute_force_opt<T: Scalar>(
    c: &BlockPsdMatrix<T>,
    grid: usize,
    seed: RngSeed,
) -> Result<BruteForceResult<T>> {
    let (d, n) = (c.d(), c.n());
    match (T::FIELD, d) {
        (Field::Real, 1) => {
            if n > BRUTE_EXACT_MAX_N {
                return Err(Error::Capacity(format!(
                    "exact sign enumeration capped at n = {BRUTE_EXACT_MAX_N}, got {n}"
                )));
            }
            brute_signs(c)
        }
        (Field::Complex, 1) => {
            let grid = grid.max(2);
            let budget = (grid as u128).checked_pow((n - 1) as u32);
            match budget {
                Some(b) if b <= BRUTE_GRID_BUDGET => brute_phases(c, grid),
                _ => Err(Error::Capacity(format!(
                    "phase grid search needs {grid}^{} evaluations, budget is {BRUTE_GRID_BUDGET}",
                    n - 1
                ))),
            }
        }
        (_, 2) if n <= 3 => brute_restarts(c, grid.max(8), seed),
        _ => Err(Error::Capacity(format!(
            "brute force handles d = 1 (any field) or d = 2 with n <= 3; got d = {d}, n = {n}"
        ))),
    }
}

/// Exact `{±1}^n` enumeration; the objective is sign-flip invariant so the
/// first variable is fixed to +1.
fn brute_signs<T: Scalar>(c: &BlockPsdMatrix<T>) -> Result<BruteForceResult<T>> {
    let n = c.n();
    // scalar couplings; Hermitian C has real 1x1 blocks
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            k[i * n + j] = c.block(i, j).get(0, 0).re();
        }
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_mask = 0u32;
    let mut signs = vec![1.0f64; n];
    for mask in 0..(1u32 << (n - 1)) {
        for (i, s) in signs.iter_mut().enumerate().skip(1) {
            *s = if mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 };
        }
        let mut v = 0.0;
        for i in 0..n {
            let si = signs[i];
            let row = &k[i * n..(i + 1) * n];
            for j in 0..n {
                v += row[j] * si * signs[j];
            }
        }
        if v > best {
            best = v;
            best_mask = mask;
        }
    }
    let blocks = (0..n)
        .map(|i| {
            let s = if i > 0 && best_mask >> (i - 1) & 1 == 1 {
                -1.0
            } else {
                1.0
            };
            Matrix::from_row_major(1, 1, vec![T::from_re(s)]).expect("1x1 block")
        })
        .collect();
    Ok(BruteForceResult {
        value: best,
        tuple: GroupTuple::from_blocks(1, 1, blocks)?,
        certified: true,
    })
}

/// Grid search over `grid`-th roots of unity per variable, first pinned to 1.
fn brute_phases<T: Scalar>(c: &BlockPsdMatrix<T>, grid: usize) -> Result<BruteForceResult<T>> {
    let n = c.n();
    let k: Vec<T> = (0..n * n)
        .map(|ij| c.block(ij / n, ij % n).get(0, 0))
        .collect();
    let phases: Vec<T> = (0..grid)
        .map(|g| {
            let th = 2.0 * std::f64::consts::PI * g as f64 / grid as f64;
            T::from_re(th.cos()) + T::from_re(th.sin()) * T::IMAG
        })
        .collect();
    let mut idx = vec![0usize; n]; // idx[0] stays 0
    let mut z: Vec<T> = vec![phases[0]; n];
    let mut best = f64::NEG_INFINITY;
    let mut best_z = z.clone();
    loop {
        let mut v = 0.0;
        for i in 0..n {
            for j in 0..n {
                // Re( conj(c_ij) z_i conj(z_j) )
                v += (k[i * n + j].conj() * z[i] * z[j].conj()).re();
            }
        }
        if v > best {
            best = v;
            best_z = z.clone();
        }
        // odometer over idx[1..]
        let mut pos = 1;
        loop {
            if pos >= n {
                let blocks = best_z
                    .iter()
                    .map(|&p| Matrix::from_row_major(1, 1, vec![p]).expect("1x1 block"))
                    .collect();
                return Ok(BruteForceResult {
                    value: best,
                    tuple: GroupTuple::from_blocks(1, 1, blocks)?,
                    certified: false,
                });
            }
            idx[pos] += 1;
            if idx[pos] < grid {
                z[pos] = phases[idx[pos]];
                break;
            }
            idx[pos] = 0;
            z[pos] = phases[0];
            pos += 1;
        }
    }
}

/// Best of `restarts` random-restart block-coordinate ascents over the group
/// variables themselves (no relaxation). Each pass updates
/// `V_i <- polar(sum_{j != i} C_ij V_j)`, the exact block maximizer; the
/// diagonal terms are constant on the group so they are skipped.
fn brute_restarts<T: Scalar>(
    c: &BlockPsdMatrix<T>,
    restarts: usize,
    seed: RngSeed,
) -> Result<BruteForceResult<T>> {
    let (d, n) = (c.d(), c.n());
    let blocks: Vec<Vec<Matrix<T>>> = (0..n)
        .map(|i| (0..n).map(|j| c.block(i, j)).collect())
        .collect();
    let mut best: Option<(f64, Vec<Matrix<T>>)> = None;
    for rs in 0..restarts {
        let child = seed.child(rs as u64);
        let mut vs: Vec<Matrix<T>> = (0..n)
            .map(|i| {
                let g = gaussian_matrix::<T>(d, d, 1.0, child.child(i as u64))?;
                Ok(polar(&g)?.factor)
            })
            .collect::<Result<_>>()?;
        let mut cur = group_objective(&blocks, &vs);
        for _ in 0..200 {
            for i in 0..n {
                let mut b = Matrix::zeros(d, d);
                for (j, vj) in vs.iter().enumerate() {
                    if j != i {
                        b.add_assign(&blocks[i][j].mul(vj));
                    }
                }
                if b.max_abs() > 0.0 {
                    vs[i] = polar(&b)?.factor;
                }
            }
            let next = group_objective(&blocks, &vs);
            if next - cur <= 1e-12 * next.abs().max(1.0) {
                cur = next;
                break;
            }
            cur = next;
        }
        if best.as_ref().is_none_or(|(b, _)| cur > *b) {
            best = Some((cur, vs.clone()));
        }
    }
    let (value, vs) = best.expect("restarts >= 1");
    Ok(BruteForceResult {
        value,
        tuple: GroupTuple::from_blocks(d, d, vs)?,
        certified: false,
    })
}

fn group_objective<T: Scalar>(blocks: &[Vec<Matrix<T>>], vs: &[Matrix<T>]) -> f64 {
    let mut acc = 0.0;
    for (i, vi) in vs.iter().enumerate() {
        for (j, vj) in vs.iter().enumerate() {
            acc += blocks[i][j].inner_re(&vi.mul_adjoint(vj));
        }
    }
    acc
}

// ── JSON interchange ───────────────────────────────────────────────────────

type JsonBlock = Vec<Vec<[f64; 2]>>;

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    field: Field,
    d: usize,
    n: usize,
    /// `n^2` blocks in row-major block order; each block is `d` rows of `d`
    /// `[re, im]` entries.
    blocks: Vec<JsonBlock>,
}

#[derive(Serialize, Deserialize)]
struct TupleJson {
    field: Field,
    kind: String,
    d: usize,
    width: usize,
    n: usize,
    blocks: Vec<JsonBlock>,
}

fn matrix_to_json<T: Scalar>(m: &Matrix<T>) -> JsonBlock {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| [m.get(i, j).re(), m.get(i, j).im()])
                .collect()
        })
        .collect()
}

fn matrix_from_json<T: Scalar>(rows: usize, cols: usize, b: &JsonBlock) -> Result<Matrix<T>> {
    if b.len() != rows || b.iter().any(|r| r.len() != cols) {
        return Err(Error::Input(format!("block is not {rows} x {cols}")));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for row in b {
        for &[re, im] in row {
            if T::FIELD == Field::Real && im != 0.0 {
                return Err(Error::Input(format!(
                    "real instance has entry with nonzero imaginary part {im}"
                )));
            }
            data.push(T::from_re(re) + T::from_re(im) * T::IMAG);
        }
    }
    Matrix::from_row_major(rows, cols, data)
}

/// Peek at the field tag of a serialized instance or tuple without
/// committing to a scalar type.
pub fn json_field(s: &str) -> Result<Field> {
    #[derive(Deserialize)]
    struct Probe {
        field: Field,
    }
    let p: Probe = serde_json::from_str(s)?;
    Ok(p.field)
}

impl<T: Scalar> BlockPsdMatrix<T> {
    /// Canonical-order JSON (`field`, `d`, `n`, `blocks`), diffable output.
    pub fn to_json_string(&self) -> Result<String> {
        let blocks = (0..self.n * self.n)
            .map(|ij| matrix_to_json(&self.block(ij / self.n, ij % self.n)))
            .collect();
        Ok(serde_json::to_string(&InstanceJson {
            field: T::FIELD,
            d: self.d,
            n: self.n,
            blocks,
        })?)
    }

    /// Parse and validate an instance. Instances with side up to
    /// [`PSD_CHECK_CAP`] get the full PSD check; larger ones only the
    /// Hermitian check and are marked unvalidated.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let parsed: InstanceJson = serde_json::from_str(s)?;
        if parsed.field != T::FIELD {
            return Err(Error::Input(format!(
                "instance field is {}, expected {}",
                parsed.field,
                T::FIELD
            )));
        }
        if parsed.d == 0 || parsed.n == 0 {
            return Err(Error::Shape("d and n must be >= 1".into()));
        }
        if parsed.blocks.len() != parsed.n * parsed.n {
            return Err(Error::Input(format!(
                "expected {} blocks, got {}",
                parsed.n * parsed.n,
                parsed.blocks.len()
            )));
        }
        let side = parsed.d * parsed.n;
        let mut mat = Matrix::zeros(side, side);
        for (ij, b) in parsed.blocks.iter().enumerate() {
            let (i, j) = (ij / parsed.n, ij % parsed.n);
            let block = matrix_from_json::<T>(parsed.d, parsed.d, b)?;
            mat.set_block(i * parsed.d, j * parsed.d, &block);
        }
        if side <= PSD_CHECK_CAP {
            Self::from_dense(parsed.d, mat)
        } else {
            Self::from_dense_unchecked(parsed.d, mat)
        }
    }
}

fn tuple_blocks_to_json<T: Scalar, V: VariableTuple<T>>(t: &V, kind: &str) -> TupleJson {
    TupleJson {
        field: T::FIELD,
        kind: kind.into(),
        d: t.d(),
        width: t.width(),
        n: t.n(),
        blocks: t.blocks().iter().map(matrix_to_json).collect(),
    }
}

fn tuple_blocks_from_json<T: Scalar>(p: &TupleJson, kind: &str) -> Result<Vec<Matrix<T>>> {
    if p.field != T::FIELD {
        return Err(Error::Input(format!(
            "tuple field is {}, expected {}",
            p.field,
            T::FIELD
        )));
    }
    if p.kind != kind {
        return Err(Error::Input(format!(
            "tuple kind is '{}', expected '{kind}'",
            p.kind
        )));
    }
    if p.blocks.len() != p.n {
        return Err(Error::Input(format!(
            "expected {} blocks, got {}",
            p.n,
            p.blocks.len()
        )));
    }
    p.blocks
        .iter()
        .map(|b| matrix_from_json::<T>(p.d, p.width, b))
        .collect()
}

impl<T: Scalar> GroupTuple<T> {
    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(&tuple_blocks_to_json(self, "group"))?)
    }
    pub fn from_json_str(s: &str) -> Result<Self> {
        let p: TupleJson = serde_json::from_str(s)?;
        Self::from_blocks(p.d, p.width, tuple_blocks_from_json(&p, "group")?)
    }
}

impl<T: Scalar> StiefelTuple<T> {
    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(&tuple_blocks_to_json(
            self, "stiefel",
        ))?)
    }
    pub fn from_json_str(s: &str) -> Result<Self> {
        let p: TupleJson = serde_json::from_str(s)?;
        Self::from_blocks(p.d, p.width, tuple_blocks_from_json(&p, "stiefel")?)
    }
}

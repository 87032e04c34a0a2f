//! Numerical tolerances used across the crate.
//!
//! Collected in one place so that every threshold has a stated owner and the
//! test suites can reference the same constants the library enforces.

/// Hermitian symmetry residual allowed on instance construction, relative to
/// the largest block entry: `max_ij |C - C^*|  <=  HERMITIAN_TOL * max(1, |C|_max)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Relative eigenvalue floor for positive semidefiniteness:
/// `lambda_min >= -PSD_TOL * max(lambda_max, 0)`.
pub const PSD_TOL: f64 = 1e-8;

/// Frobenius residual `|T_i T_i^* - I|_F` allowed when a group or Stiefel
/// tuple is constructed from raw blocks.
pub const FEAS_BUILD_TOL: f64 = 1e-8;

/// Looser feasibility screen applied on every objective evaluation; catches
/// callers who mutated a tuple without renormalizing.
pub const FEAS_OBJECTIVE_TOL: f64 = 1e-6;

/// Imaginary mass allowed in the accumulated objective before it is
/// discarded, relative to `max(1, |Re|)`. The objective of a Hermitian
/// instance is real in exact arithmetic.
pub const OBJECTIVE_IMAG_TOL: f64 = 1e-8;

/// SVD acceptance: reconstruction residual `|U S V^* - A|_max` relative to
/// `max(1, sigma_1)`.
pub const SVD_RECONSTRUCT_TOL: f64 = 1e-10;

/// SVD acceptance: orthonormality residual of the computed factors.
pub const SVD_ORTHO_TOL: f64 = 1e-8;

/// A singular value below `RANK_TOL * sigma_1` is treated as zero when
/// deciding whether a polar factor is unique.
pub const RANK_TOL: f64 = 1e-12;

/// Default relative improvement threshold that stops a coordinate-ascent
/// sweep loop.
pub const SOLVER_REL_TOL: f64 = 1e-9;

/// Slack allowed when checking that a monotone trajectory never decreases:
/// `obj_{k+1} >= obj_k - TRAJECTORY_SLACK * max(1, |obj_k|)`.
pub const TRAJECTORY_SLACK: f64 = 1e-9;

/// Upper slack on the measured integral-to-relaxation ratio; the ratio is a
/// quotient of two floating-point maxima and may exceed 1 by rounding only.
pub const GAP_RATIO_SLACK: f64 = 1e-7;

/// Feasibility residual allowed on a diagonal-scaling candidate: entries no
/// more negative than this, and `|sum delta_j^2 - d| <= STAR_FEAS_TOL * d`.
pub const STAR_FEAS_TOL: f64 = 1e-10;

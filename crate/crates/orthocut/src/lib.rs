//! Orthogonal-Cut: semidefinite relaxation and Gaussian rounding for the
//! little Grothendieck problem over orthogonal and unitary groups.
//!
//! Given a positive semidefinite block matrix `C` with `d x d` blocks
//! `C_ij`, the problem is to maximize
//!
//! ```text
//!   sum_ij  Re tr(C_ij^* T_i T_j^*)
//! ```
//!
//! over tuples of group elements `T_i` in `O(d)`, `U(d)`, or more generally
//! over Stiefel frames `T_i T_i^* = I` with `T_i` of size `d x r`. The crate
//! provides:
//!
//! * [`problem`]: the block-PSD instance type, feasible tuples, objective
//!   evaluation, instance builders (random PSD, orthogonal Procrustes,
//!   integrality-gap families), and small-scale brute-force oracles;
//! * [`solver`]: a block-coordinate ascent solver for the Orthogonal-Cut
//!   relaxation (each variable relaxed to a `d x dn` Stiefel frame), plus a
//!   group-valued local ascent used for polishing rounded points;
//! * [`rounding`]: the Gaussian rounding scheme `T_i = polar(X_i R)` with a
//!   single shared Gaussian `R`, best-of-k selection, and ratio statistics;
//! * [`alpha`]: the expected-average-singular-value constants `alpha(d)` and
//!   `alpha(d, r)` that govern the approximation ratio, via Monte Carlo,
//!   closed forms, Laguerre quadrature, and Marchenko-Pastur limits;
//! * [`gap`]: the random instance family whose relaxation-to-integral ratio
//!   approaches `alpha(d)^2`, with per-trial diagnostics.
//!
//! Everything is deterministic given an [`RngSeed`]: Monte Carlo loops
//! derive one child stream per work unit and reduce in index order, so
//! results are bit-identical with or without the `parallel` feature and
//! regardless of thread count.

pub mod alpha;
mod error;
pub mod gap;
pub mod linalg;
mod par;
pub mod problem;
pub mod rounding;
pub mod solver;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::{Complex64, Field, Matrix, RngSeed, Scalar};
pub use par::set_max_threads;

/// Library version, for embedding in run manifests and reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Acceptance gate for the crate: ten end-to-end criteria covering the
//! constants table, quadrature agreement, limits and bounds, the rounding
//! guarantee, the d = 1 exactness chain, the correlation identities, the
//! Stiefel suite, the diagonal-scaling probe, the integrality-gap study, and
//! the solver contract.
//!
//! Each criterion is one test that prints a single
//! `ACCEPTANCE <k> (<label>): PASS|FAIL` line (visible under
//! `--nocapture`, and always visible for failures). Every tolerance, sample
//! count, and seed is pinned here: criterion `k` derives all of its
//! randomness from `RngSeed::new(k, 0)`, so the whole gate is reproducible
//! bit for bit.

use std::f64::consts::PI;
use std::time::Instant;

use orthocut::alpha::{
    alpha_chi_1r, alpha_closed_form, alpha_complex_laguerre, alpha_lower_bound, alpha_mc,
    alpha_star_probe, default_star_candidates, mp_limit, mp_limit_quadrature, phi_rho,
    stiefel_lower_bound,
};
use orthocut::gap::{GapConfig, measure_gap, measure_gap_trial};
use orthocut::linalg::{gaussian_matrix, polar};
use orthocut::problem::{
    BlockPsdMatrix, VariableTuple, brute_force_opt, build_procrustes, build_random_psd,
};
use orthocut::rounding::{RoundingConfig, RoundingTarget, round_best_of, round_once};
use orthocut::solver::{SolveConfig, local_ascent_group, solve_relaxation};
use orthocut::{Complex64, Field, Matrix, RngSeed, Scalar};

// ── pinned tolerances ──────────────────────────────────────────────────────

/// Constants-table agreement with the published 4-decimal values.
const TABLE_DECIMALS_TOL: f64 = 5e-4;
/// Laguerre quadrature vs the exact closed forms, d <= 3.
const LAGUERRE_VS_CLOSED_TOL: f64 = 1e-6;
/// Quadrature evaluation of the large-d limit vs 8/(3 pi).
const MP_LIMIT_TOL: f64 = 1e-8;
/// How close alpha(40) must sit to the large-d limit.
const D40_LIMIT_WINDOW: f64 = 0.02;
/// The squared real constant must beat this (the best previously known
/// guarantee in the orthogonal setting).
const REAL_SQUARED_FLOOR: f64 = 0.35355339059327373; // 1 / (2 sqrt 2)
/// The squared complex constant must beat this.
const COMPLEX_SQUARED_FLOOR: f64 = 0.5;
/// Entrywise window for the Monte Carlo correlation identities.
const ENTRYWISE_TOL: f64 = 5e-3;
/// phi(1) vs the closed-form limit.
const PHI_ONE_TOL: f64 = 1e-6;
/// A trajectory step may go backwards by at most this fraction of the
/// objective's magnitude (roundoff in the sweep accumulation).
const TRAJECTORY_REL_SLACK: f64 = 1e-9;
/// Worst allowed row-orthonormality residual of a returned tuple.
const FEASIBILITY_CAP: f64 = 1e-8;
/// Relative slack for the w_r >= ascent >= rounded dominance chain
/// (covers the relaxation being solved to finite tolerance).
const DOMINANCE_REL_SLACK: f64 = 1e-7;
/// The exactness chain compares the relaxation value against a certified
/// optimum, so its solves run to a much tighter stationarity than the
/// default (the stopping rule bounds per-sweep improvement, not the
/// remaining gap, and the geometric tail can exceed the sweep tolerance
/// a hundredfold).
const SIGN_SOLVE_REL_TOL: f64 = 1e-13;
const SIGN_SOLVE_MAX_SWEEPS: usize = 5_000;
/// Wall-clock budget for the rounding-guarantee criterion.
const GUARANTEE_BUDGET_SECONDS: f64 = 300.0;

// ── pinned sample counts and orders ────────────────────────────────────────

const TABLE_MC_SAMPLES: u64 = 1_000_000;
const WIDE_MC_SAMPLES: u64 = 100_000;
const WIDE_MC_SAMPLES_D20: u64 = 50_000;
const SCAN_MC_SAMPLES: u64 = 20_000;
const D40_MC_SAMPLES: u64 = 2_000;
const IDENTITY_DRAWS: usize = 100_000;
const GUARANTEE_INSTANCES: usize = 20;
const GUARANTEE_DRAWS: usize = 10_000;
const SIGN_INSTANCES: usize = 50;
const SIGN_DRAWS: usize = 2_000;
const SIGN_BITWISE_DRAWS: u64 = 8;
const STAR_CANDIDATES: usize = 20;
const STAR_SAMPLES: u64 = 100_000;
const STIEFEL_ROUNDING_DRAWS: usize = 10_000;
const QUADRATURE_ORDER: usize = 200;
const LAGUERRE_ORDER: usize = 120;

/// All randomness of criterion `k` descends from this seed.
fn seed_for(criterion: u64) -> RngSeed {
    RngSeed::new(criterion, 0)
}

/// Print the one-line verdict and fail the test if anything went wrong.
fn verdict(criterion: usize, label: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("ACCEPTANCE {criterion} ({label}): PASS");
    } else {
        println!(
            "ACCEPTANCE {criterion} ({label}): FAIL — {}",
            failures.join("; ")
        );
    }
    assert!(
        failures.is_empty(),
        "criterion {criterion} ({label}): {}",
        failures.join("; ")
    );
}

// ── 1: constants table ─────────────────────────────────────────────────────

#[test]
fn criterion_01_constants_table() {
    let seed = seed_for(1);
    let mut failures = Vec::new();
    // (d, field, published 4-decimal value)
    let table = [
        (1, Field::Real, 0.7979),
        (2, Field::Real, 0.8102),
        (3, Field::Real, 0.8188),
        (1, Field::Complex, 0.8862),
        (2, Field::Complex, 0.8617),
        (3, Field::Complex, 0.8554),
    ];
    for (case, &(d, field, published)) in table.iter().enumerate() {
        let closed = alpha_closed_form(d, field).unwrap().value;
        if (closed - published).abs() > TABLE_DECIMALS_TOL {
            failures.push(format!(
                "closed form alpha({d}, {field}) = {closed:.6} vs published {published}"
            ));
        }
        let mc = alpha_mc(d, d, field, TABLE_MC_SAMPLES, seed.child(case as u64)).unwrap();
        if (mc.value - closed).abs() > 3.0 * mc.std_error {
            failures.push(format!(
                "mc alpha({d}, {field}) = {:.6} +- {:.1e} vs closed {closed:.6}",
                mc.value, mc.std_error
            ));
        }
    }
    verdict(1, "constants table", failures);
}

// ── 2: laguerre quadrature ─────────────────────────────────────────────────

#[test]
fn criterion_02_laguerre_quadrature() {
    let seed = seed_for(2);
    let mut failures = Vec::new();
    for d in 1..=3 {
        let quad = alpha_complex_laguerre(d, LAGUERRE_ORDER).unwrap().value;
        let closed = alpha_closed_form(d, Field::Complex).unwrap().value;
        if (quad - closed).abs() > LAGUERRE_VS_CLOSED_TOL {
            failures.push(format!(
                "d={d}: quadrature {quad:.12} vs closed {closed:.12}"
            ));
        }
    }
    for (case, &(d, samples)) in [
        (5, WIDE_MC_SAMPLES),
        (10, WIDE_MC_SAMPLES),
        (20, WIDE_MC_SAMPLES_D20),
    ]
    .iter()
    .enumerate()
    {
        let quad = alpha_complex_laguerre(d, LAGUERRE_ORDER).unwrap().value;
        let mc = alpha_mc(d, d, Field::Complex, samples, seed.child(case as u64)).unwrap();
        if (quad - mc.value).abs() > 3.0 * mc.std_error {
            failures.push(format!(
                "d={d}: quadrature {quad:.8} vs mc {:.8} +- {:.1e}",
                mc.value, mc.std_error
            ));
        }
    }
    verdict(2, "laguerre quadrature", failures);
}

// ── 3: limits and bounds ───────────────────────────────────────────────────

#[test]
fn criterion_03_limits_and_bounds() {
    let seed = seed_for(3);
    let mut failures = Vec::new();

    let quad = mp_limit_quadrature(QUADRATURE_ORDER).unwrap();
    if (quad - mp_limit()).abs() > MP_LIMIT_TOL {
        failures.push(format!("limit quadrature {quad:.12} vs {:.12}", mp_limit()));
    }

    for (case, field) in [Field::Real, Field::Complex].into_iter().enumerate() {
        let mc = alpha_mc(40, 40, field, D40_MC_SAMPLES, seed.child(100 + case as u64)).unwrap();
        if (mc.value - mp_limit()).abs() > D40_LIMIT_WINDOW {
            failures.push(format!(
                "alpha(40, {field}) = {:.4} is outside {:.4} +- {D40_LIMIT_WINDOW}",
                mc.value,
                mp_limit()
            ));
        }

        // One MC scan of d = 1..10 serves both the explicit lower bounds and
        // the comparison against the earlier guarantees.
        for d in 1..=10 {
            let est = alpha_mc(
                d,
                d,
                field,
                SCAN_MC_SAMPLES,
                seed.child((case * 10 + d) as u64),
            )
            .unwrap();
            let conservative = est.value - 3.0 * est.std_error;
            let bound = alpha_lower_bound(d, field).unwrap();
            if conservative < bound {
                failures.push(format!(
                    "alpha({d}, {field}) = {:.4} - 3se sits below its lower bound {bound:.4}",
                    est.value
                ));
            }
            let alpha_hat = if d <= 3 {
                alpha_closed_form(d, field).unwrap().value
            } else {
                conservative
            };
            let floor = match field {
                Field::Real => REAL_SQUARED_FLOOR,
                Field::Complex => COMPLEX_SQUARED_FLOOR,
            };
            if alpha_hat * alpha_hat <= floor {
                failures.push(format!(
                    "alpha({d}, {field})^2 = {:.4} does not beat the prior guarantee {floor:.4}",
                    alpha_hat * alpha_hat
                ));
            }
        }
    }
    verdict(3, "limits and bounds", failures);
}

// ── 4: rounding guarantee ──────────────────────────────────────────────────

fn guarantee_cases<T: Scalar>(
    combos: &[(usize, usize)],
    seed: RngSeed,
    failures: &mut Vec<String>,
) {
    for (ci, &(d, n)) in combos.iter().enumerate() {
        let alpha = alpha_closed_form(d, T::FIELD).unwrap().value;
        for inst in 0..GUARANTEE_INSTANCES {
            let s = seed.child(ci as u64).child(inst as u64);
            let c = build_random_psd::<T>(d, n, d * n, s.child(0)).unwrap();
            let (x, report) = solve_relaxation(
                &c,
                &SolveConfig {
                    seed: s.child(1),
                    ..SolveConfig::default()
                },
            )
            .unwrap();
            let cfg = RoundingConfig {
                target: RoundingTarget::Group,
                draws: GUARANTEE_DRAWS,
                seed: s.child(2),
            };
            let (_, _, stats) = round_best_of(&x, &c, &cfg).unwrap();
            // Mean over raw single-draw roundings, relative to the
            // relaxation value.
            let mean_ratio = stats.mean / report.objective;
            let se_ratio = stats.se / report.objective;
            let floor = alpha * alpha - 3.0 * se_ratio;
            if mean_ratio < floor {
                failures.push(format!(
                    "{} d={d} n={n} instance {inst}: mean ratio {mean_ratio:.5} < {floor:.5}",
                    T::FIELD
                ));
            }
        }
    }
}

#[test]
fn criterion_04_rounding_guarantee() {
    let started = Instant::now();
    let seed = seed_for(4);
    let mut failures = Vec::new();
    guarantee_cases::<f64>(&[(1, 10), (2, 8), (3, 6)], seed.child(1), &mut failures);
    guarantee_cases::<Complex64>(&[(1, 10), (2, 8)], seed.child(2), &mut failures);
    let elapsed = started.elapsed().as_secs_f64();
    if elapsed > GUARANTEE_BUDGET_SECONDS {
        failures.push(format!(
            "took {elapsed:.0}s, budget is {GUARANTEE_BUDGET_SECONDS:.0}s"
        ));
    }
    verdict(4, "rounding guarantee", failures);
}

// ── 5: d = 1 exactness chain ───────────────────────────────────────────────

#[test]
fn criterion_05_sign_chain() {
    let seed = seed_for(5);
    let mut failures = Vec::new();
    for inst in 0..SIGN_INSTANCES {
        let s = seed.child(inst as u64);
        let c = build_random_psd::<f64>(1, 10, 10, s.child(0)).unwrap();
        let oracle = brute_force_opt(&c, 0, s.child(1)).unwrap();
        assert!(oracle.certified, "d = 1 enumeration must be exact");
        let solve_cfg = SolveConfig {
            rel_tol: SIGN_SOLVE_REL_TOL,
            max_sweeps: SIGN_SOLVE_MAX_SWEEPS,
            seed: s.child(2),
            ..SolveConfig::default()
        };
        let (x, report) = solve_relaxation(&c, &solve_cfg).unwrap();
        let w_r = report.objective;
        if oracle.value > w_r * (1.0 + DOMINANCE_REL_SLACK) {
            failures.push(format!(
                "instance {inst}: exact optimum {:.9} exceeds relaxation {w_r:.9}",
                oracle.value
            ));
        }

        let cfg = RoundingConfig {
            target: RoundingTarget::Group,
            draws: SIGN_DRAWS,
            seed: s.child(3),
        };
        let (_, _, stats) = round_best_of(&x, &c, &cfg).unwrap();
        let floor = (2.0 / PI) * w_r - 3.0 * stats.se;
        if stats.mean < floor {
            failures.push(format!(
                "instance {inst}: mean rounded {:.6} < (2/pi) w_r - 3se = {floor:.6}",
                stats.mean
            ));
        }

        // The generic rounding at d = 1 must literally be sign rounding:
        // recompute each draw's shared Gaussian vector and compare the
        // blocks bitwise against the signs of the inner products.
        for draw in 0..SIGN_BITWISE_DRAWS {
            let draw_cfg = RoundingConfig {
                target: RoundingTarget::Group,
                draws: 1,
                seed: s.child(4).child(draw),
            };
            let rounded = round_once(&x, &draw_cfg).unwrap();
            let r = gaussian_matrix::<f64>(x.m(), 1, 1.0, draw_cfg.seed.child(0)).unwrap();
            for (i, xi) in x.blocks().iter().enumerate() {
                let dot = xi.mul(&r).get(0, 0);
                let sign = dot / dot.abs();
                if rounded.blocks()[i].get(0, 0).to_bits() != sign.to_bits() {
                    failures.push(format!(
                        "instance {inst} draw {draw} block {i}: rounding is not bitwise sign(x . r)"
                    ));
                }
            }
        }
    }
    verdict(5, "sign-rounding chain", failures);
}

// ── 6: correlation identities ──────────────────────────────────────────────

fn max_entry_deviation<T: Scalar>(mean: &Matrix<T>, target: &Matrix<T>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..mean.rows() {
        for j in 0..mean.cols() {
            let dz = mean.get(i, j) - target.get(i, j);
            worst = worst.max(dz.abs());
        }
    }
    worst
}

/// `E polar(G) G^* = alpha(d) I` over Gaussian `G` with entry variance `1/d`.
fn identity_deviation<T: Scalar>(d: usize, seed: RngSeed) -> f64 {
    let alpha = alpha_closed_form(d, T::FIELD).unwrap().value;
    let mut acc = Matrix::<T>::zeros(d, d);
    for k in 0..IDENTITY_DRAWS {
        let g = gaussian_matrix::<T>(d, d, 1.0 / d as f64, seed.child(k as u64)).unwrap();
        acc.add_assign(&polar(&g).unwrap().factor.mul_adjoint(&g));
    }
    let mean = acc.scaled(1.0 / IDENTITY_DRAWS as f64);
    let mut target = Matrix::<T>::zeros(d, d);
    for i in 0..d {
        target.set(i, i, T::from_re(alpha));
    }
    max_entry_deviation(&mean, &target)
}

/// `E polar(M R) (N R)^* = alpha(d) M N^*` for feasible `M`, `N` and a
/// shared Gaussian `R` — the cross-block correlation the rounding guarantee
/// stands on.
fn cross_deviation<T: Scalar>(d: usize, seed: RngSeed) -> f64 {
    let alpha = alpha_closed_form(d, T::FIELD).unwrap().value;
    let m = 2 * d;
    let m_mat = polar(&gaussian_matrix::<T>(d, m, 1.0, seed.child(1_000_000)).unwrap())
        .unwrap()
        .factor;
    let n_mat = polar(&gaussian_matrix::<T>(d, m, 1.0, seed.child(1_000_001)).unwrap())
        .unwrap()
        .factor;
    let mut acc = Matrix::<T>::zeros(d, d);
    for k in 0..IDENTITY_DRAWS {
        let r = gaussian_matrix::<T>(m, d, 1.0 / d as f64, seed.child(k as u64)).unwrap();
        let projected = polar(&m_mat.mul(&r)).unwrap().factor;
        acc.add_assign(&projected.mul_adjoint(&n_mat.mul(&r)));
    }
    let mean = acc.scaled(1.0 / IDENTITY_DRAWS as f64);
    let target = m_mat.mul_adjoint(&n_mat).scaled(alpha);
    max_entry_deviation(&mean, &target)
}

#[test]
fn criterion_06_correlation_identities() {
    let seed = seed_for(6);
    let mut failures = Vec::new();
    for (case, d) in [2usize, 3].into_iter().enumerate() {
        let dev_r = identity_deviation::<f64>(d, seed.child(4 * case as u64));
        let dev_c = identity_deviation::<Complex64>(d, seed.child(4 * case as u64 + 1));
        let cross_r = cross_deviation::<f64>(d, seed.child(4 * case as u64 + 2));
        let cross_c = cross_deviation::<Complex64>(d, seed.child(4 * case as u64 + 3));
        for (label, dev) in [
            ("real identity", dev_r),
            ("complex identity", dev_c),
            ("real cross", cross_r),
            ("complex cross", cross_c),
        ] {
            if dev > ENTRYWISE_TOL {
                failures.push(format!("d={d} {label}: worst entry deviation {dev:.2e}"));
            }
        }
    }
    verdict(6, "correlation identities", failures);
}

// ── 7: stiefel suite ───────────────────────────────────────────────────────

#[test]
fn criterion_07_stiefel_suite() {
    let seed = seed_for(7);
    let mut failures = Vec::new();

    for (case, r) in [2usize, 5, 100].into_iter().enumerate() {
        let chi = alpha_chi_1r(r).unwrap().value;
        let mc = alpha_mc(1, r, Field::Real, SCAN_MC_SAMPLES, seed.child(case as u64)).unwrap();
        if (chi - mc.value).abs() > 3.0 * mc.std_error {
            failures.push(format!(
                "alpha(1, {r}): chi form {chi:.6} vs mc {:.6} +- {:.1e}",
                mc.value, mc.std_error
            ));
        }
    }

    for (case, (d, r)) in [(2usize, 8usize), (3, 12)].into_iter().enumerate() {
        let mc = alpha_mc(
            d,
            r,
            Field::Real,
            SCAN_MC_SAMPLES,
            seed.child(10 + case as u64),
        )
        .unwrap();
        let bound = stiefel_lower_bound(d, r).unwrap();
        if mc.value + 3.0 * mc.std_error < bound {
            failures.push(format!(
                "alpha({d}, {r}) = {:.4} violates the 1 - sqrt(d/r) bound {bound:.4}",
                mc.value
            ));
        }
    }

    // Rounding to a genuinely wider frame: (d, r, n) = (2, 4, 8).
    {
        let s = seed.child(20);
        let (d, r, n) = (2, 4, 8);
        let alpha = alpha_mc(d, r, Field::Real, WIDE_MC_SAMPLES, s.child(0)).unwrap();
        let c = build_random_psd::<f64>(d, n, d * n, s.child(1)).unwrap();
        let (x, report) = solve_relaxation(
            &c,
            &SolveConfig {
                seed: s.child(2),
                ..SolveConfig::default()
            },
        )
        .unwrap();
        let cfg = RoundingConfig {
            target: RoundingTarget::Stiefel { r },
            draws: STIEFEL_ROUNDING_DRAWS,
            seed: s.child(3),
        };
        let (_, _, stats) = round_best_of(&x, &c, &cfg).unwrap();
        let mean_ratio = stats.mean / report.objective;
        // The guarantee constant is itself estimated, so both uncertainties
        // enter the slack: the draw mean's, and (delta method) the constant's.
        let se = ((stats.se / report.objective).powi(2)
            + (2.0 * alpha.value * alpha.std_error).powi(2))
        .sqrt();
        let floor = alpha.value * alpha.value - 3.0 * se;
        if mean_ratio < floor {
            failures.push(format!(
                "stiefel rounding ({d}, {r}, {n}): mean ratio {mean_ratio:.5} < {floor:.5}"
            ));
        }
    }

    let phi1 = phi_rho(1.0, QUADRATURE_ORDER).unwrap();
    if (phi1 - mp_limit()).abs() > PHI_ONE_TOL {
        failures.push(format!("phi(1) = {phi1:.9} vs {:.9}", mp_limit()));
    }
    let rhos = [1.0, 1.5, 2.0, 3.0, 5.0];
    let phis: Vec<f64> = rhos
        .iter()
        .map(|&r| phi_rho(r, QUADRATURE_ORDER).unwrap())
        .collect();
    for w in phis.windows(2) {
        if w[1] < w[0] {
            failures.push(format!("phi is not nondecreasing: {phis:?}"));
            break;
        }
    }
    verdict(7, "stiefel suite", failures);
}

// ── 8: diagonal-scaling probe ──────────────────────────────────────────────

#[test]
fn criterion_08_star_probe() {
    let seed = seed_for(8);
    let mut failures = Vec::new();
    for d in [2usize, 3] {
        let alpha = alpha_closed_form(d, Field::Real).unwrap().value;
        let candidates =
            default_star_candidates(d, STAR_CANDIDATES - d, seed.child(d as u64)).unwrap();
        assert_eq!(candidates.len(), STAR_CANDIDATES);
        let probe =
            alpha_star_probe(d, &candidates, STAR_SAMPLES, seed.child(10 + d as u64)).unwrap();
        if probe.argmax != 0 {
            failures.push(format!(
                "d={d}: argmax is candidate {} ({:?}), not the identity",
                probe.argmax, probe.candidates[probe.argmax]
            ));
        }
        for (k, cand) in probe.candidates.iter().enumerate() {
            let dist_sq: f64 = cand.iter().map(|&x| (x - 1.0) * (x - 1.0)).sum();
            if dist_sq.sqrt() <= 0.5 {
                continue;
            }
            if probe.values[k] >= alpha - 3.0 * probe.std_errors[k] {
                failures.push(format!(
                    "d={d} candidate {k} ({cand:?}): value {:.5} is not clearly below alpha = {alpha:.5}",
                    probe.values[k]
                ));
            }
        }
    }
    verdict(8, "diagonal-scaling probe", failures);
}

// ── 9: integrality gap ─────────────────────────────────────────────────────

#[test]
fn criterion_09_integrality_gap() {
    let seed = seed_for(9);
    let mut failures = Vec::new();

    let cfg = GapConfig {
        d: 1,
        p: 50,
        n: 2000,
        field: Field::Real,
        seed: seed.child(1),
        trials: 5,
    };
    let reports = measure_gap::<f64>(&cfg).unwrap();
    let mean_ratio = reports.iter().map(|r| r.ratio_empirical).sum::<f64>() / reports.len() as f64;
    let (below, above) = (reports[0].bands.ratio_below, reports[0].bands.ratio_above);
    let limit = 2.0 / PI;
    if mean_ratio < limit - below || mean_ratio > limit + above {
        failures.push(format!(
            "d=1 mean ratio {mean_ratio:.4} outside [{:.4}, {:.4}]",
            limit - below,
            limit + above
        ));
    }
    let alpha1 = alpha_closed_form(1, Field::Real).unwrap().value;
    for r in &reports {
        if r.ratio_empirical > 1.0 + DOMINANCE_REL_SLACK {
            failures.push(format!(
                "trial {}: ratio {} exceeds 1",
                r.trial, r.ratio_empirical
            ));
        }
        if r.padded_polar_objective < r.padded_floor() {
            failures.push(format!(
                "trial {}: relaxation floor diagnostic {:.4} below {:.4}",
                r.trial,
                r.padded_polar_objective,
                r.padded_floor()
            ));
        }
        if r.alignment_norm_sq > r.alignment_cap(alpha1) {
            failures.push(format!(
                "trial {}: alignment diagnostic {:.4} above cap {:.4}",
                r.trial,
                r.alignment_norm_sq,
                r.alignment_cap(alpha1)
            ));
        }
    }

    // d = 2 has no exact group optimum available, so the check stays
    // one-sided: the best group value found must not exceed its share.
    let cfg2 = GapConfig {
        d: 2,
        p: 30,
        n: 800,
        field: Field::Real,
        seed: seed.child(2),
        trials: 1,
    };
    let r2 = measure_gap_trial::<f64>(&cfg2, 0).unwrap();
    let alpha2 = alpha_closed_form(2, Field::Real).unwrap().value;
    let cap = alpha2 * alpha2 + r2.bands.ratio_above;
    if r2.ratio_empirical > cap {
        failures.push(format!(
            "d=2 ratio {:.4} exceeds cap {cap:.4}",
            r2.ratio_empirical
        ));
    }
    if r2.ratio_empirical > 1.0 + DOMINANCE_REL_SLACK {
        failures.push(format!("d=2 ratio {} exceeds 1", r2.ratio_empirical));
    }
    verdict(9, "integrality gap", failures);
}

// ── 10: solver contract ────────────────────────────────────────────────────

fn solver_contract_case<T: Scalar>(
    label: &str,
    c: &BlockPsdMatrix<T>,
    seed: RngSeed,
    failures: &mut Vec<String>,
) {
    let (x, report) = solve_relaxation(
        c,
        &SolveConfig {
            seed: seed.child(0),
            ..SolveConfig::default()
        },
    )
    .unwrap();
    for (t, w) in report.trajectory.windows(2).enumerate() {
        if w[1] < w[0] - TRAJECTORY_REL_SLACK * w[0].abs() {
            failures.push(format!(
                "{label}: trajectory decreases at sweep {}: {} -> {}",
                t + 1,
                w[0],
                w[1]
            ));
            break;
        }
    }
    if report.feasibility_residual > FEASIBILITY_CAP {
        failures.push(format!(
            "{label}: feasibility residual {:.2e} above {FEASIBILITY_CAP:.0e}",
            report.feasibility_residual
        ));
    }

    let cfg = RoundingConfig {
        target: RoundingTarget::Group,
        draws: 32,
        seed: seed.child(1),
    };
    let (rounded, rounded_value, _) = round_best_of(&x, c, &cfg).unwrap();
    let ascent_cfg = SolveConfig {
        restarts: 1,
        seed: seed.child(2),
        ..SolveConfig::default()
    };
    let (_, ascent) = local_ascent_group(c, &rounded, &ascent_cfg).unwrap();
    let w_r = report.objective;
    let slack = DOMINANCE_REL_SLACK * w_r.abs().max(1.0);
    if !(ascent.objective >= rounded_value - slack && w_r >= ascent.objective - slack) {
        failures.push(format!(
            "{label}: dominance broken: w_r {w_r:.9} vs ascent {:.9} vs rounded {rounded_value:.9}",
            ascent.objective
        ));
    }
}

#[test]
fn criterion_10_solver_contract() {
    let seed = seed_for(10);
    let mut failures = Vec::new();

    for (case, &(d, n)) in [(1usize, 10usize), (2, 8), (3, 6)].iter().enumerate() {
        let s = seed.child(case as u64);
        let c = build_random_psd::<f64>(d, n, d * n, s.child(10)).unwrap();
        solver_contract_case(&format!("random real d={d} n={n}"), &c, s, &mut failures);
    }
    for (case, &(d, n)) in [(1usize, 10usize), (2, 8)].iter().enumerate() {
        let s = seed.child(10 + case as u64);
        let c = build_random_psd::<Complex64>(d, n, d * n, s.child(10)).unwrap();
        solver_contract_case(&format!("random complex d={d} n={n}"), &c, s, &mut failures);
    }
    for (case, &(d, p, n)) in [(1usize, 8usize, 24usize), (2, 6, 12)].iter().enumerate() {
        let s = seed.child(20 + case as u64);
        let gap_cfg = GapConfig {
            d,
            p,
            n,
            field: Field::Real,
            seed: s.child(10),
            trials: 1,
        };
        let c = orthocut::gap::build_gap_instance::<f64>(&gap_cfg).unwrap();
        solver_contract_case(
            &format!("gap family d={d} p={p} n={n}"),
            &c,
            s,
            &mut failures,
        );
    }
    {
        // Rotated copies of one planted cloud set.
        let s = seed.child(30);
        let base = gaussian_matrix::<f64>(2, 5, 1.0, s.child(10)).unwrap();
        let clouds: Vec<Matrix<f64>> = (0..4)
            .map(|i| {
                let q = polar(&gaussian_matrix::<f64>(2, 2, 1.0, s.child(20 + i)).unwrap())
                    .unwrap()
                    .factor;
                q.mul(&base)
            })
            .collect();
        let c = build_procrustes(&clouds).unwrap();
        solver_contract_case("procrustes alignment", &c, s, &mut failures);
    }
    verdict(10, "solver contract", failures);
}

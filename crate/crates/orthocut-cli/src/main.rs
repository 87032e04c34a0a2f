//! Command-line driver: solve relaxations, round solutions, tabulate
//! approximation constants, run integrality-gap studies, and align point
//! clouds, with reproducible seeds and machine-readable outputs.
//!
//! Every run writes a manifest (subcommand, full config echo, seed, library
//! version, wall clock, output paths) so results can be regenerated exactly.
//! Exit codes: 0 success; 2 malformed input (parse errors, bad shapes, out
//! of capacity); 3 well-formed but mathematically invalid input or an
//! internal numerical failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use orthocut::alpha::{
    AlphaEstimate, Method, alpha_chi_1r, alpha_closed_form, alpha_complex_laguerre, alpha_mc,
    phi_rho,
};
use orthocut::gap::{GapConfig, GapReport, measure_gap};
use orthocut::problem::{
    BlockPsdMatrix, StiefelTuple, VariableTuple, build_procrustes, json_field,
};
use orthocut::rounding::{RoundingConfig, RoundingTarget, round_best_of};
use orthocut::solver::{InitKind, SolveConfig, local_ascent_group, solve_relaxation};
use orthocut::{Error, Field, Matrix, RngSeed, Scalar};

#[derive(Parser, Serialize)]
#[command(
    name = "orthocut",
    version,
    about = "Orthogonal-Cut relaxation, Gaussian rounding, and approximation-constant studies",
    propagate_version = true
)]
struct Cli {
    /// Root RNG seed. Everything a subcommand samples derives from it.
    #[arg(long, global = true, env = "ORTHOCUT_SEED", default_value_t = 0)]
    seed: u64,
    /// RNG stream selector paired with --seed.
    #[arg(long, global = true, default_value_t = 0)]
    stream: u64,
    /// Worker-thread cap for parallel trials/draws (0 = one per core).
    /// Outputs are identical for every value.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Where to write the run manifest.
    #[arg(long, global = true, default_value = "orthocut-manifest.json")]
    manifest: PathBuf,
    #[command(subcommand)]
    #[serde(skip)]
    cmd: Cmd,
}

#[derive(Subcommand, Serialize)]
enum Cmd {
    /// Solve the wide relaxation for an instance file.
    Solve(SolveArgs),
    /// Round a relaxation solution to group or Stiefel variables.
    Round(RoundArgs),
    /// Tabulate approximation constants as CSV on stdout.
    Alpha(AlphaArgs),
    /// Measure the relaxation-vs-group ratio on random Gram instances,
    /// as CSV on stdout.
    Gap(GapArgs),
    /// Simultaneously align labeled point clouds (full pipeline).
    Procrustes(ProcrustesArgs),
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Solve(_) => "solve",
            Cmd::Round(_) => "round",
            Cmd::Alpha(_) => "alpha",
            Cmd::Gap(_) => "gap",
            Cmd::Procrustes(_) => "procrustes",
        }
    }
}

#[derive(Args, Serialize)]
struct SolveArgs {
    /// Instance JSON file ({field, d, n, blocks}).
    instance: PathBuf,
    /// Solution tuple output (default: <instance>.solution.json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solve report output (default: <instance>.report.json).
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    max_sweeps: usize,
    /// Stop when a sweep improves the objective by less than this fraction
    /// of its magnitude.
    #[arg(long, default_value_t = 1e-9)]
    rel_tol: f64,
    #[arg(long, default_value_t = 3)]
    restarts: usize,
    /// Starting point for each restart.
    #[arg(long, value_enum, default_value_t = InitArg::Random)]
    init: InitArg,
    /// Visit blocks in a fresh seeded random order each sweep.
    #[arg(long)]
    permute: bool,
}

#[derive(Args, Serialize)]
struct RoundArgs {
    /// Relaxation solution file (a stiefel tuple).
    solution: PathBuf,
    /// The instance the solution belongs to.
    instance: PathBuf,
    /// Rounding target: `group` or `stiefel:<r>`.
    #[arg(long, value_parser = parse_target, default_value = "group")]
    target: RoundingTarget,
    /// Independent Gaussian draws; the best by objective is kept.
    #[arg(long, default_value_t = 32)]
    draws: usize,
    /// Rounded tuple output (default: <solution>.rounded.json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Draw statistics output (default: <solution>.stats.json).
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct AlphaArgs {
    /// Block dimension(s), comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    d: Vec<usize>,
    /// Frame width(s), comma-separated; every (d, r) pair with r >= d is
    /// tabulated. Defaults to r = d.
    #[arg(long, value_delimiter = ',')]
    r: Vec<usize>,
    #[arg(long, value_enum, default_value_t = FieldArg::Real)]
    field: FieldArg,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Monte Carlo draws per row (mc only).
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Quadrature order (laguerre and phi only).
    #[arg(long, default_value_t = 120)]
    order: usize,
    /// Also write the CSV to a file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct GapArgs {
    /// Block dimension.
    #[arg(long)]
    d: usize,
    /// Factor aspect: instances concentrate the relaxation value near d/p.
    #[arg(long)]
    p: usize,
    /// Number of blocks.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = FieldArg::Real)]
    field: FieldArg,
    /// Also write the CSV to a file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ProcrustesArgs {
    /// Point-cloud CSV with header cloud_id,point_id,x_1,...,x_d.
    clouds: PathBuf,
    /// Rounding draws.
    #[arg(long, default_value_t = 32)]
    draws: usize,
    /// Alignments output, one rotation per cloud
    /// (default: <clouds>.alignments.json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Pipeline report output (default: <clouds>.report.json).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum InitArg {
    Random,
    IdentityPad,
}

impl From<InitArg> for InitKind {
    fn from(v: InitArg) -> Self {
        match v {
            InitArg::Random => InitKind::Random,
            InitArg::IdentityPad => InitKind::IdentityPad,
        }
    }
}

#[derive(Copy, Clone, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FieldArg {
    Real,
    Complex,
}

impl From<FieldArg> for Field {
    fn from(v: FieldArg) -> Self {
        match v {
            FieldArg::Real => Field::Real,
            FieldArg::Complex => Field::Complex,
        }
    }
}

#[derive(Copy, Clone, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MethodArg {
    /// Monte Carlo over Gaussian draws.
    Mc,
    /// Exact closed forms (d <= 3 at r = d, or d = 1 real at any r).
    Closed,
    /// Laguerre-polynomial quadrature (complex field, r = d).
    Laguerre,
    /// Large-d limit at aspect ratio r/d via the Marchenko-Pastur law.
    Phi,
}

fn parse_target(s: &str) -> Result<RoundingTarget, String> {
    if s == "group" {
        return Ok(RoundingTarget::Group);
    }
    if let Some(rest) = s.strip_prefix("stiefel:") {
        let r = rest
            .parse()
            .map_err(|_| format!("bad stiefel width '{rest}'"))?;
        return Ok(RoundingTarget::Stiefel { r });
    }
    Err(format!("expected 'group' or 'stiefel:<r>', got '{s}'"))
}

// ── failure plumbing ───────────────────────────────────────────────────────

/// A diagnostic plus the process exit code it maps to. Malformed input is 2,
/// mathematically invalid input or numerical failure is 3.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Shape(_)
            | Error::Input(_)
            | Error::Capacity(_)
            | Error::Unsupported(_)
            | Error::Domain(_)
            | Error::Json(_) => 2,
            Error::Infeasible(_)
            | Error::NotHermitian { .. }
            | Error::NotPsd { .. }
            | Error::Numerical(_) => 3,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        msg: format!("cannot read {}: {e}", path.display()),
    })
}

fn write_file(path: &Path, contents: &str, outputs: &mut Vec<String>) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure {
        code: 2,
        msg: format!("cannot write {}: {e}", path.display()),
    })?;
    outputs.push(path.display().to_string());
    Ok(())
}

/// `foo.json` -> `foo.<suffix>.json` next to the input.
fn derived_path(input: &Path, suffix: &str) -> PathBuf {
    input.with_extension(format!("{suffix}.json"))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::from(Error::from(e)))
}

// ── manifest ───────────────────────────────────────────────────────────────

#[derive(Serialize)]
struct RunManifest {
    subcommand: &'static str,
    config: serde_json::Value,
    seed: RngSeed,
    jobs: usize,
    library_version: &'static str,
    wall_clock_seconds: f64,
    outputs: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = RngSeed::new(cli.seed, cli.stream);
    if let Err(e) = orthocut::set_max_threads(cli.jobs) {
        eprintln!("orthocut: {e}");
        return ExitCode::from(2);
    }

    let config = match serde_json::to_value(&cli.cmd) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("orthocut: cannot echo config: {e}");
            return ExitCode::from(2);
        }
    };
    let started = Instant::now();
    let mut outputs = Vec::new();
    let result = match &cli.cmd {
        Cmd::Solve(args) => cmd_solve(args, seed, &mut outputs),
        Cmd::Round(args) => cmd_round(args, seed, &mut outputs),
        Cmd::Alpha(args) => cmd_alpha(args, seed, &mut outputs),
        Cmd::Gap(args) => cmd_gap(args, seed, &mut outputs),
        Cmd::Procrustes(args) => cmd_procrustes(args, seed, &mut outputs),
    };
    if let Err(f) = result {
        eprintln!("orthocut: {}", f.msg);
        return ExitCode::from(f.code);
    }

    let manifest = RunManifest {
        subcommand: cli.cmd.name(),
        config,
        seed,
        jobs: cli.jobs,
        library_version: orthocut::VERSION,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        outputs: outputs.clone(),
    };
    let json = match to_json(&manifest) {
        Ok(j) => j,
        Err(f) => {
            eprintln!("orthocut: {}", f.msg);
            return ExitCode::from(f.code);
        }
    };
    if let Err(f) = write_file(&cli.manifest, &json, &mut outputs) {
        eprintln!("orthocut: {}", f.msg);
        return ExitCode::from(f.code);
    }
    ExitCode::SUCCESS
}

// ── solve ──────────────────────────────────────────────────────────────────

fn cmd_solve(args: &SolveArgs, seed: RngSeed, outputs: &mut Vec<String>) -> Result<(), Failure> {
    let text = read_file(&args.instance)?;
    match json_field(&text).map_err(Failure::from)? {
        Field::Real => solve_typed::<f64>(args, seed, &text, outputs),
        Field::Complex => solve_typed::<Complex64>(args, seed, &text, outputs),
    }
}

fn solve_typed<T: Scalar>(
    args: &SolveArgs,
    seed: RngSeed,
    text: &str,
    outputs: &mut Vec<String>,
) -> Result<(), Failure> {
    let c = BlockPsdMatrix::<T>::from_json_str(text)?;
    let cfg = SolveConfig {
        max_sweeps: args.max_sweeps,
        rel_tol: args.rel_tol,
        restarts: args.restarts,
        init: args.init.into(),
        permute: args.permute,
        seed,
    };
    let (x, report) = solve_relaxation(&c, &cfg)?;

    let out = args
        .out
        .clone()
        .unwrap_or_else(|| derived_path(&args.instance, "solution"));
    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| derived_path(&args.instance, "report"));
    write_file(&out, &x.to_json_string()?, outputs)?;
    write_file(&report_path, &to_json(&report)?, outputs)?;
    println!(
        "objective {:.17} ({} sweeps, {})",
        report.objective,
        report.sweeps,
        if report.converged {
            "converged"
        } else {
            "sweep budget exhausted"
        }
    );
    println!("solution -> {}", out.display());
    println!("report -> {}", report_path.display());
    Ok(())
}

// ── round ──────────────────────────────────────────────────────────────────

fn cmd_round(args: &RoundArgs, seed: RngSeed, outputs: &mut Vec<String>) -> Result<(), Failure> {
    let solution = read_file(&args.solution)?;
    let instance = read_file(&args.instance)?;
    let field = json_field(&solution).map_err(Failure::from)?;
    if field != json_field(&instance).map_err(Failure::from)? {
        return Err(Failure {
            code: 2,
            msg: "solution and instance disagree on the scalar field".into(),
        });
    }
    match field {
        Field::Real => round_typed::<f64>(args, seed, &solution, &instance, outputs),
        Field::Complex => round_typed::<Complex64>(args, seed, &solution, &instance, outputs),
    }
}

fn round_typed<T: Scalar>(
    args: &RoundArgs,
    seed: RngSeed,
    solution: &str,
    instance: &str,
    outputs: &mut Vec<String>,
) -> Result<(), Failure> {
    let x = StiefelTuple::<T>::from_json_str(solution)?;
    let c = BlockPsdMatrix::<T>::from_json_str(instance)?;
    let cfg = RoundingConfig {
        target: args.target,
        draws: args.draws,
        seed,
    };
    let (rounded, value, stats) = round_best_of(&x, &c, &cfg)?;

    let out = args
        .out
        .clone()
        .unwrap_or_else(|| derived_path(&args.solution, "rounded"));
    let stats_path = args
        .stats
        .clone()
        .unwrap_or_else(|| derived_path(&args.solution, "stats"));
    write_file(&out, &rounded.to_json_string()?, outputs)?;
    write_file(&stats_path, &to_json(&stats)?, outputs)?;
    println!(
        "best objective {:.17} over {} draws (mean {:.17})",
        value, stats.draws, stats.mean
    );
    println!("rounded -> {}", out.display());
    println!("stats -> {}", stats_path.display());
    Ok(())
}

// ── alpha ──────────────────────────────────────────────────────────────────

const ALPHA_CSV_HEADER: &str = "d,r,field,method,value,se,samples,seed";

fn cmd_alpha(args: &AlphaArgs, seed: RngSeed, outputs: &mut Vec<String>) -> Result<(), Failure> {
    let field: Field = args.field.into();
    let pairs: Vec<(usize, usize)> = if args.r.is_empty() {
        args.d.iter().map(|&d| (d, d)).collect()
    } else {
        args.d
            .iter()
            .flat_map(|&d| args.r.iter().map(move |&r| (d, r)))
            .filter(|&(d, r)| r >= d)
            .collect()
    };
    if pairs.is_empty() {
        return Err(Failure {
            code: 2,
            msg: "no (d, r) pair with r >= d requested".into(),
        });
    }

    let mut csv = String::from(ALPHA_CSV_HEADER);
    csv.push('\n');
    for (row, &(d, r)) in pairs.iter().enumerate() {
        // Each row gets its own child stream so rows are independent and the
        // table as a whole is reproducible from the root seed.
        let row_seed = seed.child(row as u64);
        let est = alpha_row(args, d, r, field, row_seed)?;
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}/{}",
            est.d,
            est.r,
            est.field,
            est.method,
            est.value,
            est.std_error,
            est.samples,
            row_seed.seed,
            row_seed.stream
        )
        .expect("writing to a String cannot fail");
    }
    print!("{csv}");
    if let Some(out) = &args.out {
        write_file(out, &csv, outputs)?;
    }
    Ok(())
}

fn alpha_row(
    args: &AlphaArgs,
    d: usize,
    r: usize,
    field: Field,
    row_seed: RngSeed,
) -> Result<AlphaEstimate, Failure> {
    let est = match args.method {
        MethodArg::Mc => alpha_mc(d, r, field, args.samples, row_seed)?,
        MethodArg::Closed => {
            if r == d {
                alpha_closed_form(d, field)?
            } else if d == 1 && field == Field::Real {
                alpha_chi_1r(r)?
            } else {
                return Err(Failure::from(Error::Unsupported(format!(
                    "closed forms cover r = d <= 3 and (d = 1, any r) over the reals; \
                     got d = {d}, r = {r}, field = {field}"
                ))));
            }
        }
        MethodArg::Laguerre => {
            if field != Field::Complex {
                return Err(Failure::from(Error::Unsupported(
                    "laguerre quadrature applies to the complex field".into(),
                )));
            }
            if r != d {
                return Err(Failure::from(Error::Unsupported(format!(
                    "laguerre quadrature computes square frames (r = d); got d = {d}, r = {r}"
                ))));
            }
            alpha_complex_laguerre(d, args.order)?
        }
        MethodArg::Phi => {
            let value = phi_rho(r as f64 / d as f64, args.order)?;
            AlphaEstimate {
                value,
                method: Method::MpLimit,
                samples: 0,
                std_error: 0.0,
                d,
                r,
                field,
            }
        }
    };
    Ok(est)
}

// ── gap ────────────────────────────────────────────────────────────────────

fn cmd_gap(args: &GapArgs, seed: RngSeed, outputs: &mut Vec<String>) -> Result<(), Failure> {
    let cfg = GapConfig {
        d: args.d,
        p: args.p,
        n: args.n,
        field: args.field.into(),
        seed,
        trials: args.trials,
    };
    let reports = match cfg.field {
        Field::Real => measure_gap::<f64>(&cfg)?,
        Field::Complex => measure_gap::<Complex64>(&cfg)?,
    };
    let mut csv = String::from(GapReport::csv_header());
    csv.push('\n');
    for r in &reports {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    print!("{csv}");
    if let Some(out) = &args.out {
        write_file(out, &csv, outputs)?;
    }
    Ok(())
}

// ── procrustes ─────────────────────────────────────────────────────────────

#[derive(Serialize)]
struct ProcrustesReport {
    /// Point dimension.
    d: usize,
    /// Points per cloud.
    k: usize,
    /// Number of clouds.
    n: usize,
    cloud_ids: Vec<String>,
    sdp_objective: f64,
    rounded_objective: f64,
    /// rounded / sdp.
    ratio: f64,
    /// `sum_ij ||O_i^T A_i - O_j^T A_j||_F^2` over all ordered pairs;
    /// near zero iff the clouds are simultaneously alignable.
    total_misalignment: f64,
    draws: usize,
    seed: RngSeed,
}

fn cmd_procrustes(
    args: &ProcrustesArgs,
    seed: RngSeed,
    outputs: &mut Vec<String>,
) -> Result<(), Failure> {
    let text = read_file(&args.clouds)?;
    let (ids, clouds) = parse_clouds(&text)?;
    let c = build_procrustes(&clouds)?;
    let (d, k, n) = (clouds[0].rows(), clouds[0].cols(), clouds.len());

    let solve_cfg = SolveConfig {
        seed: seed.child(0),
        ..SolveConfig::default()
    };
    let (x, solve_report) = solve_relaxation(&c, &solve_cfg)?;
    let round_cfg = RoundingConfig {
        target: RoundingTarget::Group,
        draws: args.draws,
        seed: seed.child(1),
    };
    let (rounded, _, _) = round_best_of(&x, &c, &round_cfg)?;
    let ascent_cfg = SolveConfig {
        restarts: 1,
        ..solve_cfg
    };
    let (group, ascent_report) = local_ascent_group(&c, &rounded, &ascent_cfg)?;

    let mut total_misalignment = 0.0;
    let aligned: Vec<Matrix<f64>> = group
        .blocks()
        .iter()
        .zip(&clouds)
        .map(|(o, a)| o.adjoint_mul(a))
        .collect();
    for ai in &aligned {
        for aj in &aligned {
            let mut diff = ai.clone();
            diff.add_assign(&aj.scaled(-1.0));
            total_misalignment += diff.frob_norm_sq();
        }
    }

    let report = ProcrustesReport {
        d,
        k,
        n,
        cloud_ids: ids,
        sdp_objective: solve_report.objective,
        rounded_objective: ascent_report.objective,
        ratio: ascent_report.objective / solve_report.objective,
        total_misalignment,
        draws: args.draws,
        seed,
    };

    let out = args
        .out
        .clone()
        .unwrap_or_else(|| derived_path(&args.clouds, "alignments"));
    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| derived_path(&args.clouds, "report"));
    write_file(&out, &group.to_json_string()?, outputs)?;
    write_file(&report_path, &to_json(&report)?, outputs)?;
    println!(
        "aligned {n} clouds of {k} points in dimension {d}: total misalignment {:.6e}",
        report.total_misalignment
    );
    println!("alignments -> {}", out.display());
    println!("report -> {}", report_path.display());
    Ok(())
}

/// Parse the `cloud_id,point_id,x_1,...,x_d` CSV into one `d x k` matrix per
/// cloud (points as columns). Clouds are ordered by first appearance; every
/// cloud must contain the same point ids, and point columns are ordered by
/// the ids' first appearance in the first cloud, so positions correspond
/// across clouds.
fn parse_clouds(text: &str) -> Result<(Vec<String>, Vec<Matrix<f64>>), Failure> {
    let bad = |msg: String| Failure {
        code: 2,
        msg: format!("point-cloud csv: {msg}"),
    };

    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 3 || cols[0] != "cloud_id" || cols[1] != "point_id" {
        return Err(bad(format!(
            "header must be cloud_id,point_id,x_1,...,x_d; got '{header}'"
        )));
    }
    let d = cols.len() - 2;
    for (j, col) in cols[2..].iter().enumerate() {
        let expected = format!("x_{}", j + 1);
        if *col != expected {
            return Err(bad(format!(
                "coordinate column {} is '{col}', expected '{expected}'",
                j + 3
            )));
        }
    }

    let mut ids: Vec<String> = Vec::new();
    // (cloud, point_id, coordinates) in file order.
    let mut rows: Vec<(usize, String, Vec<f64>)> = Vec::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != d + 2 {
            return Err(bad(format!(
                "line {}: {} fields, expected {}",
                line_no + 1,
                fields.len(),
                d + 2
            )));
        }
        let cloud = match ids.iter().position(|c| c == fields[0]) {
            Some(i) => i,
            None => {
                ids.push(fields[0].to_string());
                ids.len() - 1
            }
        };
        let coords = fields[2..]
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| bad(format!("line {}: bad coordinate '{f}'", line_no + 1)))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(bad(format!("line {}: non-finite coordinate", line_no + 1)));
        }
        rows.push((cloud, fields[1].to_string(), coords));
    }
    if ids.len() < 2 {
        return Err(bad(format!(
            "need at least two clouds, found {}",
            ids.len()
        )));
    }

    // Column order = point ids of the first cloud, in file order.
    let point_ids: Vec<&String> = rows
        .iter()
        .filter(|(c, _, _)| *c == 0)
        .map(|(_, p, _)| p)
        .collect();
    let k = point_ids.len();
    let mut clouds = vec![Matrix::<f64>::zeros(d, k); ids.len()];
    let mut seen = vec![vec![false; k]; ids.len()];
    for (cloud, point, coords) in &rows {
        let col = point_ids.iter().position(|p| *p == point).ok_or_else(|| {
            bad(format!(
                "cloud '{}' has point '{point}' missing from cloud '{}'",
                ids[*cloud], ids[0]
            ))
        })?;
        if seen[*cloud][col] {
            return Err(bad(format!(
                "cloud '{}' repeats point '{point}'",
                ids[*cloud]
            )));
        }
        seen[*cloud][col] = true;
        for (row, &c) in coords.iter().enumerate() {
            clouds[*cloud].set(row, col, c);
        }
    }
    for (cloud, flags) in seen.iter().enumerate() {
        if let Some(col) = flags.iter().position(|&s| !s) {
            return Err(bad(format!(
                "cloud '{}' is missing point '{}'",
                ids[cloud], point_ids[col]
            )));
        }
    }
    Ok((ids, clouds))
}

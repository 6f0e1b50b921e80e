//! `spherekern`: classify kernels on products of spheres, certify Gram
//! matrices, build witnesses and project kernels onto Gegenbauer products.
//!
//! Every command prints one JSON report on stdout; diagnostics go to stderr.
//! Exit codes: 0 ok, 2 parse or validation error, 3 unsupported dimension,
//! 4 dimension or length mismatch, 5 no witness expected, 6 witness search exhausted.

mod config;
mod failure;
mod project;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use spherekern::classify::{classify, Level};
use spherekern::gegenbauer::Degree;
use spherekern::kernel::{project_coefficients, CoefficientScheme, Quadrant};
use spherekern::witness::{
    antipodal_doubling_search, empty_quadrant_witness, gamma_witness, gram, GammaBound, Witness,
    DEFAULT_RESIDUAL_SAMPLES, MAX_DOUBLING_HALF,
};

use crate::config::{parse_config, parse_points, parse_samples, read_file, Config, DimSpec};
use crate::failure::{Failure, EXIT_NO_WITNESS_EXPECTED, EXIT_PARSE, EXIT_SEARCH_EXHAUSTED};
use crate::project::{Builtin, Interpolant};
use crate::report::{digest, to_json, RunReport};

#[derive(Debug, Parser)]
#[command(name = "spherekern", version, about = "Strict positive definiteness of isotropic kernels on S^m x S^M")]
struct Cli {
    /// Seed for random sample sites and point sets.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Truncation tolerance for parameterized schemes (a config's own value takes precedence).
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall time in the report (makes reports non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a kernel as SPD, DC_SPD_ONLY or PD_ONLY.
    Classify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Gram matrix of a kernel on a point set: smallest eigenvalue and null vector.
    Gram {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        points: PathBuf,
        /// Also write the matrix (JSON array of rows) to this file.
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
    /// Construct points and a nonzero c with c^T A c = 0.
    Witness {
        #[arg(long)]
        config: PathBuf,
        /// Largest half-size tried by the antipodal doubling search.
        #[arg(long, default_value_t = MAX_DOUBLING_HALF)]
        max_half: usize,
    },
    /// Expansion coefficients of a kernel given in closed form or by samples.
    Project(ProjectArgs),
    /// Evaluate K_r(t, s).
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
    },
}

#[derive(Debug, Args)]
struct ProjectArgs {
    /// Builtin kernel: `geometric` or `constant`.
    #[arg(long, conflicts_with = "samples")]
    family: Option<String>,
    /// Samples file `{"t": [...], "s": [...], "values": [[...]]}`.
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long)]
    m: DimSpec,
    #[arg(long = "M")]
    big_m: DimSpec,
    #[arg(long)]
    kmax: Degree,
    #[arg(long)]
    lmax: Degree,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    c: f64,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<f64>,
}

/// Negative coefficients below this are reported.
const NEGATIVE_FLAG: f64 = -1e-8;

struct Outcome {
    result: Value,
    digest_parts: Vec<Vec<u8>>,
    /// Nonzero exit after the report is written.
    code: i32,
}

impl Outcome {
    fn ok(result: Value, digest_parts: Vec<Vec<u8>>) -> Self {
        Outcome {
            result,
            digest_parts,
            code: 0,
        }
    }
}

fn load_config(path: &Path) -> Result<(Config, Vec<u8>), Failure> {
    let bytes = read_file(path)?;
    let config = parse_config(&bytes).map_err(|f| f.context(&path.display().to_string()))?;
    Ok((config, bytes))
}

fn effective_tol(config: &Config, cli_tol: f64) -> Result<f64, Failure> {
    if !(cli_tol > 0.0 && cli_tol.is_finite()) {
        return Err(Failure::parse(format!("--tol must be positive, found {cli_tol}")));
    }
    Ok(config.tol.unwrap_or(cli_tol))
}

fn run_classify(path: &Path) -> Result<Outcome, Failure> {
    let (config, bytes) = load_config(path)?;
    let verdict = classify(&config.scheme)?;
    let quadrants = config.scheme.index_quadrants()?;
    let result = json!({
        "m": config.scheme.m(),
        "M": config.scheme.big_m(),
        "verdict": verdict,
        "index_quadrants": quadrants,
    });
    Ok(Outcome::ok(result, vec![bytes]))
}

fn run_gram(cli: &Cli, config_path: &Path, points_path: &Path, matrix_out: Option<&Path>) -> Result<Outcome, Failure> {
    let (config, config_bytes) = load_config(config_path)?;
    let tol = effective_tol(&config, cli.tol)?;
    let s = &config.scheme;
    s.m().require_finite()?;
    s.big_m().require_finite()?;
    let point_bytes = read_file(points_path)?;
    let pts = parse_points(&point_bytes, s.m(), s.big_m())?;
    let report = gram(s, &pts, tol)?;
    let rows: Vec<Vec<f64>> = report.matrix.row_iter().map(|r| r.iter().copied().collect()).collect();
    if let Some(path) = matrix_out {
        let text = serde_json::to_vec(&rows).map_err(|e| Failure::new(1, e.to_string()))?;
        std::fs::write(path, text)
            .map_err(|e| Failure::new(1, format!("cannot write {}: {e}", path.display())))?;
    }
    let null_vector = report.null_vector.as_ref().map(|v| v.iter().copied().collect::<Vec<f64>>());
    let result = json!({
        "n": pts.len(),
        "min_eigenvalue": report.min_eigenvalue,
        "threshold": report.threshold,
        "trace": report.trace(),
        "null_vector": null_vector,
        "matrix_path": matrix_out.map(|p| p.display().to_string()),
    });
    Ok(Outcome::ok(result, vec![config_bytes, point_bytes]))
}

fn witness_json(strategy: &str, level: Level, w: &Witness) -> Value {
    json!({
        "strategy": strategy,
        "level": level,
        "witness": {
            "kind": w.kind,
            "n_points": w.points.len(),
            "points": w.points.points(),
            "coefficients": w.coefficients,
            "quadratic_form_value": w.quadratic_form_value,
            "residual_sup": w.residual_sup,
            "trace": w.trace,
            "scale": w.scale,
            "certified": w.is_certified(),
        }
    })
}

fn half_ceil(d: Degree) -> Degree {
    d.div_ceil(2)
}

/// Picks a construction in order: direct circle grid for sparse schemes with
/// all `k` (or all `l`) even; antipodal doubling when a parity class of
/// `k + l` is finite; the four-point witness for an empty quadrant; the lifted
/// circle grid when the `(0,0)` block is bounded in one index.
fn choose_witness(
    s: &CoefficientScheme,
    tol: f64,
    seed: u64,
    max_half: usize,
) -> Result<(String, Witness), Failure> {
    let samples = DEFAULT_RESIDUAL_SAMPLES;
    if let Ok(terms) = s.sparse_terms() {
        if !terms.is_empty() {
            if terms.iter().all(|t| t.k % 2 == 0) {
                let k0 = terms.iter().map(|t| t.k).max().unwrap_or(0) / 2;
                return Ok(("gamma".into(), gamma_witness(s, GammaBound::K(k0), tol, samples, seed)?));
            }
            if terms.iter().all(|t| t.l % 2 == 0) {
                let l0 = terms.iter().map(|t| t.l).max().unwrap_or(0) / 2;
                return Ok(("gamma".into(), gamma_witness(s, GammaBound::L(l0), tol, samples, seed)?));
            }
        }
    }
    let iq = s.index_quadrants()?;
    if !(iq.even_sum_infinite && iq.odd_sum_infinite) {
        return Ok(("antipodal_doubling".into(), antipodal_doubling_search(s, tol, seed, max_half)?));
    }
    if let Some(q) = Quadrant::ALL.into_iter().find(|&q| iq.quadrants[q].is_empty()) {
        return Ok(("empty_quadrant".into(), empty_quadrant_witness(s, q, tol, samples, seed)?));
    }
    let block = &iq.quadrants.q00;
    let bound = if !block.flags.k_unbounded {
        block.k_max.map(|k| GammaBound::K(half_ceil(k)))
    } else if !block.flags.l_unbounded {
        block.l_max.map(|l| GammaBound::L(half_ceil(l)))
    } else {
        None
    };
    match bound {
        Some(b) => Ok(("gamma_lifted".into(), gamma_witness(s, b, tol, samples, seed)?)),
        None => Err(Failure::new(
            EXIT_SEARCH_EXHAUSTED,
            "no witness construction applies: both parity classes of k + l are infinite, \
             no quadrant is empty and the (0,0) block is unbounded in both indices",
        )),
    }
}

fn run_witness(cli: &Cli, path: &Path, max_half: usize) -> Result<Outcome, Failure> {
    let (config, bytes) = load_config(path)?;
    let tol = effective_tol(&config, cli.tol)?;
    let s = &config.scheme;
    s.m().require_finite()?;
    s.big_m().require_finite()?;
    let verdict = classify(s)?;
    if verdict.level == Level::Spd {
        eprintln!("scheme is strictly positive definite; no witness exists");
        return Ok(Outcome {
            result: json!({ "strategy": null, "level": verdict.level, "witness": null }),
            digest_parts: vec![bytes],
            code: EXIT_NO_WITNESS_EXPECTED,
        });
    }
    let (strategy, w) = choose_witness(s, tol, cli.seed, max_half)?;
    let args = max_half.to_le_bytes().to_vec();
    Ok(Outcome::ok(witness_json(&strategy, verdict.level, &w), vec![bytes, args]))
}

fn run_project(args: &ProjectArgs) -> Result<Outcome, Failure> {
    let m = args.m.resolve("--m")?;
    let big_m = args.big_m.resolve("--M")?;
    m.require_finite()?;
    big_m.require_finite()?;
    let mut parts = vec![format!("{m} {big_m} {} {}", args.kmax, args.lmax).into_bytes()];
    let (source, coeffs) = match (&args.family, &args.samples) {
        (Some(family), None) => {
            let builtin = match family.as_str() {
                "geometric" => Builtin::Geometric {
                    c: args.c,
                    r: args.r.ok_or_else(|| Failure::parse("--family geometric needs --r"))?,
                    q: args.q.ok_or_else(|| Failure::parse("--family geometric needs --q"))?,
                },
                "constant" => Builtin::Constant { c: args.c },
                other => {
                    return Err(Failure::parse(format!(
                        "unknown family \"{other}\" (expected geometric or constant)"
                    )))
                }
            };
            builtin.validate()?;
            parts.push(format!("{builtin:?}").into_bytes());
            let coeffs = project_coefficients(
                |t, s| builtin.eval(m, big_m, t, s),
                m,
                big_m,
                args.kmax,
                args.lmax,
            )?;
            (json!({ "builtin": family, "c": args.c, "r": args.r, "q": args.q }), coeffs)
        }
        (None, Some(path)) => {
            let bytes = read_file(path)?;
            let grid = parse_samples(&bytes)?;
            let interp = Interpolant::new(grid, args.kmax, args.lmax)?;
            parts.push(bytes);
            let coeffs = project_coefficients(|t, s| interp.eval(t, s), m, big_m, args.kmax, args.lmax)?;
            (json!({ "samples": path.display().to_string() }), coeffs)
        }
        _ => return Err(Failure::parse("give exactly one of --family or --samples")),
    };
    let rows: Vec<Vec<f64>> = coeffs.row_iter().map(|r| r.iter().copied().collect()).collect();
    let mut negatives = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        for (l, &v) in row.iter().enumerate() {
            if v < NEGATIVE_FLAG {
                negatives.push(json!([k, l, v]));
            }
        }
    }
    if !negatives.is_empty() {
        eprintln!("{} negative coefficients: not positive definite at this truncation", negatives.len());
    }
    let result = json!({
        "m": m,
        "M": big_m,
        "kmax": args.kmax,
        "lmax": args.lmax,
        "source": source,
        "coefficients": rows,
        "negative_entries": negatives,
        "positive_definite_at_truncation": negatives.is_empty(),
    });
    Ok(Outcome::ok(result, parts))
}

fn run_eval(cli: &Cli, path: &Path, t: f64, s: f64) -> Result<Outcome, Failure> {
    let (config, bytes) = load_config(path)?;
    let tol = effective_tol(&config, cli.tol)?;
    let ev = config.scheme.evaluator(tol)?;
    let value = ev.eval(t, s)?;
    let result = json!({
        "t": t,
        "s": s,
        "value": value,
        "terms": ev.terms().len(),
        "neglected_tail": ev.neglected_tail(),
    });
    let args = format!("{t:e} {s:e}").into_bytes();
    Ok(Outcome::ok(result, vec![bytes, args]))
}

fn run(cli: &Cli) -> Result<(String, Outcome), Failure> {
    Ok(match &cli.command {
        Command::Classify { config } => ("classify".into(), run_classify(config)?),
        Command::Gram {
            config,
            points,
            matrix_out,
        } => ("gram".into(), run_gram(cli, config, points, matrix_out.as_deref())?),
        Command::Witness { config, max_half } => {
            ("witness".into(), run_witness(cli, config, *max_half)?)
        }
        Command::Project(args) => ("project".into(), run_project(args)?),
        Command::Eval { config, t, s } => ("eval".into(), run_eval(cli, config, *t, *s)?),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE as u8 } else { 0 });
        }
    };
    let start = Instant::now();
    let (command, outcome) = match run(&cli) {
        Ok(v) => v,
        Err(f) => {
            eprintln!("error: {f}");
            return ExitCode::from(f.code as u8);
        }
    };
    let seed = cli.seed.to_le_bytes();
    let tol = cli.tol.to_le_bytes();
    let mut parts: Vec<&[u8]> = vec![command.as_bytes(), &seed, &tol];
    parts.extend(outcome.digest_parts.iter().map(|p| p.as_slice()));
    let inputs_digest = digest(&parts);
    let report = RunReport {
        command,
        inputs_digest,
        seed: cli.seed,
        tol: cli.tol,
        result: outcome.result,
        wall_time_s: cli.timing.then(|| start.elapsed().as_secs_f64()),
    };
    let bytes = match to_json(&report) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: cannot serialize report: {e}");
            return ExitCode::from(1);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &bytes),
        None => std::io::Write::write_all(&mut std::io::stdout(), &bytes),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.code as u8)
}

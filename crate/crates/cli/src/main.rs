//! `funvol`: command-line access to evaluation, transforms, conjugation and
//! identity verification.

mod grid;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use funvol::convex::{discrete_conjugate, ConvexFunction, FunctionSpec};
use funvol::numerics::QuadratureConfig;
use funvol::valuations::{
    eval_cauchy_kubota, eval_ck_general, eval_domain_gradient, eval_dual, eval_smooth, DualPath, EvalOptions, EvalResult, ValuationSpec,
};
use funvol::verify::{default_manifest, parse_manifest, run_suite, SuiteOptions};
use funvol::weights::{transform_r_inverse, transform_r_power, WeightFunction, WeightSpec};
use funvol::Error;
use serde_json::{json, Value};

use grid::Grid;

#[derive(Parser)]
#[command(name = "funvol", version, about = "Functional intrinsic volumes of convex functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate Z_{j,ζ}(u).
    Compute(ComputeArgs),
    /// Tabulate R^L ζ or R^{-L} ζ on a grid.
    Transform(TransformArgs),
    /// Conjugate a function, analytically or on a grid.
    Conjugate(ConjugateArgs),
    /// Run an identity manifest.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Smooth,
    Ck,
    CkGeneral,
    Dual,
    DomainGradient,
}

#[derive(Clone, Copy, ValueEnum)]
enum DualPathArg {
    Integral,
    Conjugate,
}

#[derive(Clone, Copy, Default, PartialEq, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(clap::Args)]
struct QuadratureArgs {
    /// Absolute quadrature tolerance.
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    rel_tol: Option<f64>,
}

impl QuadratureArgs {
    fn config(&self) -> Result<QuadratureConfig, Error> {
        let d = QuadratureConfig::default();
        let (a, r) = (self.abs_tol.unwrap_or(d.abs_tol), self.rel_tol.unwrap_or(d.rel_tol));
        if !(a > 0.0 && r > 0.0) {
            return Err(Error::Schema("quadrature tolerances must be positive".into()));
        }
        Ok(d.with_tolerances(a, r))
    }
}

#[derive(clap::Args)]
struct ComputeArgs {
    #[arg(long)]
    function: PathBuf,
    #[arg(long)]
    zeta: PathBuf,
    #[arg(long)]
    j: usize,
    /// Subspace dimension for `ck-general`.
    #[arg(long)]
    k: Option<usize>,
    /// Ambient dimension, for radial specs that omit `n`.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Route for `--method dual`; the function is read as the dual argument.
    #[arg(long, value_enum, default_value = "integral")]
    dual_path: DualPathArg,
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    quadrature: QuadratureArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct TransformArgs {
    #[arg(long)]
    zeta: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    power: i64,
    #[arg(long)]
    inverse: bool,
    /// `a:b:count` or `a:b:count:log`.
    #[arg(long)]
    grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ConjugateArgs {
    #[arg(long)]
    function: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    /// Dual grid per axis, `a:b:count`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Primal grid per axis for `--numeric`; defaults to the dual grid.
    #[arg(long, allow_hyphen_values = true)]
    primal_grid: Option<String>,
    /// Discrete Legendre transform on the grid.
    #[arg(long)]
    numeric: bool,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long, conflicts_with = "default_suite", required_unless_present = "default_suite")]
    manifest: Option<PathBuf>,
    #[arg(long)]
    default_suite: bool,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the full report, including timings, to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

/// A failed command: exit code plus a structured payload.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Schema(_) | Error::InvalidInput(_) => (2, "schema"),
            Error::UnsupportedVariant(_) | Error::NotDifferentiable | Error::UnknownSingularity(_) => (3, "unsupported_variant"),
            Error::NonConverged { .. } | Error::MinimizerNotFound(_) => (4, "non_converged"),
        };
        Failure { code, kind, message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: 2, kind: "io", message: format!("{}: {e}", path.display()) }
}

/// Command output: bytes for stdout and the exit code.
struct Output {
    text: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads() {
        return emit_failure(f);
    }
    let result = match cli.command {
        Command::Compute(a) => compute(a),
        Command::Transform(a) => transform(a),
        Command::Conjugate(a) => conjugate(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(f) => emit_failure(f),
    }
}

fn emit_failure(f: Failure) -> ExitCode {
    let v = json!({"error": {"kind": f.kind, "message": f.message, "exit_code": f.code}});
    println!("{v}");
    ExitCode::from(f.code)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("FUNVOL_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Failure { code: 2, kind: "schema", message: format!("FUNVOL_THREADS must be a positive integer, got {raw:?}") })?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure { code: 2, kind: "schema", message: e.to_string() })
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => Ok(()),
    }
}

/// Sorted-key JSON with a trailing newline.
fn canonical(v: &impl serde::Serialize) -> Result<String, Failure> {
    let v = serde_json::to_value(v).map_err(|e| Failure { code: 2, kind: "schema", message: e.to_string() })?;
    Ok(format!("{v}\n"))
}

fn result_json(r: &EvalResult) -> Value {
    json!({
        "value": r.value,
        "error": r.error,
        "sampling_error": r.sampling_error,
        "quadrature_error": r.quadrature_error,
        "method": r.method,
        "counters": {
            "integrand_evaluations": r.integrand_evaluations,
            "subspace_samples": r.subspace_samples,
        },
    })
}

fn compute(a: ComputeArgs) -> Result<Output, Failure> {
    let u = FunctionSpec::from_json(&read(&a.function)?, a.n)?;
    let zeta = WeightSpec::from_json(&read(&a.zeta)?)?;
    let n = u.dim();
    if let Some(hint) = a.n.filter(|&m| m != n) {
        return Err(Error::Schema(format!("--n {hint} disagrees with the function dimension {n}")).into());
    }
    let spec = ValuationSpec::new(a.j, n, zeta)?;
    let opts = EvalOptions { quadrature: a.quadrature.config()?, ..EvalOptions::default() }.with_samples(a.samples as usize).with_seed(a.seed);
    let r = match a.method {
        MethodArg::Smooth => eval_smooth(&spec, &u, &opts)?,
        MethodArg::Ck => eval_cauchy_kubota(&spec, &u, &opts)?,
        MethodArg::CkGeneral => {
            let k = a.k.ok_or_else(|| Error::Schema("--method ck-general needs --k".into()))?;
            eval_ck_general(&spec, &u, k, &opts)?
        }
        MethodArg::Dual => {
            let path = match a.dual_path {
                DualPathArg::Integral => DualPath::Integral,
                DualPathArg::Conjugate => DualPath::Conjugate,
            };
            eval_dual(&spec, &u, path, &opts)?
        }
        MethodArg::DomainGradient => eval_domain_gradient(&spec, &u, &opts)?,
    };
    let text = canonical(&result_json(&r))?;
    write_out(&a.out, &text)?;
    Ok(Output { text, code: 0 })
}

fn transform(a: TransformArgs) -> Result<Output, Failure> {
    let zeta: WeightFunction = WeightSpec::from_json(&read(&a.zeta)?)?;
    let grid = Grid::parse(&a.grid)?;
    if grid.lo <= 0.0 {
        return Err(Error::Schema("transform grid must lie in (0, ∞)".into()).into());
    }
    let l = u32::try_from(a.power.unsigned_abs()).map_err(|_| Error::Schema("--power out of range".into()))?;
    let inverse = a.inverse != (a.power < 0);
    let (w, label) = if l == 0 {
        (zeta, "zeta".to_string())
    } else if inverse {
        (transform_r_inverse(&zeta, l)?, format!("R^-{l} zeta"))
    } else {
        (transform_r_power(&zeta, l), format!("R^{l} zeta"))
    };
    let mut text = format!("s,{label}\n");
    for s in grid.points() {
        let v = w.eval(s);
        if !v.is_finite() {
            return Err(Error::NonConverged { estimate: v, error_estimate: f64::INFINITY }.into());
        }
        text.push_str(&format!("{s:.16e},{v:.16e}\n"));
    }
    write_out(&a.out, &text)?;
    Ok(Output { text, code: 0 })
}

fn conjugate(a: ConjugateArgs) -> Result<Output, Failure> {
    let u = FunctionSpec::from_json(&read(&a.function)?, a.n)?;
    let analytic = u.conjugate();
    if !a.numeric {
        let text = canonical(&FunctionSpec::from(&analytic?))?;
        write_out(&a.out, &text)?;
        return Ok(Output { text, code: 0 });
    }
    let dual = Grid::parse(a.grid.as_deref().ok_or_else(|| Error::Schema("--numeric needs --grid".into()))?)?;
    let primal = match &a.primal_grid {
        Some(g) => Grid::parse(g)?,
        None => dual,
    };
    let d = u.dim();
    let axes = vec![primal.points(); d];
    let dual_axes = vec![dual.points(); d];
    let xs = grid::tensor(&axes);
    let values: Vec<f64> = xs.iter().map(|x| u.eval(x)).collect();
    let discrete = discrete_conjugate(&axes, &values, &dual_axes);
    let ys = grid::tensor(&dual_axes);
    let exact: Option<Vec<f64>> = analytic.ok().map(|v: ConvexFunction| ys.iter().map(|y| v.eval(y)).collect());
    let deviation = exact.as_ref().map(|e| e.iter().zip(&discrete).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    let text = match a.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut header: Vec<String> = (1..=d).map(|i| format!("y{i}")).collect();
            header.push("discrete".into());
            if exact.is_some() {
                header.push("analytic".into());
            }
            let mut text = header.join(",") + "\n";
            for (i, y) in ys.iter().enumerate() {
                let mut row: Vec<String> = y.iter().map(|c| format!("{c:.16e}")).collect();
                row.push(format!("{:.16e}", discrete[i]));
                if let Some(e) = &exact {
                    row.push(format!("{:.16e}", e[i]));
                }
                text += &(row.join(",") + "\n");
            }
            if let Some(dev) = deviation {
                eprintln!("{}", json!({ "max_deviation": dev }));
            }
            text
        }
        Format::Json => canonical(&json!({
            "points": ys,
            "discrete": discrete,
            "analytic": exact,
            "max_deviation": deviation,
        }))?,
    };
    write_out(&a.out, &text)?;
    Ok(Output { text, code: 0 })
}

fn verify(a: VerifyArgs) -> Result<Output, Failure> {
    let cases = match &a.manifest {
        Some(p) => parse_manifest(&read(p)?)?,
        None => default_manifest(),
    };
    let opts = SuiteOptions { samples: a.samples.map(|s| s as usize), seed: a.seed, ..SuiteOptions::default() };
    let report = run_suite(&cases, &opts)?;
    let render = |r: &funvol::verify::SuiteReport| -> Result<String, Failure> {
        match a.format {
            Format::Json => canonical(r),
            Format::Csv => Ok(r.to_csv()),
        }
    };
    write_out(&a.out, &render(&report)?)?;
    let text = render(&report.without_timing())?;
    Ok(Output { text, code: if report.all_pass { 0 } else { 1 } })
}

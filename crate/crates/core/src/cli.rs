//! Command-line front end.
//!
//! [`run`] parses arguments, runs one subcommand and writes its report.
//! Exit codes: 0 success, 1 domain/resource/I/O error, 2 usage error. Errors
//! go to stderr as one JSON line `{"error": {"kind": .., "message": ..}}`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::check::{run_checks, CheckConfig, Status};
use crate::converse_scan::{scan, ScanReport, ScanSummary, ScanTarget, DEFAULT_C0};
use crate::error::Error;
use crate::horn_realize::{realize_triple, verify_theorem1_sweep, RealizeConfig};
use crate::linalg::matrix_from_json;
use crate::lr::{find_scaling, lr_character_oracle, lr_general, LrMethod};
use crate::schur_weyl::{estimate_report, DensityOperator, EstimateReport};
use crate::weights::{shift_triple, DominantWeight, SpectralTriple};

pub const WORKERS_ENV: &str = "HORNLR_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Parser)]
#[command(
    name = "hornlr",
    version,
    about = "Littlewood-Richardson coefficients, spectrum estimation and Horn-problem witnesses"
)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Littlewood-Richardson coefficient of a triple.
    Lr(LrArgs),
    /// Hermitian A, B with prescribed spectra of A, B and A + B.
    Realize(RealizeArgs),
    /// Realize every nonzero-coefficient triple up to a size.
    #[command(name = "sweep-theorem1")]
    Sweep(SweepArgs),
    /// Schur-Weyl measurement statistics and the exponential bound.
    Estimate(EstimateArgs),
    /// Integer witnesses for a mixture of two states.
    Scan(ScanArgs),
    /// Run the invariant suite.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct TripleArgs {
    #[arg(long, allow_hyphen_values = true)]
    mu: DominantWeight,
    #[arg(long, allow_hyphen_values = true)]
    nu: DominantWeight,
    #[arg(long, allow_hyphen_values = true)]
    lambda: DominantWeight,
    /// Pad the weights with zeros to this dimension.
    #[arg(long)]
    d: Option<usize>,
}

impl TripleArgs {
    fn triple(&self) -> crate::Result<SpectralTriple> {
        SpectralTriple::padded(&self.mu, &self.nu, &self.lambda, self.d)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Tableaux,
    Oracle,
}

#[derive(Debug, Args)]
struct LrArgs {
    #[command(flatten)]
    triple: TripleArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Tableaux)]
    method: MethodArg,
    /// Also report the smallest N <= N_MAX with nonzero coefficient at scale N.
    #[arg(long, value_name = "N_MAX")]
    find_scaling: Option<u32>,
}

#[derive(Debug, Args)]
struct RealizeArgs {
    #[command(flatten)]
    triple: TripleArgs,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    steps: usize,
}

impl BudgetArgs {
    fn config(&self, seed: u64) -> RealizeConfig {
        RealizeConfig {
            tol: self.tol,
            restarts: self.restarts,
            steps: self.steps,
            seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 6)]
    max_boxes: usize,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Debug, Args)]
#[group(id = "rho", required = true, multiple = false)]
struct RhoArgs {
    /// Diagonal of the state, e.g. 0.5,0.5.
    #[arg(long, value_delimiter = ',', group = "rho")]
    rho_diag: Option<Vec<f64>>,
    /// JSON matrix file: rows of [re, im] pairs or reals.
    #[arg(long, group = "rho")]
    rho_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[command(flatten)]
    rho: RhoArgs,
    #[arg(long)]
    k: usize,
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Diagonal spectrum (0.7,0.3) or path to a JSON matrix file.
    #[arg(long = "rhoA")]
    rho_a: String,
    #[arg(long = "rhoB")]
    rho_b: String,
    #[arg(long)]
    p: f64,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
    n_list: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_C0)]
    c0: f64,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Smaller caps, runs in seconds.
    #[arg(long)]
    quick: bool,
    /// Largest d^k for the direct projector route.
    #[arg(long, default_value_t = crate::schur_weyl::DEFAULT_DIRECT_CAP)]
    direct_cap: usize,
}

/// CLI failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: 1,
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "usage",
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            kind: "io",
            message: message.into(),
        }
    }
}

/// Report text, plus a failure to signal after the report is written.
struct Output {
    text: String,
    failure: Option<Failure>,
}

impl Output {
    fn ok(text: String) -> Self {
        Output {
            text,
            failure: None,
        }
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            return report_failure(err, Failure::usage(one_line(&e.render().to_string())));
        }
    };
    let result = with_workers(|| dispatch(&cli)).and_then(|output| {
        emit(&cli, out, &output.text)?;
        output.failure.map_or(Ok(0), Err)
    });
    match result {
        Ok(code) => code,
        Err(f) => report_failure(err, f),
    }
}

fn one_line(text: &str) -> String {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

fn report_failure(err: &mut dyn Write, f: Failure) -> i32 {
    let record = json!({"error": {"kind": f.kind, "message": f.message}});
    let _ = writeln!(err, "{record}");
    f.code
}

fn with_workers<T: Send>(job: impl FnOnce() -> Result<T, Failure> + Send) -> Result<T, Failure> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return job();
    };
    let workers: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::usage(format!(
            "{WORKERS_ENV} must be a positive integer, got {raw:?}"
        ))
    })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Failure::io(format!("thread pool: {e}")))?;
    pool.install(job)
}

fn emit(cli: &Cli, out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::io(format!("cannot write report: {e}"))),
    }
}

fn dispatch(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Lr(a) => cmd_lr(a, cli.format),
        Command::Realize(a) => {
            let t = a.triple.triple()?;
            let r = realize_triple(&t, &a.budget.config(cli.seed))?;
            generic(&r, cli.format)
        }
        Command::Sweep(a) => {
            let r = verify_theorem1_sweep(a.max_boxes, a.d, &a.budget.config(cli.seed))?;
            generic(&r, cli.format)
        }
        Command::Estimate(a) => {
            let rho = read_rho(&a.rho)?;
            let r = estimate_report(&rho, a.k)?;
            Ok(Output::ok(render_estimate(&r, cli.format)))
        }
        Command::Scan(a) => cmd_scan(a, cli.format),
        Command::Check(a) => {
            let mut cfg = CheckConfig::new(a.quick, cli.seed);
            cfg.direct_cap = a.direct_cap;
            let report = run_checks(&cfg)?;
            let mut output = generic(&report, cli.format)?;
            let failed: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| c.status == Status::Fail)
                .map(|c| c.name.as_str())
                .collect();
            if !failed.is_empty() {
                output.failure = Some(Failure {
                    code: 1,
                    kind: "check",
                    message: format!("failed checks: {}", failed.join(", ")),
                });
            }
            Ok(output)
        }
    }
}

#[derive(Serialize)]
struct ScalingOut {
    n_max: u32,
    n: Option<u32>,
}

#[derive(Serialize)]
struct LrOut {
    mu: DominantWeight,
    nu: DominantWeight,
    lambda: DominantWeight,
    coefficient: u64,
    method: LrMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    scaling: Option<ScalingOut>,
}

fn cmd_lr(a: &LrArgs, format: Format) -> Result<Output, Failure> {
    let t = a.triple.triple()?;
    let (coefficient, method) = match a.method {
        MethodArg::Tableaux => (lr_general(&t)?.coefficient, LrMethod::Tableaux),
        MethodArg::Oracle => (oracle_general(&t)?, LrMethod::CharacterOracle),
    };
    let scaling = match a.find_scaling {
        Some(n_max) => Some(ScalingOut {
            n_max,
            n: find_scaling(&t, n_max)?,
        }),
        None => None,
    };
    generic(
        &LrOut {
            mu: t.mu,
            nu: t.nu,
            lambda: t.lambda,
            coefficient,
            method,
            scaling,
        },
        format,
    )
}

/// Character-oracle value for dominant weights: shift to frames, 0 when
/// unbalanced or when `lambda` cannot contain `mu`.
fn oracle_general(t: &SpectralTriple) -> crate::Result<u64> {
    if !t.is_balanced() {
        return Ok(0);
    }
    let d = t.dim();
    let m = (-t.mu.parts()[d - 1]).max(0);
    let n = (-t.nu.parts()[d - 1]).max(0);
    let s = shift_triple(t, m, n);
    if !s.lambda.is_frame() {
        return Ok(0);
    }
    Ok(lr_character_oracle(&s)?.coefficient)
}

/// Diagonal spectrum if the text parses as a comma list of numbers,
/// otherwise a JSON matrix file.
fn parse_state(text: &str) -> Result<DensityOperator, Failure> {
    let diag: Result<Vec<f64>, _> = text.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match diag {
        Ok(values) => Ok(DensityOperator::from_diagonal(&values)?),
        Err(_) => read_matrix_file(&PathBuf::from(text)),
    }
}

fn read_matrix_file(path: &PathBuf) -> Result<DensityOperator, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
    Ok(DensityOperator::new(matrix_from_json(&text)?)?)
}

fn read_rho(a: &RhoArgs) -> Result<DensityOperator, Failure> {
    match (&a.rho_diag, &a.rho_file) {
        (Some(values), _) => Ok(DensityOperator::from_diagonal(values)?),
        (None, Some(path)) => read_matrix_file(path),
        (None, None) => Err(Failure::usage(
            "one of --rho-diag or --rho-file is required",
        )),
    }
}

fn cmd_scan(a: &ScanArgs, format: Format) -> Result<Output, Failure> {
    let rho_a = parse_state(&a.rho_a)?;
    let rho_b = parse_state(&a.rho_b)?;
    let target = ScanTarget::from_states(&rho_a, &rho_b, a.p)?;
    let report = scan(&target, &a.n_list, a.c0)?;
    Ok(Output::ok(render_scan(&report, format)))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report types serialize")
}

fn generic<T: Serialize>(value: &T, format: Format) -> Result<Output, Failure> {
    let text = match format {
        Format::Json => format!("{}\n", to_json(value)),
        Format::Table => {
            key_value_table(&serde_json::to_value(value).expect("report types serialize"))
        }
        Format::Csv => {
            return Err(Failure::usage(
                "csv output is available for the estimate and scan subcommands",
            ))
        }
    };
    Ok(Output::ok(text))
}

fn key_value_table(v: &Value) -> String {
    let Value::Object(map) = v else {
        return format!("{v}\n");
    };
    let width = map.keys().map(String::len).max().unwrap_or(0);
    let mut s = String::new();
    for (key, value) in map {
        let shown = match value {
            Value::String(x) => x.clone(),
            other => other.to_string(),
        };
        let _ = writeln!(s, "{key:<width$}  {shown}");
    }
    s
}

fn frame_text(f: &[i64]) -> String {
    f.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn render_estimate(r: &EstimateReport, format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Json => {
            let _ = writeln!(s, "{}", to_json(r));
        }
        Format::Csv => {
            s.push_str("frame,prob,bound\n");
            for o in &r.outcomes {
                let _ = writeln!(
                    s,
                    "\"{}\",{},{}",
                    frame_text(&o.frame),
                    num(o.prob),
                    num(o.bound)
                );
            }
        }
        Format::Table => {
            let _ = writeln!(s, "k = {}, d = {}", r.k, r.d);
            let _ = writeln!(s, "{:<16} {:>14} {:>14}", "frame", "prob", "bound");
            for o in &r.outcomes {
                let _ = writeln!(
                    s,
                    "{:<16} {:>14.6e} {:>14.6e}",
                    frame_text(&o.frame),
                    o.prob,
                    o.bound
                );
            }
        }
    }
    s
}

/// Shortest round-trip form, as in the JSON output.
fn num(x: f64) -> String {
    Value::from(x).to_string()
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    summary: &'a ScanSummary,
}

fn render_scan(r: &ScanReport, format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Json => {
            for w in &r.witnesses {
                let _ = writeln!(s, "{}", to_json(w));
            }
            let _ = writeln!(
                s,
                "{}",
                to_json(&SummaryLine {
                    summary: &r.summary
                })
            );
        }
        Format::Csv => {
            s.push_str("n,d_mu,d_nu,d_lambda,median\n");
            for p in &r.summary.series {
                let [a, b, c] = p.distances;
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    p.n,
                    num(a),
                    num(b),
                    num(c),
                    num(p.median)
                );
            }
        }
        Format::Table => {
            let _ = writeln!(
                s,
                "{:>4} {:>4} {:<14} {:<14} {:<14} {:>6} {:>9} {:>9}",
                "n", "k", "mu", "nu", "lambda", "c", "median", "epsilon"
            );
            for w in &r.witnesses {
                let _ = writeln!(
                    s,
                    "{:>4} {:>4} {:<14} {:<14} {:<14} {:>6} {:>9.4} {:>9.4}",
                    w.n,
                    w.k,
                    w.triple.mu.to_string(),
                    w.triple.nu.to_string(),
                    w.triple.lambda.to_string(),
                    w.coefficient,
                    w.median_distance(),
                    w.epsilon
                );
            }
            for n in &r.summary.missing {
                let _ = writeln!(s, "{n:>4}  no witness");
            }
            for sk in &r.summary.skipped {
                let _ = writeln!(s, "{:>4}  skipped: {}", sk.n, sk.reason);
            }
        }
    }
    s
}

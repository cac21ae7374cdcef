//! The `ssp-lmm` command line.
//!
//! Exit codes: `0` success, `1` a verdict came out false, `2` usage or
//! parse errors. Set `SSP_LMM_THREADS` to cap the worker pool used by
//! `compute` and `impexp`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{check_impexp_relation, existence_step_threshold, upper_bound};
use crate::certificate::{parse_certificate, structural_audit, verify_certificate, write_certificate};
use crate::integrator::{monotonicity_sweep, TestProblem};
use crate::optimizer::{optimal_ssp, optimal_ssp_many, support_analysis, OptimizerError, SspBracket, SspQuery};
use crate::order::{MethodCoefficients, Variant};
use crate::rational::{parse_rational, to_f64, Rational};

pub const THREADS_ENV: &str = "SSP_LMM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ssp-lmm", version, about = "Optimal SSP coefficients of linear multistep methods, with exact certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bracket optimal SSP coefficients over a grid of (k, p)
    Compute(ComputeArgs),
    /// Verify a certificate file
    Certify(CertifyArgs),
    /// Closed-form upper bound with its certificate
    Bounds(BoundsArgs),
    /// Step count beyond which explicit order-p methods with C > 0 exist
    Threshold(ThresholdArgs),
    /// Compare C_imp(k, 2p) with 2 C_exp(k, p)
    Impexp(ImpexpArgs),
    /// Run a method on a test problem and check monotonicity
    Validate(ValidateArgs),
    /// Complementary-slackness support of the optimal method
    Support(SupportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Explicit,
    Implicit,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Explicit => Variant::Explicit,
            VariantArg::Implicit => Variant::Implicit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Inclusive range `a..b`, or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountRange {
    pub start: usize,
    pub end: usize,
}

impl CountRange {
    pub fn iter(self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }
}

fn parse_range(s: &str) -> Result<CountRange, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("not a count: {t:?}"))
    };
    let (start, end) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if start == 0 || start > end {
        return Err(format!("range {s:?} must be nonempty with values >= 1"));
    }
    Ok(CountRange { start, end })
}

fn parse_tolerance(s: &str) -> Result<Rational, String> {
    let r = parse_rational(s).map_err(|e| e.to_string())?;
    if r <= Rational::from_integer(0.into()) {
        return Err(format!("tolerance must be positive (got {s})"));
    }
    Ok(r)
}

/// Comma-separated positive step sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSizes(pub Vec<f64>);

fn parse_h_list(s: &str) -> Result<StepSizes, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|h| h.is_finite() && *h > 0.0)
                .ok_or_else(|| format!("bad step size {t:?}"))
        })
        .collect::<Result<_, _>>()
        .map(StepSizes)
}

const DEFAULT_TOL: &str = "1/1073741824";

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, value_enum, default_value = "explicit")]
    pub variant: VariantArg,
    #[arg(long, value_parser = parse_range)]
    pub k: CountRange,
    #[arg(long, value_parser = parse_range)]
    pub p: CountRange,
    #[arg(long, value_parser = parse_tolerance, default_value = DEFAULT_TOL)]
    pub tol: Rational,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write the dual certificate of every cell here
    #[arg(long)]
    pub cert_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub json: bool,
    /// Also print the structural audit (informational)
    #[arg(long)]
    pub audit: bool,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_enum, default_value = "explicit")]
    pub variant: VariantArg,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub p: usize,
    /// Directory for the certificate file
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ImpexpArgs {
    #[arg(long, value_parser = parse_range)]
    pub k: CountRange,
    #[arg(long, value_parser = parse_range)]
    pub p: CountRange,
    #[arg(long, value_parser = parse_tolerance, default_value = DEFAULT_TOL)]
    pub tol: Rational,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Method JSON: {"k", "explicit", "alpha", "beta"} with fraction strings
    #[arg(long)]
    pub method: PathBuf,
    /// decay, advection or advection:N
    #[arg(long, default_value = "decay")]
    pub problem: String,
    /// Comma-separated step sizes
    #[arg(long, value_parser = parse_h_list)]
    pub h: StepSizes,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Write one norm-history CSV per step size here
    #[arg(long)]
    pub csv_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SupportArgs {
    #[arg(long, value_enum, default_value = "explicit")]
    pub variant: VariantArg,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long, value_parser = parse_tolerance, default_value = DEFAULT_TOL)]
    pub tol: Rational,
}

/// Outcome of a subcommand: exit status, or a usage-level failure.
type CmdResult = Result<i32, String>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Compute(a) => cmd_compute(a, out),
        Command::Certify(a) => cmd_certify(a, out),
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Threshold(a) => cmd_threshold(a, out),
        Command::Impexp(a) => cmd_impexp(a, out),
        Command::Validate(a) => cmd_validate(a, out),
        Command::Support(a) => cmd_support(a, out),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

/// Solves the queries on a pool capped by `SSP_LMM_THREADS`, if set.
fn solve_all(queries: &[SspQuery]) -> Result<Vec<Result<SspBracket, OptimizerError>>, String> {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok());
    match threads {
        Some(n) if n > 0 => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(io_err)?
            .install(|| optimal_ssp_many(queries))),
        _ => Ok(optimal_ssp_many(queries)),
    }
}

fn io_err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

#[derive(Debug, Serialize)]
struct ComputeRow {
    variant: Variant,
    k: usize,
    p: usize,
    status: &'static str,
    r_lo: String,
    r_hi: String,
    exact: bool,
    midpoint_float: Option<f64>,
    certificate: String,
}

fn grid_queries(g: &GridArgs) -> Vec<SspQuery> {
    let variant = g.variant.into();
    g.k.iter()
        .flat_map(|k| g.p.iter().map(move |p| (k, p)))
        .map(|(k, p)| SspQuery::new(k, p, variant).with_tolerance(g.tol.clone()))
        .collect()
}

fn cert_file_name(variant: Variant, k: usize, p: usize, tag: &str) -> String {
    format!("{tag}-{variant}-k{k}-p{p}.cert")
}

fn cmd_compute(a: ComputeArgs, out: &mut dyn Write) -> CmdResult {
    let queries = grid_queries(&a.grid);
    let results = solve_all(&queries)?;
    if let Some(dir) = &a.cert_dir {
        fs::create_dir_all(dir).map_err(io_err)?;
    }
    let mut rows = Vec::with_capacity(results.len());
    for (q, res) in queries.iter().zip(results) {
        let mut row = ComputeRow {
            variant: q.variant,
            k: q.k,
            p: q.p,
            status: "ok",
            r_lo: String::new(),
            r_hi: String::new(),
            exact: false,
            midpoint_float: None,
            certificate: String::new(),
        };
        match res {
            Ok(b) => {
                if b.r_lo == Rational::from_integer(0.into()) {
                    row.status = "zero";
                }
                row.r_lo = b.r_lo.to_string();
                row.r_hi = b.r_hi.to_string();
                row.exact = b.exact;
                row.midpoint_float = Some(b.midpoint_f64());
                if let Some(dir) = &a.cert_dir {
                    let path = dir.join(cert_file_name(q.variant, q.k, q.p, "dual"));
                    fs::write(&path, write_certificate(&b.dual_at_hi)).map_err(io_err)?;
                    row.certificate = path.display().to_string();
                }
            }
            Err(OptimizerError::Unbounded { .. }) => row.status = "unbounded",
            Err(e) => return Err(e.to_string()),
        }
        rows.push(row);
    }
    match a.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &rows).map_err(io_err)?;
            writeln!(out).map_err(io_err)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            for row in &rows {
                w.serialize(row).map_err(io_err)?;
            }
            w.flush().map_err(io_err)?;
        }
    }
    Ok(0)
}

fn cmd_certify(a: CertifyArgs, out: &mut dyn Write) -> CmdResult {
    let text = fs::read_to_string(&a.file).map_err(|e| format!("{}: {e}", a.file.display()))?;
    let q = parse_certificate(&text).map_err(|e| format!("{}: {e}", a.file.display()))?;
    let report = verify_certificate(&q);
    if a.json {
        serde_json::to_writer_pretty(&mut *out, &report).map_err(io_err)?;
        writeln!(out).map_err(io_err)?;
    } else {
        writeln!(out, "{q}").map_err(io_err)?;
        writeln!(out, "{report}").map_err(io_err)?;
    }
    if a.audit {
        writeln!(out, "{}", structural_audit(&q, q.system().variant())).map_err(io_err)?;
    }
    Ok(if report.verdict { 0 } else { 1 })
}

fn cmd_bounds(a: BoundsArgs, out: &mut dyn Write) -> CmdResult {
    let variant: Variant = a.variant.into();
    let report = upper_bound(variant, a.k, a.p).map_err(io_err)?;
    fs::create_dir_all(&a.out_dir).map_err(io_err)?;
    let path = a.out_dir.join(cert_file_name(variant, a.k, a.p, "bound"));
    fs::write(&path, write_certificate(&report.certificate)).map_err(io_err)?;
    let verified = verify_certificate(&report.certificate).verdict;
    if a.json {
        #[derive(Serialize)]
        struct Out<'a> {
            #[serde(flatten)]
            report: &'a crate::bounds::BoundReport,
            certificate_path: String,
            verified: bool,
        }
        let o = Out {
            report: &report,
            certificate_path: path.display().to_string(),
            verified,
        };
        serde_json::to_writer_pretty(&mut *out, &o).map_err(io_err)?;
        writeln!(out).map_err(io_err)?;
    } else {
        writeln!(out, "{}", report.bound_value).map_err(io_err)?;
        writeln!(out, "certificate: {}", path.display()).map_err(io_err)?;
    }
    Ok(if verified { 0 } else { 1 })
}

fn cmd_threshold(a: ThresholdArgs, out: &mut dyn Write) -> CmdResult {
    if a.p == 0 {
        return Err("p must be at least 1".into());
    }
    let k = existence_step_threshold(a.p);
    if a.json {
        writeln!(out, "{}", serde_json::json!({ "p": a.p, "k": k })).map_err(io_err)?;
    } else {
        writeln!(out, "{k}").map_err(io_err)?;
    }
    Ok(0)
}

#[derive(Debug, Serialize)]
struct ImpexpRow {
    k: usize,
    p: usize,
    c_exp_r_hi: String,
    c_imp_r_lo: String,
    margin: String,
    slack: String,
    holds: bool,
    squared_certificate_verified: bool,
}

fn cmd_impexp(a: ImpexpArgs, out: &mut dyn Write) -> CmdResult {
    let cells: Vec<(usize, usize)> = a.k.iter().flat_map(|k| a.p.iter().map(move |p| (k, p))).collect();
    let mut queries = Vec::with_capacity(2 * cells.len());
    for &(k, p) in &cells {
        queries.push(SspQuery::explicit(k, p).with_tolerance(a.tol.clone()));
        queries.push(SspQuery::implicit(k, 2 * p).with_tolerance(a.tol.clone()));
    }
    let results = solve_all(&queries)?;
    let mut rows = Vec::new();
    let mut all = true;
    for (i, &(k, p)) in cells.iter().enumerate() {
        let exp: &SspBracket = results[2 * i].as_ref().map_err(io_err)?;
        let imp: &SspBracket = results[2 * i + 1].as_ref().map_err(io_err)?;
        let rep = check_impexp_relation(k, p, exp, imp).map_err(io_err)?;
        all &= rep.holds && rep.squared_certificate_verified;
        rows.push(ImpexpRow {
            k,
            p,
            c_exp_r_hi: exp.r_hi.to_string(),
            c_imp_r_lo: imp.r_lo.to_string(),
            margin: rep.margin.to_string(),
            slack: rep.slack.to_string(),
            holds: rep.holds,
            squared_certificate_verified: rep.squared_certificate_verified,
        });
    }
    let mut w = csv::Writer::from_writer(&mut *out);
    for row in &rows {
        w.serialize(row).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(if all { 0 } else { 1 })
}

fn load_method(path: &Path) -> Result<MethodCoefficients, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let m: MethodCoefficients = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    m.validate().map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(m)
}

fn cmd_validate(a: ValidateArgs, out: &mut dyn Write) -> CmdResult {
    let method = load_method(&a.method)?;
    let problem = TestProblem::builtin(&a.problem).map_err(io_err)?;
    let h = a.h.0;
    let report = monotonicity_sweep(&method, &problem, &h, a.steps).map_err(io_err)?;
    if let Some(dir) = &a.csv_dir {
        fs::create_dir_all(dir).map_err(io_err)?;
        for (i, run) in report.runs.iter().enumerate() {
            let file = fs::File::create(dir.join(format!("run-{i}-h{}.csv", run.h))).map_err(io_err)?;
            run.write_csv(file).map_err(io_err)?;
        }
    }
    serde_json::to_writer_pretty(&mut *out, &report).map_err(io_err)?;
    writeln!(out).map_err(io_err)?;
    Ok(if report.all_passed { 0 } else { 1 })
}

fn cmd_support(a: SupportArgs, out: &mut dyn Write) -> CmdResult {
    let q = SspQuery::new(a.k, a.p, a.variant.into()).with_tolerance(a.tol);
    let bracket = optimal_ssp(&q).map_err(io_err)?;
    match support_analysis(&bracket) {
        Ok(rep) => {
            #[derive(Serialize)]
            struct Out<'a> {
                r_lo: String,
                r_hi: String,
                midpoint_float: f64,
                #[serde(flatten)]
                support: &'a crate::optimizer::SupportReport,
            }
            let o = Out {
                r_lo: bracket.r_lo.to_string(),
                r_hi: bracket.r_hi.to_string(),
                midpoint_float: to_f64(&((&bracket.r_lo + &bracket.r_hi) / Rational::from_integer(2.into()))),
                support: &rep,
            };
            serde_json::to_writer_pretty(&mut *out, &o).map_err(io_err)?;
            writeln!(out).map_err(io_err)?;
            Ok(0)
        }
        Err(e @ OptimizerError::NoPositiveSsp { .. }) => {
            writeln!(out, "{e}").map_err(io_err)?;
            Ok(1)
        }
        Err(e) => Err(e.to_string()),
    }
}

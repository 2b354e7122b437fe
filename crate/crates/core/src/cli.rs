//! Command-line surface: `size`, `coverage`, `candidates` and `verify`.
//!
//! Exit codes: 0 success, 1 invalid input, 2 sample-size budget exceeded,
//! 3 an oracle disagreed with the exact answer.
//!
//! Floats are written with 17 significant digits in both JSON and CSV.

use std::ffi::OsString;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, Serializer};

use crate::candidates::candidate_set;
use crate::chernoff::lambda_threshold;
use crate::coverage::{coverage_at, coverage_at_candidate, CoverageResult};
use crate::error::{ConfigError, SearchError};
use crate::oracle::{uniform_grid, verify, VerifyOptions};
use crate::search::{min_sample_size, SearchOptions, Strategy};
use crate::types::{validate, ConfidenceSpec, Config, ErrorCriterion, ParamInterval};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "POISSON_SS_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "poisson-ss",
    version,
    about = "Exact minimum sample size for estimating a Poisson mean"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimum sample size for the given margin and confidence.
    Size(SizeArgs),
    /// Coverage probability curve at a fixed sample size.
    Coverage(CoverageArgs),
    /// List the candidate set at a fixed sample size.
    Candidates(CandidatesArgs),
    /// Cross-check the answer against grid, brute-force and Monte Carlo oracles.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum CriterionKind {
    #[value(alias = "absolute")]
    Abs,
    #[value(alias = "relative")]
    Rel,
    Mixed,
}

#[derive(Debug, Clone, Args)]
struct ProblemArgs {
    /// Error criterion.
    #[arg(long, value_enum)]
    criterion: Option<CriterionKind>,
    /// Margin for the absolute or relative criterion.
    #[arg(long)]
    eps: Option<f64>,
    /// Absolute margin of the mixed criterion.
    #[arg(long = "eps-a")]
    eps_a: Option<f64>,
    /// Relative margin of the mixed criterion.
    #[arg(long = "eps-r")]
    eps_r: Option<f64>,
    /// Lower end of the range of the Poisson mean.
    #[arg(long)]
    a: Option<f64>,
    /// Upper end of the range of the Poisson mean.
    #[arg(long)]
    b: Option<f64>,
}

#[derive(Debug, Clone, Args)]
struct SearchArgs {
    /// First sample size to try.
    #[arg(long, default_value_t = 1)]
    start_n: u64,
    /// Largest sample size to try.
    #[arg(long, default_value_t = 1_000_000)]
    max_n: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Linear)]
    strategy: StrategyArg,
    /// Evaluate every candidate even for failing sample sizes.
    #[arg(long)]
    no_fail_fast: bool,
    /// Disable Chernoff truncation of the upper endpoint.
    #[arg(long)]
    no_truncation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Linear,
    #[value(alias = "gallop-and-verify")]
    Gallop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SizeFormat {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct SizeArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Confidence parameter; coverage must exceed 1 − delta.
    #[arg(long)]
    delta: Option<f64>,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, value_enum, default_value_t = SizeFormat::Json)]
    format: SizeFormat,
    /// Batch file: one JSON job per line; one JSON result per line is written.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct CoverageArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Sample size.
    #[arg(long)]
    n: u64,
    /// Evaluate on a uniform grid of this many points instead of the candidate set.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
}

#[derive(Debug, Args)]
struct CandidatesArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Sample size.
    #[arg(long)]
    n: u64,
    /// Check the size of the set against its theoretical bound.
    #[arg(long)]
    check_bound: bool,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    delta: Option<f64>,
    #[command(flatten)]
    search: SearchArgs,
    /// Points in the uniform grid scan.
    #[arg(long, default_value_t = 10_000)]
    grid_points: usize,
    /// Monte Carlo trials.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
}

/// A failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::invalid(e.to_string())
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        let code = match e {
            SearchError::MaxSampleSizeExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::invalid(e.to_string())
    }
}

/// 17 significant digits in scientific notation; `null` for non-finite values.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

struct SigDigits;

impl Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes `value` as compact JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

fn criterion_from(p: &ProblemArgs) -> Result<ErrorCriterion, Failure> {
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| Failure::invalid(format!("missing --{flag}")));
    let kind = p.criterion.ok_or_else(|| Failure::invalid("missing --criterion"))?;
    match kind {
        CriterionKind::Abs | CriterionKind::Rel => {
            if p.eps_a.is_some() || p.eps_r.is_some() {
                return Err(Failure::invalid("--eps-a/--eps-r only apply to --criterion mixed"));
            }
            let eps = need(p.eps, "eps")?;
            Ok(if kind == CriterionKind::Abs {
                ErrorCriterion::Absolute { eps }
            } else {
                ErrorCriterion::Relative { eps }
            })
        }
        CriterionKind::Mixed => {
            if p.eps.is_some() {
                return Err(Failure::invalid(
                    "--criterion mixed takes --eps-a and --eps-r, not --eps",
                ));
            }
            Ok(ErrorCriterion::Mixed {
                eps_a: need(p.eps_a, "eps-a")?,
                eps_r: need(p.eps_r, "eps-r")?,
            })
        }
    }
}

fn interval_from(p: &ProblemArgs) -> Result<ParamInterval, Failure> {
    let a = p.a.ok_or_else(|| Failure::invalid("missing --a"))?;
    let b = p.b.ok_or_else(|| Failure::invalid("missing --b"))?;
    Ok(ParamInterval::new(a, b))
}

// Commands that do not test a confidence level still validate the rest of
// the configuration; any delta inside (0, 1) will do.
const NEUTRAL_DELTA: f64 = 0.5;

fn config_from(p: &ProblemArgs, delta: Option<f64>) -> Result<Config, Failure> {
    Ok(validate(
        criterion_from(p)?,
        interval_from(p)?,
        ConfidenceSpec::new(delta.unwrap_or(NEUTRAL_DELTA)),
    )?)
}

fn search_options(s: &SearchArgs) -> SearchOptions {
    SearchOptions {
        start_n: s.start_n,
        max_n: s.max_n,
        strategy: match s.strategy {
            StrategyArg::Linear => Strategy::Linear,
            StrategyArg::Gallop => Strategy::GallopAndVerify,
        },
        fail_fast: !s.no_fail_fast,
        chernoff_truncation: !s.no_truncation,
    }
}

/// JSON report of `size`.
#[derive(Debug, Serialize)]
struct SizeReport {
    criterion: ErrorCriterion,
    interval: ParamInterval,
    delta: f64,
    n_min: u64,
    worst_lambda: f64,
    worst_coverage: f64,
    truncated_b: f64,
    evaluations: u64,
    elapsed_ms: f64,
    /// Chernoff threshold at `n_min`, for criteria with a relative margin.
    chernoff_threshold: Option<f64>,
}

fn plan_report(config: &Config, opts: &SearchOptions) -> Result<SizeReport, Failure> {
    let start = Instant::now();
    let plan = min_sample_size(config, opts)?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let delta = config.confidence().delta;
    Ok(SizeReport {
        criterion: config.criterion(),
        interval: config.interval(),
        delta,
        n_min: plan.n_min,
        worst_lambda: plan.worst_lambda,
        worst_coverage: plan.worst_coverage,
        truncated_b: plan.truncated_b,
        evaluations: plan.evaluations,
        elapsed_ms,
        chernoff_threshold: config
            .effective_criterion()
            .relative_eps()
            .map(|eps_r| lambda_threshold(plan.n_min, eps_r, delta)),
    })
}

fn cmd_size(args: &SizeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if let Some(path) = &args.config {
        return run_batch(path, &search_options(&args.search), out);
    }
    let config = config_from(
        &args.problem,
        Some(args.delta.ok_or_else(|| Failure::invalid("missing --delta"))?),
    )?;
    let report = plan_report(&config, &search_options(&args.search))?;
    match args.format {
        SizeFormat::Json => writeln!(out, "{}", to_json(&report))?,
        SizeFormat::Text => {
            writeln!(out, "criterion       {:?}", report.criterion)?;
            writeln!(out, "interval        [{}, {}]", report.interval.a, report.interval.b)?;
            writeln!(out, "delta           {}", report.delta)?;
            writeln!(out, "n_min           {}", report.n_min)?;
            writeln!(out, "worst lambda    {}", format_f64(report.worst_lambda))?;
            writeln!(out, "worst coverage  {}", format_f64(report.worst_coverage))?;
            writeln!(out, "truncated b     {}", format_f64(report.truncated_b))?;
            writeln!(out, "evaluations     {}", report.evaluations)?;
            writeln!(out, "elapsed         {:.1} ms", report.elapsed_ms)?;
        }
    }
    Ok(EXIT_OK)
}

/// One line of a batch file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BatchJob {
    criterion: CriterionKind,
    #[serde(default)]
    eps: Option<f64>,
    #[serde(default)]
    eps_a: Option<f64>,
    #[serde(default)]
    eps_r: Option<f64>,
    a: f64,
    b: f64,
    delta: f64,
    #[serde(default)]
    start_n: Option<u64>,
    #[serde(default)]
    max_n: Option<u64>,
}

#[derive(Serialize)]
struct BatchError {
    line: usize,
    exit_code: i32,
    error: String,
}

fn run_job(line: usize, text: &str, defaults: &SearchOptions) -> (i32, String) {
    let result = serde_json::from_str::<BatchJob>(text)
        .map_err(|e| Failure::invalid(format!("line {line}: {e}")))
        .and_then(|job| {
            let problem = ProblemArgs {
                criterion: Some(job.criterion),
                eps: job.eps,
                eps_a: job.eps_a,
                eps_r: job.eps_r,
                a: Some(job.a),
                b: Some(job.b),
            };
            let config = config_from(&problem, Some(job.delta))?;
            let opts = SearchOptions {
                start_n: job.start_n.unwrap_or(defaults.start_n),
                max_n: job.max_n.unwrap_or(defaults.max_n),
                ..*defaults
            };
            plan_report(&config, &opts)
        });
    match result {
        Ok(report) => (EXIT_OK, to_json(&report)),
        Err(f) => (
            f.code,
            to_json(&BatchError {
                line,
                exit_code: f.code,
                error: f.message,
            }),
        ),
    }
}

fn run_batch(path: &PathBuf, defaults: &SearchOptions, out: &mut dyn Write) -> Result<i32, Failure> {
    let file = std::fs::File::open(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    let jobs: Vec<(usize, String)> = io::BufReader::new(file)
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)))
        .collect::<Result<_, _>>()?;
    let results: Vec<(i32, String)> = jobs
        .par_iter()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| run_job(*i, l, defaults))
        .collect();
    let mut code = EXIT_OK;
    for (c, line) in results {
        writeln!(out, "{line}")?;
        code = code.max(c);
    }
    Ok(code)
}

fn write_rows(rows: &[CoverageResult], format: TableFormat, out: &mut dyn Write) -> io::Result<()> {
    match format {
        TableFormat::Csv => {
            writeln!(out, "lambda,g,h,coverage")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{}",
                    format_f64(r.lambda),
                    r.g,
                    r.h,
                    format_f64(r.coverage)
                )?;
            }
        }
        TableFormat::Json => writeln!(out, "{}", to_json(&rows))?,
    }
    Ok(())
}

fn cmd_coverage(args: &CoverageArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let config = config_from(&args.problem, None)?;
    if args.n == 0 {
        return Err(Failure::invalid("--n must be >= 1"));
    }
    let crit = config.criterion();
    let rows: Vec<CoverageResult> = match args.grid {
        Some(k) if k < 2 => return Err(Failure::invalid("--grid needs at least 2 points")),
        Some(k) => uniform_grid(config.interval(), k)
            .into_par_iter()
            .map(|l| coverage_at(crit, args.n, l))
            .collect(),
        None => candidate_set(crit, args.n, config.interval())
            .points
            .par_iter()
            .map(|p| coverage_at_candidate(crit, args.n, p))
            .collect(),
    };
    write_rows(&rows, args.format, out)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CandidateRow {
    lambda: f64,
    kind: &'static str,
    ell: Option<i64>,
    also: Option<&'static str>,
    also_ell: Option<i64>,
}

#[derive(Serialize)]
struct BoundCheck {
    count: usize,
    bound: f64,
    holds: bool,
}

#[derive(Serialize)]
struct CandidateListing {
    n: u64,
    points: Vec<CandidateRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<BoundCheck>,
}

fn cmd_candidates(args: &CandidatesArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let config = config_from(&args.problem, None)?;
    if args.n == 0 {
        return Err(Failure::invalid("--n must be >= 1"));
    }
    let set = candidate_set(config.criterion(), args.n, config.interval());
    let rows: Vec<CandidateRow> = set
        .points
        .iter()
        .map(|p| CandidateRow {
            lambda: p.value,
            kind: p.kind.tag(),
            ell: p.kind.ell(),
            also: p.coincident.map(|k| k.tag()),
            also_ell: p.coincident.and_then(|k| k.ell()),
        })
        .collect();
    let bound = args.check_bound.then(|| BoundCheck {
        count: set.len(),
        bound: set.cardinality_bound(),
        holds: (set.len() as f64) < set.cardinality_bound(),
    });
    let holds = bound.as_ref().is_none_or(|b| b.holds);
    match args.format {
        TableFormat::Csv => {
            writeln!(out, "lambda,kind,ell,also,also_ell")?;
            let opt = |v: Option<i64>| v.map(|l| l.to_string()).unwrap_or_default();
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    format_f64(r.lambda),
                    r.kind,
                    opt(r.ell),
                    r.also.unwrap_or(""),
                    opt(r.also_ell)
                )?;
            }
            if let Some(b) = &bound {
                writeln!(
                    out,
                    "# count {} bound {} {}",
                    b.count,
                    format_f64(b.bound),
                    if b.holds { "ok" } else { "VIOLATED" }
                )?;
            }
        }
        TableFormat::Json => {
            let listing = CandidateListing {
                n: args.n,
                points: rows,
                bound,
            };
            writeln!(out, "{}", to_json(&listing))?;
        }
    }
    Ok(if holds { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let config = config_from(
        &args.problem,
        Some(args.delta.ok_or_else(|| Failure::invalid("missing --delta"))?),
    )?;
    if args.trials == 0 {
        return Err(Failure::invalid("--trials must be >= 1"));
    }
    if args.grid_points < 2 {
        return Err(Failure::invalid("--grid-points must be >= 2"));
    }
    let opts = VerifyOptions {
        search: search_options(&args.search),
        grid_points: args.grid_points,
        trials: args.trials,
        seed: args.seed,
        ..VerifyOptions::default()
    };
    let report = verify(&config, &opts)?;
    writeln!(out, "{}", to_json(&report))?;
    Ok(if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Size(a) => cmd_size(a, out),
        Command::Coverage(a) => cmd_coverage(a, out),
        Command::Candidates(a) => cmd_candidates(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Configures the global thread pool from [`THREADS_ENV`], if set.
pub fn init_threads_from_env() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

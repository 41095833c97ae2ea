//! The `bisym` command line: verify algebraic laws of a two-place mean,
//! extract its generator, reconstruct it, or refute associativity, writing
//! a JSON report (and a CSV generator table) per run.
//!
//! Exit codes: 0 when every requested check passed, 1 when some check
//! failed (reports are still written), 2 on usage or evaluation errors.

pub mod expr;
pub mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use bisym_core::extract::{
    cross_check_consistency, extend_generator, extract_generator, gap_analysis, interpolate_generator,
    reconstruct_and_compare, table_monotone_check, DEFAULT_JUMP_FACTOR, MAX_CROSS_CHECK_DEPTH,
};
use bisym_core::means::{catalog_get, CATALOG};
use bisym_core::verify::{aczel3_profile, find_neutral_element, prop1_witness, run_check, Property};
use bisym_core::{Interval, ToleranceConfig, TwoPlaceFunction};

pub use expr::{parse_mean_expr, MeanExpr, ParseError};
pub use report::{CatalogItem, ResultEntry, RunReport};

/// Grid size used to pre-check closure of user expressions.
const CLOSURE_GRID: usize = 17;

#[derive(Debug, Parser)]
#[command(name = "bisym", version, about = "Verify, decompose and refute two-place means")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check algebraic laws of a mean.
    Verify(VerifyArgs),
    /// Build the generator table on the dyadic rationals.
    Extract(ExtractArgs),
    /// Compare a mean with the quasi-arithmetic mean of its extracted generator.
    Reconstruct(ReconstructArgs),
    /// Refute reflexive + associative + strictly increasing at a pair.
    Falsify(FalsifyArgs),
    /// List the built-in means.
    Catalog(OutArgs),
}

#[derive(Debug, Args)]
struct MeanArgs {
    /// `catalog:NAME` or `expr:SOURCE` (an expression in x and y).
    #[arg(long)]
    mean: String,
    /// Catalog parameter, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long, value_name = "A,B", allow_hyphen_values = true)]
    interval: String,
}

#[derive(Debug, Args)]
struct TolArgs {
    #[arg(long)]
    samples: Option<usize>,
    /// Points per axis of grid checks.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Equality tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Extra margin on top of the tolerance for strict comparisons.
    #[arg(long)]
    strict_margin: Option<f64>,
}

impl TolArgs {
    fn config(&self) -> ToleranceConfig {
        let d = ToleranceConfig::default();
        ToleranceConfig {
            eq_tol: self.tol.unwrap_or(d.eq_tol),
            strict_margin: self.strict_margin.unwrap_or(d.strict_margin),
            grid_n: self.grid.unwrap_or(d.grid_n),
            samples: self.samples.unwrap_or(d.samples),
            seed: self.seed.unwrap_or(d.seed),
        }
    }
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Report file; printed to stdout when omitted.
    #[arg(long, value_name = "FILE.json")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    Refl,
    Sym,
    Bisym,
    Assoc,
    StrictInc,
    StrictMean,
    Cancel,
    Neutral,
}

impl Check {
    fn property(self) -> Property {
        match self {
            Check::Refl => Property::Reflexive,
            Check::Sym => Property::Symmetric,
            Check::Bisym => Property::Bisymmetric,
            Check::Assoc => Property::Associative,
            Check::StrictInc => Property::PartialStrictIncrease,
            Check::StrictMean => Property::StrictMean,
            Check::Cancel => Property::Cancellative,
            Check::Neutral => Property::NeutralElement,
        }
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    mean: MeanArgs,
    /// Comma-separated; defaults to refl,sym,bisym,strict-inc.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<Check>,
    #[command(flatten)]
    tol: TolArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[command(flatten)]
    mean: MeanArgs,
    #[arg(long)]
    depth: u32,
    /// Also check path independence of the recursion (up to depth 12).
    #[arg(long)]
    cross_check: bool,
    #[arg(long, default_value_t = DEFAULT_JUMP_FACTOR)]
    jump_factor: f64,
    /// Where to write the generator table.
    #[arg(long, value_name = "FILE.csv")]
    table: Option<PathBuf>,
    #[command(flatten)]
    tol: TolArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Continue the dyadic recursion below the table on demand.
    Dyadic,
    /// Piecewise-linear interpolation of the table.
    Linear,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    #[command(flatten)]
    mean: MeanArgs,
    #[arg(long)]
    depth: u32,
    #[arg(long, value_enum, default_value_t = Method::Dyadic)]
    method: Method,
    #[command(flatten)]
    tol: TolArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct FalsifyArgs {
    #[command(flatten)]
    mean: MeanArgs,
    #[arg(long, value_name = "A0,B0", allow_hyphen_values = true)]
    pair: String,
    /// Also tabulate z ↦ F(F(a,z), F(z,a)) at this `a`.
    #[arg(long, value_name = "A", allow_hyphen_values = true)]
    profile_at: Option<f64>,
    #[command(flatten)]
    tol: TolArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(bisym_core::Error),
    Io { path: PathBuf, reason: String },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, reason } => write!(f, "cannot write {}: {reason}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<bisym_core::Error> for CliError {
    fn from(e: bisym_core::Error) -> Self {
        CliError::Core(e)
    }
}

fn parse_pair(text: &str, flag: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("{flag} expects two comma-separated numbers, got `{text}`"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
    let mut map = BTreeMap::new();
    for p in raw {
        let bad = || CliError::Usage(format!("--param expects KEY=VALUE, got `{p}`"));
        let (k, v) = p.split_once('=').ok_or_else(bad)?;
        let v: f64 = v.trim().parse().map_err(|_| bad())?;
        if map.insert(k.trim().to_string(), v).is_some() {
            return Err(CliError::Usage(format!("parameter `{}` given twice", k.trim())));
        }
    }
    Ok(map)
}

/// Builds the mean named by `--mean`. Expressions are checked for closure
/// on a coarse grid unless `allow_escape` is set.
fn resolve_mean(args: &MeanArgs, allow_escape: bool) -> Result<TwoPlaceFunction, CliError> {
    let (lo, hi) = parse_pair(&args.interval, "--interval")?;
    let iv = Interval::new(lo, hi)?;
    let params = parse_params(&args.params)?;
    if let Some(name) = args.mean.strip_prefix("catalog:") {
        Ok(catalog_get(name, iv, &params)?)
    } else if let Some(src) = args.mean.strip_prefix("expr:") {
        if !params.is_empty() {
            return Err(CliError::Usage("--param applies to catalog means only".into()));
        }
        let e = parse_mean_expr(src).map_err(|e| CliError::Usage(format!("in expression `{src}`: {e}")))?;
        let f = e.into_function(iv);
        if !allow_escape {
            f.check_closure(CLOSURE_GRID)?;
        }
        Ok(f)
    } else {
        Err(CliError::Usage(format!("--mean must start with `catalog:` or `expr:`, got `{}`", args.mean)))
    }
}

fn entry_name(e: &ResultEntry) -> &'static str {
    match e {
        ResultEntry::Property(r) => r.property.name(),
        ResultEntry::Neutral(_) => Property::NeutralElement.name(),
        ResultEntry::Consistency(_) => "consistency",
        ResultEntry::Gap(_) => "no_jump",
        ResultEntry::Reconstruction(_) => "reconstruction",
        ResultEntry::Refutation { .. } => "refutation",
        ResultEntry::Profile(_) => "profile",
        ResultEntry::Catalog { .. } => "catalog",
    }
}

fn summarize(results: &[ResultEntry], cfg: &ToleranceConfig) -> String {
    let checks: Vec<_> = results.iter().filter_map(|r| r.passed(cfg).map(|p| (entry_name(r), p))).collect();
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    if failed.is_empty() {
        format!("all {} checks passed", checks.len())
    } else {
        format!("{} of {} checks failed: {}", failed.len(), checks.len(), failed.join(", "))
    }
}

struct Outcome {
    report: RunReport,
    table_csv: Option<(PathBuf, String)>,
    out: Option<PathBuf>,
}

impl Outcome {
    fn new(command: Vec<String>, config: ToleranceConfig, results: Vec<ResultEntry>, note: Option<String>) -> Self {
        let summary = summarize(&results, &config);
        let verdict = match note {
            Some(n) => format!("{n}; {summary}"),
            None => summary,
        };
        let report = RunReport { version: env!("CARGO_PKG_VERSION").to_string(), command, config, results, verdict };
        Outcome { report, table_csv: None, out: None }
    }

    fn all_passed(&self) -> bool {
        let cfg = &self.report.config;
        self.report.results.iter().all(|r| r.passed(cfg) != Some(false))
    }
}

fn verify(a: &VerifyArgs, command: Vec<String>) -> Result<Outcome, CliError> {
    let f = resolve_mean(&a.mean, false)?;
    let cfg = a.tol.config();
    cfg.validate()?;
    let checks =
        if a.checks.is_empty() { vec![Check::Refl, Check::Sym, Check::Bisym, Check::StrictInc] } else { a.checks.clone() };
    let mut results = Vec::new();
    for c in checks {
        results.push(match c {
            Check::Neutral => ResultEntry::Neutral(find_neutral_element(&f, &cfg)?),
            other => ResultEntry::Property(run_check(&f, other.property(), &cfg)?),
        });
    }
    Ok(Outcome::new(command, cfg, results, None))
}

const UNVERIFIED: &str = "hypotheses unverified: generator table is not strictly increasing";

fn extract(a: &ExtractArgs, command: Vec<String>) -> Result<Outcome, CliError> {
    let f = resolve_mean(&a.mean, false)?;
    let cfg = a.tol.config();
    cfg.validate()?;
    let table = extract_generator(&f, a.depth)?;
    let monotone = table_monotone_check(&table, &cfg)?;
    let increasing = monotone.passed;
    let mut results = vec![ResultEntry::Property(monotone)];
    let mut note = None;
    if increasing {
        results.push(ResultEntry::Gap(gap_analysis(&table, a.jump_factor)?));
    } else {
        note = Some(UNVERIFIED.to_string());
    }
    if a.cross_check {
        let depth = a.depth.min(MAX_CROSS_CHECK_DEPTH);
        results.push(ResultEntry::Consistency(cross_check_consistency(&f, depth, &cfg)?));
    }
    let mut outcome = Outcome::new(command, cfg, results, note);
    outcome.table_csv = a.table.clone().map(|p| (p, table.to_csv()));
    Ok(outcome)
}

fn reconstruct(a: &ReconstructArgs, command: Vec<String>) -> Result<Outcome, CliError> {
    let f = resolve_mean(&a.mean, false)?;
    let cfg = a.tol.config();
    cfg.validate()?;
    let table = extract_generator(&f, a.depth)?;
    let monotone = table_monotone_check(&table, &cfg)?;
    if !monotone.passed {
        return Ok(Outcome::new(command, cfg, vec![ResultEntry::Property(monotone)], Some(UNVERIFIED.into())));
    }
    let gen = match a.method {
        Method::Dyadic => extend_generator(&table, &f)?,
        Method::Linear => interpolate_generator(&table)?,
    };
    let rec = reconstruct_and_compare(&f, &gen, &cfg)?.at_depth(a.depth);
    Ok(Outcome::new(command, cfg, vec![ResultEntry::Property(monotone), ResultEntry::Reconstruction(rec)], None))
}

fn falsify(a: &FalsifyArgs, command: Vec<String>) -> Result<Outcome, CliError> {
    let f = resolve_mean(&a.mean, true)?;
    let cfg = a.tol.config();
    cfg.validate()?;
    let (a0, b0) = parse_pair(&a.pair, "--pair")?;
    let refutation = prop1_witness(&f, a0, b0, &cfg)?;
    let reproduced = refutation.reproduce(&f)?;
    let note = refutation.message.clone();
    let mut results = vec![ResultEntry::Refutation { refutation, reproduced }];
    if let Some(at) = a.profile_at {
        results.push(ResultEntry::Profile(aczel3_profile(&f, at, &cfg)?));
    }
    Ok(Outcome::new(command, cfg, results, Some(note)))
}

fn catalog(command: Vec<String>) -> Outcome {
    let entries = CATALOG
        .iter()
        .map(|e| CatalogItem { name: e.name.into(), params: e.params.into(), summary: e.summary.into() })
        .collect();
    let mut o = Outcome::new(command, ToleranceConfig::default(), vec![ResultEntry::Catalog { entries }], None);
    o.report.verdict = format!("{} built-in means", CATALOG.len());
    o
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io { path: path.to_path_buf(), reason: e.to_string() })
}

/// Parses `argv` (program name first), runs the command, writes its files
/// and returns the exit code with the report, if one was produced.
/// Human-facing messages go to `stdout` and `stderr`.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> (i32, Option<RunReport>)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return (2, None);
            }
            let _ = write!(stdout, "{}", e.render());
            return (0, None);
        }
    };
    let mut command = vec!["bisym".to_string()];
    command.extend(argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()));
    let outcome = match &cli.command {
        Command::Verify(a) => verify(a, command).map(|o| Outcome { out: a.out.out.clone(), ..o }),
        Command::Extract(a) => extract(a, command).map(|o| Outcome { out: a.out.out.clone(), ..o }),
        Command::Reconstruct(a) => reconstruct(a, command).map(|o| Outcome { out: a.out.out.clone(), ..o }),
        Command::Falsify(a) => falsify(a, command).map(|o| Outcome { out: a.out.out.clone(), ..o }),
        Command::Catalog(a) => Ok(Outcome { out: a.out.clone(), ..catalog(command) }),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return (2, None);
        }
    };
    let json = outcome.report.to_json();
    let written = (|| {
        if let Some((path, csv)) = &outcome.table_csv {
            write_file(path, csv)?;
        }
        match &outcome.out {
            Some(path) => write_file(path, &json),
            None => stdout.write_all(json.as_bytes()).map_err(|e| CliError::Io { path: "<stdout>".into(), reason: e.to_string() }),
        }
    })();
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return (2, Some(outcome.report));
    }
    let code = if outcome.all_passed() { 0 } else { 1 };
    if outcome.out.is_some() {
        let _ = writeln!(stderr, "{}", outcome.report.verdict);
    }
    (code, Some(outcome.report))
}

/// [`run_with`] on the process' standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    run_with(argv, &mut out, &mut err).0
}

/// Runs a command without printing anything, returning the exit code and
/// the report.
pub fn run_command<I, T>(argv: I) -> (i32, Option<RunReport>)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    run_with(argv, &mut std::io::sink(), &mut std::io::sink())
}

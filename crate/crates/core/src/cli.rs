//! The `dfi` command-line front end.
//!
//! Exit codes: 0 success, 1 a bound was found violated, 2 bad input,
//! 3 internal inconsistency. Output is deterministic for a fixed seed; CSV
//! floats carry 17 significant digits.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families;
use crate::inequalities::{self, CheckName, InequalityCheck};
use crate::pmf::{self, DistributionFamily, Pmf, ValidationConfig};
use crate::quantities::{self, QuantityReport};
use crate::tightness::{self, OptimizeConfig, OptimizeResult, SweepResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONSISTENCY: i32 = 3;

const CONJECTURE_LABEL: &str = "conjecture data";

#[derive(Debug, Parser)]
#[command(
    name = "dfi",
    version,
    about = "Discrete Fisher information and its inequalities"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Plain, global = true)]
    pub format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print every quantity of a pmf, with closed forms when the family has them.
    Compute(InputArgs),
    /// Evaluate all applicable inequalities.
    Verify(InputArgs),
    /// Geometric-family tightness ratios from closed forms.
    Sweep(SweepArgs),
    /// Check all inequalities over a seeded corpus of Dirichlet pmfs.
    RandomCheck(RandomCheckArgs),
    /// Search the simplex for small N_d·I_d.
    Optimize(OptimizeArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Family spec `name:param[,param]`, e.g. `geometric:0.25`, `binomial:10,0.3`.
    #[arg(
        long,
        conflicts_with = "pmf_file",
        required_unless_present = "pmf_file"
    )]
    pub family: Option<String>,

    /// JSON `{"values": [...], "tail_mass_bound": x}` or one probability per line.
    #[arg(long)]
    pub pmf_file: Option<PathBuf>,

    /// Tail mass ceiling for truncated families.
    #[arg(long, env = "DFI_EPS_TAIL", default_value_t = pmf::DEFAULT_EPS_TAIL)]
    pub eps_tail: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Strictly decreasing comma-separated q values in (0, 1].
    #[arg(long, value_delimiter = ',', default_values_t = tightness::DEFAULT_Q_GRID.to_vec())]
    pub q_grid: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct RandomCheckArgs {
    /// Corpus size.
    #[arg(long)]
    pub n: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Fix the support size instead of drawing it from 1..=64.
    #[arg(long)]
    pub support: Option<usize>,

    /// Fix the Dirichlet concentration instead of drawing from {0.1, 1, 10}.
    #[arg(long)]
    pub concentration: Option<f64>,

    /// Where violating pmfs are dumped.
    #[arg(long, default_value = "violations.json")]
    pub witness: PathBuf,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub support: usize,

    #[arg(long, default_value_t = 16)]
    pub restarts: usize,

    #[arg(long, default_value_t = 1e-12)]
    pub step_tol: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Inconsistency(_) => EXIT_INCONSISTENCY,
        _ => EXIT_INPUT,
    }
}

/// Parse `args` (including the program name) and run. Diagnostics go to
/// `err`; results go to `out` unless `--output` is given.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok((rendered, code)) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, rendered.as_bytes()).map_err(Error::from),
                None => out.write_all(rendered.as_bytes()).map_err(Error::from),
            };
            match written {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_INPUT
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<(String, i32)> {
    match &cli.command {
        Command::Compute(input) => cmd_compute(input, cli.format),
        Command::Verify(input) => cmd_verify(input, cli.format),
        Command::Sweep(args) => cmd_sweep(args, cli.format),
        Command::RandomCheck(args) => cmd_random_check(args, cli.format),
        Command::Optimize(args) => cmd_optimize(args, cli.format),
    }
}

fn load_input(input: &InputArgs) -> Result<(String, Pmf)> {
    if !(input.eps_tail > 0.0 && input.eps_tail.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "eps-tail must be positive, got {}",
            input.eps_tail
        )));
    }
    match (&input.family, &input.pmf_file) {
        (Some(spec), None) => {
            let family: DistributionFamily = spec.parse()?;
            Ok((
                family.to_string(),
                pmf::from_family(&family, input.eps_tail)?,
            ))
        }
        (None, Some(path)) => {
            let config = ValidationConfig::with_max_tail(input.eps_tail);
            Ok((
                format!("file:{}", path.display()),
                pmf::read_pmf_file(path, &config)?,
            ))
        }
        _ => Err(Error::InvalidParameter(
            "exactly one of --family and --pmf-file is required".into(),
        )),
    }
}

/// 17 significant digits.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn plain(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect()
}

#[derive(Debug, Serialize)]
struct OracleComparison {
    quantity: &'static str,
    numeric: f64,
    oracle: f64,
    abs_diff: f64,
}

#[derive(Debug, Serialize)]
struct ComputeOutput {
    source: String,
    support_len: usize,
    tail_mass_bound: f64,
    report: QuantityReport,
    oracle: Option<Vec<OracleComparison>>,
}

fn compare_oracle(
    report: &QuantityReport,
    oracle: &families::OracleValues,
) -> Vec<OracleComparison> {
    let pairs = [
        ("dfi", report.dfi, oracle.dfi),
        ("entropy", report.entropy, oracle.entropy),
        ("entropy_power", report.entropy_power, oracle.entropy_power),
        ("mean", report.mean, oracle.mean),
        ("variance", report.variance, oracle.variance),
        ("max_pmf", report.max_pmf, oracle.max_pmf),
    ];
    pairs
        .into_iter()
        .filter_map(|(quantity, numeric, oracle)| {
            oracle.map(|o| OracleComparison {
                quantity,
                numeric,
                oracle: o,
                abs_diff: (numeric - o).abs(),
            })
        })
        .collect()
}

fn report_rows(r: &QuantityReport) -> Vec<(&'static str, f64)> {
    vec![
        ("dfi", r.dfi),
        ("entropy", r.entropy),
        ("entropy_power", r.entropy_power),
        ("mean", r.mean),
        ("variance", r.variance),
        ("max_pmf", r.max_pmf),
        ("argmax", r.argmax as f64),
        ("p0", r.p0),
        ("autocorr_lag1", r.autocorr_lag1),
        ("error_bound_dfi", r.error_bound_dfi),
        ("error_bound_entropy", r.error_bound_entropy),
    ]
}

pub fn cmd_compute(input: &InputArgs, format: Format) -> Result<(String, i32)> {
    let (source, p) = load_input(input)?;
    let report = quantities::quantity_report(&p);
    let oracle = match p.origin() {
        Some(family) => {
            families::oracle_for(family, input.eps_tail)?.map(|o| compare_oracle(&report, &o))
        }
        None => None,
    };
    let rendered = match format {
        Format::Json => to_json(&ComputeOutput {
            source,
            support_len: p.len(),
            tail_mass_bound: p.tail_mass_bound(),
            report,
            oracle,
        })?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = report_rows(&report)
                .into_iter()
                .map(|(name, value)| {
                    let cmp = oracle
                        .as_ref()
                        .and_then(|o| o.iter().find(|c| c.quantity == name));
                    vec![
                        name.to_string(),
                        fmt_f64(value),
                        cmp.map_or(String::new(), |c| fmt_f64(c.oracle)),
                        cmp.map_or(String::new(), |c| fmt_f64(c.abs_diff)),
                    ]
                })
                .collect();
            to_csv(&["quantity", "value", "oracle", "abs_diff"], &rows)?
        }
        Format::Plain => {
            let mut rows = vec![
                ("source".to_string(), source),
                ("support_len".to_string(), p.len().to_string()),
                (
                    "tail_mass_bound".to_string(),
                    format!("{:e}", p.tail_mass_bound()),
                ),
            ];
            for (name, value) in report_rows(&report) {
                let cmp = oracle
                    .as_ref()
                    .and_then(|o| o.iter().find(|c| c.quantity == name));
                let text = match cmp {
                    Some(c) => {
                        format!("{value}  (closed form {}, diff {:e})", c.oracle, c.abs_diff)
                    }
                    None => value.to_string(),
                };
                rows.push((name.to_string(), text));
            }
            plain(&rows)
        }
    };
    Ok((rendered, EXIT_OK))
}

#[derive(Debug, Serialize)]
struct VerifyOutput {
    source: String,
    all_satisfied: bool,
    checks: Vec<InequalityCheck>,
}

fn check_rows(checks: &[InequalityCheck]) -> Vec<Vec<String>> {
    checks
        .iter()
        .map(|c| {
            vec![
                c.name.to_string(),
                fmt_f64(c.lhs),
                fmt_f64(c.rhs),
                fmt_f64(c.gap),
                c.satisfied.to_string(),
                c.equality_case.to_string(),
            ]
        })
        .collect()
}

pub fn cmd_verify(input: &InputArgs, format: Format) -> Result<(String, i32)> {
    let (source, p) = load_input(input)?;
    let checks = inequalities::check_all(&p);
    let all_satisfied = checks.iter().all(|c| c.satisfied);
    let code = if all_satisfied {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    };
    let rendered = match format {
        Format::Json => to_json(&VerifyOutput {
            source,
            all_satisfied,
            checks,
        })?,
        Format::Csv => to_csv(
            &["name", "lhs", "rhs", "gap", "satisfied", "equality_case"],
            &check_rows(&checks),
        )?,
        Format::Plain => {
            let mut rows = vec![("source".to_string(), source)];
            for c in &checks {
                let op = if c.strict { ">" } else { ">=" };
                let mut text = format!(
                    "{} {op} {}  gap {:e}  {}",
                    c.lhs,
                    c.rhs,
                    c.gap,
                    if c.satisfied { "ok" } else { "VIOLATED" }
                );
                if c.equality_case {
                    text.push_str("  (equality case)");
                }
                rows.push((c.name.to_string(), text));
            }
            plain(&rows)
        }
    };
    Ok((rendered, code))
}

pub fn cmd_sweep(args: &SweepArgs, format: Format) -> Result<(String, i32)> {
    let sweep: SweepResult = tightness::geometric_sweep(&args.q_grid)?;
    let rendered = match format {
        Format::Json => to_json(&sweep)?,
        Format::Csv | Format::Plain => {
            let rows: Vec<Vec<String>> = sweep
                .points
                .iter()
                .map(|p| {
                    vec![
                        fmt_f64(p.q),
                        fmt_f64(p.dfi),
                        fmt_f64(p.max_pmf),
                        fmt_f64(p.entropy_power),
                        fmt_f64(p.ratio_theorem2),
                        fmt_f64(p.ratio_stam),
                        fmt_f64(p.residual_theorem2),
                        fmt_f64(p.residual_stam),
                        p.dfi_residual.map_or(String::new(), fmt_f64),
                    ]
                })
                .collect();
            to_csv(
                &[
                    "q",
                    "dfi",
                    "max_pmf",
                    "entropy_power",
                    "ratio_theorem2",
                    "ratio_stam",
                    "residual_theorem2",
                    "residual_stam",
                    "dfi_residual",
                ],
                &rows,
            )?
        }
    };
    Ok((rendered, EXIT_OK))
}

/// Per-bound statistics over a corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: CheckName,
    pub count: u64,
    pub min_gap: f64,
    pub violations: u64,
    pub equality_cases: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub index: u64,
    pub support: usize,
    pub concentration: f64,
    pub values: Vec<f64>,
    pub checks: Vec<InequalityCheck>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusSummary {
    pub seed: u64,
    pub n: u64,
    pub violations: u64,
    pub checks: Vec<CheckSummary>,
    #[serde(skip)]
    pub violating: Vec<Violation>,
}

/// Run every applicable check over items `0..n` of the seeded corpus.
pub fn run_corpus(
    seed: u64,
    n: u64,
    support: Option<usize>,
    concentration: Option<f64>,
) -> Result<CorpusSummary> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "corpus size must be at least 1".into(),
        ));
    }
    let results: Vec<(tightness::CorpusItem, Vec<InequalityCheck>)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let item = tightness::corpus_pmf(seed, k, support, concentration)?;
            let checks = inequalities::check_all(&item.pmf);
            Ok((item, checks))
        })
        .collect::<Result<_>>()?;

    let mut summaries: Vec<CheckSummary> = CheckName::ALL
        .iter()
        .map(|&name| CheckSummary {
            name,
            count: 0,
            min_gap: f64::INFINITY,
            violations: 0,
            equality_cases: 0,
        })
        .collect();
    let mut violating = Vec::new();
    for (item, checks) in results {
        for c in &checks {
            let s = summaries
                .iter_mut()
                .find(|s| s.name == c.name)
                .expect("every check name has a summary");
            s.count += 1;
            s.min_gap = s.min_gap.min(c.gap);
            s.violations += u64::from(!c.satisfied);
            s.equality_cases += u64::from(c.equality_case);
        }
        if checks.iter().any(|c| !c.satisfied) {
            violating.push(Violation {
                index: item.index,
                support: item.support,
                concentration: item.concentration,
                values: item.pmf.values().to_vec(),
                checks,
            });
        }
    }
    summaries.retain(|s| s.count > 0);
    Ok(CorpusSummary {
        seed,
        n,
        violations: violating.len() as u64,
        checks: summaries,
        violating,
    })
}

fn write_witness(path: &Path, violating: &[Violation]) -> Result<()> {
    std::fs::write(path, to_json(&violating)?)?;
    Ok(())
}

pub fn cmd_random_check(args: &RandomCheckArgs, format: Format) -> Result<(String, i32)> {
    let summary = run_corpus(args.seed, args.n, args.support, args.concentration)?;
    let code = if summary.violations == 0 {
        EXIT_OK
    } else {
        write_witness(&args.witness, &summary.violating)?;
        EXIT_VIOLATION
    };
    let rendered = match format {
        Format::Json => to_json(&summary)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = summary
                .checks
                .iter()
                .map(|s| {
                    vec![
                        s.name.to_string(),
                        s.count.to_string(),
                        fmt_f64(s.min_gap),
                        s.violations.to_string(),
                        s.equality_cases.to_string(),
                    ]
                })
                .collect();
            to_csv(
                &["name", "count", "min_gap", "violations", "equality_cases"],
                &rows,
            )?
        }
        Format::Plain => {
            let mut rows = vec![
                ("seed".to_string(), summary.seed.to_string()),
                ("n".to_string(), summary.n.to_string()),
                ("violations".to_string(), summary.violations.to_string()),
            ];
            for s in &summary.checks {
                rows.push((
                    s.name.to_string(),
                    format!(
                        "checked {}  min gap {:e}  violations {}  equality cases {}",
                        s.count, s.min_gap, s.violations, s.equality_cases
                    ),
                ));
            }
            if code != EXIT_OK {
                rows.push(("witness".to_string(), args.witness.display().to_string()));
            }
            plain(&rows)
        }
    };
    Ok((rendered, code))
}

#[derive(Debug, Serialize)]
struct OptimizeOutput<'a> {
    label: &'static str,
    seed: u64,
    step_tol: f64,
    /// `1/(N_d I_d)` at the witness: a lower bound on any valid Stam constant.
    inverse_objective: f64,
    #[serde(flatten)]
    result: &'a OptimizeResult,
}

pub fn cmd_optimize(args: &OptimizeArgs, format: Format) -> Result<(String, i32)> {
    let config = OptimizeConfig::new(args.support, args.restarts, args.step_tol, args.seed);
    let result = tightness::minimize_stam_product(&config)?;
    let rendered = match format {
        Format::Json => to_json(&OptimizeOutput {
            label: CONJECTURE_LABEL,
            seed: args.seed,
            step_tol: args.step_tol,
            inverse_objective: 1.0 / result.objective,
            result: &result,
        })?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = result
                .restarts
                .iter()
                .map(|r| {
                    vec![
                        r.index.to_string(),
                        serde_json::to_value(r.start)
                            .ok()
                            .and_then(|v| v.as_str().map(str::to_string))
                            .unwrap_or_default(),
                        fmt_f64(r.objective),
                        r.passes.to_string(),
                        r.converged.to_string(),
                    ]
                })
                .collect();
            to_csv(
                &["restart", "start", "objective", "passes", "converged"],
                &rows,
            )?
        }
        Format::Plain => {
            let witness = result
                .witness
                .values()
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            plain(&[
                ("label".to_string(), CONJECTURE_LABEL.to_string()),
                ("support".to_string(), result.support_size.to_string()),
                ("restarts".to_string(), result.restarts_used.to_string()),
                ("objective".to_string(), result.objective.to_string()),
                (
                    "inverse_objective".to_string(),
                    (1.0 / result.objective).to_string(),
                ),
                ("converged".to_string(), result.converged.to_string()),
                ("witness".to_string(), format!("[{witness}]")),
            ])
        }
    };
    Ok((rendered, EXIT_OK))
}

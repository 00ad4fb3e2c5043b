//! `dpqs-lab`: command-line access to the exact, series, simulation and
//! concordance machinery of `dpqs-core`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use dpqs_core::exactdp::{self, CostTable, FloatTable, EXACT_BOUND};
use dpqs_core::formulas::Target;
use dpqs_core::gfcatalog::{stated_gf, NamedGf};
use dpqs_core::harness::{self, ConcordanceConfig};
use dpqs_core::simkit::{self, CostValue, Query};
use dpqs_core::strategies::StrategyId;
use dpqs_core::CSV_HEADER_COMMENT;

/// Environment variable holding the worker thread count.
const THREADS_ENV: &str = "DPQS_THREADS";

#[derive(Parser)]
#[command(
    name = "dpqs-lab",
    version,
    about = "Comparison counts of dual-pivot quickselect"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Exactly one of a rank, the grand average or (where offered) the
/// partitioning cost.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct TargetArgs {
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    grand: bool,
}

impl TargetArgs {
    fn query(&self) -> Query {
        match self.j {
            Some(j) => Query::Rank(j),
            None => Query::Grand,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Cross-check enumeration, Monte Carlo, recurrence, series and closed
    /// forms; exits non-zero iff a hard invariant is violated.
    Concordance {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        /// Strategies to cover (comma separated or repeated); default all.
        #[arg(long, value_delimiter = ',')]
        strategy: Vec<StrategyId>,
        /// Monte Carlo trials per grand-average cell (0 disables).
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Report path; the CSV and JSON forms are written next to each other.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Residuals of the float recurrence against a stated expansion on the
    /// grid 2^6, 2^7, ..., n-max.
    Asymptotics {
        #[arg(long)]
        strategy: StrategyId,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long, conflicts_with = "j")]
        grand: bool,
        /// Use the partitioning-cost expansion.
        #[arg(long, conflicts_with_all = ["j", "grand"])]
        partition: bool,
        #[arg(long, default_value_t = 4096)]
        n_max: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo estimate of a rank or grand-average cost.
    Simulate {
        #[arg(long)]
        strategy: StrategyId,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, default_value_t = simkit::DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Coefficients of a stated generating function.
    Series {
        /// One of P_sf, P_ct, Cct_grand, Ccv_grand, Csf_grand, Cct_1..Cct_4,
        /// Ccv_1, Csf_1 (case and underscores ignored).
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 16)]
        order: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Expected partitioning cost of one round, for one size or a range.
    PartitionCost {
        #[arg(long)]
        strategy: StrategyId,
        #[arg(long, required_unless_present = "n_max", conflicts_with = "n_max")]
        n: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        /// Use the floating-point backend.
        #[arg(long)]
        float: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Expected comparisons of selecting a rank (or a uniform rank).
    SelectCost {
        #[arg(long)]
        strategy: StrategyId,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        target: TargetArgs,
        /// Exact rational arithmetic (the default).
        #[arg(long, conflicts_with = "float")]
        exact: bool,
        /// Floating-point backend, reaching larger n.
        #[arg(long)]
        float: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

type Fallible<T> = Result<T, Box<dyn std::error::Error>>;

fn emit(out: &OutputArgs, body: &str) -> Fallible<()> {
    write_to(out.output.as_deref(), body)
}

fn write_to(path: Option<&Path>, body: &str) -> Fallible<()> {
    match path {
        Some(p) => fs::write(p, body)?,
        None => io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Fallible<String> {
    let mut buf = format!("{CSV_HEADER_COMMENT}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
    }
    Ok(String::from_utf8(buf)?)
}

fn json_text(v: &serde_json::Value) -> Fallible<String> {
    Ok(format!("{}\n", serde_json::to_string_pretty(v)?))
}

fn init_threads() -> Fallible<()> {
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let threads: usize = raw
            .trim()
            .parse()
            .map_err(|_| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
        if threads == 0 {
            return Err(format!("{THREADS_ENV} must be at least 1").into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }
    Ok(())
}

fn query_label(q: Query) -> String {
    q.to_string()
}

fn run(cli: Cli) -> Fallible<ExitCode> {
    match cli.command {
        Command::Concordance {
            n_max,
            strategy,
            trials,
            seed,
            output,
            format,
        } => {
            let strategies = if strategy.is_empty() {
                StrategyId::ALL.to_vec()
            } else {
                strategy
            };
            let report = harness::concordance(&ConcordanceConfig {
                n_max,
                strategies,
                mc_trials: trials,
                seed,
            })?;
            let mut csv = Vec::new();
            report.write_csv(&mut csv)?;
            let csv = String::from_utf8(csv)?;
            let json = format!("{}\n", report.to_json()?);
            let primary = match format {
                Format::Csv => &csv,
                Format::Json => &json,
            };
            match output {
                Some(path) => {
                    fs::write(&path, primary)?;
                    let (ext, other) = match format {
                        Format::Csv => ("json", &json),
                        Format::Json => ("csv", &csv),
                    };
                    fs::write(path.with_extension(ext), other)?;
                }
                None => write_to(None, primary)?,
            }
            let s = &report.summary;
            eprintln!(
                "concordance: {} rows, {} agreements, {} findings, {} violations",
                s.rows, s.agreements, s.findings, s.violations
            );
            for g in &s.finding_groups {
                eprintln!(
                    "  finding {} {} n={}..{} ({} cells): {}",
                    g.strategy, g.path, g.n_min, g.n_max, g.cells, g.note
                );
            }
            for v in &s.violation_rows {
                eprintln!("  VIOLATION {v}");
            }
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Asymptotics {
            strategy,
            j,
            grand: _,
            partition,
            n_max,
            out,
        } => {
            let target = match (j, partition) {
                (Some(j), _) => Target::Rank(j),
                (None, true) => Target::Partition,
                (None, false) => Target::Grand,
            };
            let grid: Vec<usize> = harness::default_grid()
                .into_iter()
                .filter(|&n| n <= n_max)
                .collect();
            let report = harness::cmd_asymptotics(strategy, target, &grid)?;
            let body = match out.format {
                Format::Json => json_text(&serde_json::to_value(&report)?)?,
                Format::Csv => {
                    let mut buf = Vec::new();
                    report.write_csv(&mut buf)?;
                    String::from_utf8(buf)?
                }
            };
            emit(&out, &body)?;
            eprintln!(
                "{}: slope {:+.4} (|.| < {}), band {:.4} (<= {}), (ln n)^2 fit {:+.4} -> {}",
                report.expansion_id,
                report.slope,
                harness::SLOPE_TOLERANCE,
                report.band,
                harness::BAND_TOLERANCE,
                report.log_squared_fit,
                if report.passed() {
                    "consistent"
                } else {
                    "inconsistent"
                }
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            strategy,
            n,
            target,
            trials,
            seed,
            out,
        } => {
            let q = target.query();
            let v = simkit::monte_carlo(n, q, strategy, trials, seed)?;
            let CostValue::Estimated {
                mean,
                stderr,
                trials,
                seed,
            } = v
            else {
                unreachable!("monte_carlo returns estimates");
            };
            let body = match out.format {
                Format::Json => json_text(&json!({
                    "strategy": strategy,
                    "n": n,
                    "j": query_label(q),
                    "kind": "estimated",
                    "mean": mean,
                    "stderr": stderr,
                    "trials": trials,
                    "seed": seed,
                }))?,
                Format::Csv => csv_text(
                    &["strategy", "n", "j", "mean", "stderr", "trials", "seed"],
                    &[vec![
                        strategy.to_string(),
                        n.to_string(),
                        query_label(q),
                        format!("{mean:.17e}"),
                        stderr.map_or(String::new(), |s| format!("{s:.17e}")),
                        trials.to_string(),
                        seed.to_string(),
                    ]],
                )?,
            };
            emit(&out, &body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Series { name, order, out } => {
            let gf: NamedGf = name.parse()?;
            let s = stated_gf(gf, order);
            let body = match out.format {
                Format::Json => json_text(&serde_json::to_value(&s)?)?,
                Format::Csv => csv_text(
                    &["name", "k", "coeff"],
                    &s.coeffs()
                        .iter()
                        .enumerate()
                        .map(|(k, c)| vec![gf.name(), k.to_string(), c.to_string()])
                        .collect::<Vec<_>>(),
                )?,
            };
            emit(&out, &body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::PartitionCost {
            strategy,
            n,
            n_max,
            float,
            out,
        } => {
            let (lo, hi) = match (n, n_max) {
                (Some(n), _) => (n, n),
                (None, Some(m)) => (2, m),
                (None, None) => unreachable!("clap requires one of --n, --n-max"),
            };
            if lo < 2 {
                return Err("partitioning needs n >= 2".into());
            }
            let backend = if float { "float" } else { "exact" };
            let values: Vec<String> = if float {
                let v = exactdp::partition_costs_float(strategy, hi)?;
                (lo..=hi).map(|k| format!("{:.17e}", v[k])).collect()
            } else {
                if hi > EXACT_BOUND {
                    return Err(format!(
                        "n = {hi} exceeds the exact bound {EXACT_BOUND}; use --float"
                    )
                    .into());
                }
                let v = exactdp::partition_costs(strategy, hi)?;
                (lo..=hi).map(|k| v[k].to_string()).collect()
            };
            let body = match out.format {
                Format::Json => json_text(&serde_json::Value::Array(
                    (lo..=hi)
                        .zip(&values)
                        .map(|(k, v)| {
                            json!({"strategy": strategy, "n": k, "value": v, "backend": backend})
                        })
                        .collect(),
                ))?,
                Format::Csv => csv_text(
                    &["strategy", "n", "value", "backend"],
                    &(lo..=hi)
                        .zip(&values)
                        .map(|(k, v)| {
                            vec![strategy.to_string(), k.to_string(), v.clone(), backend.into()]
                        })
                        .collect::<Vec<_>>(),
                )?,
            };
            emit(&out, &body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::SelectCost {
            strategy,
            n,
            target,
            exact: _,
            float,
            out,
        } => {
            let q = target.query();
            if let Query::Rank(j) = q {
                if j == 0 || j > n {
                    return Err(format!("rank {j} out of range 1..={n}").into());
                }
            }
            let (value, backend) = if !strategy.is_classifying() {
                // no recurrence model: exhaustive enumeration
                (simkit::enumerate_exact(n, q, strategy)?.to_string(), "enum")
            } else if float {
                let t = match q {
                    Query::Rank(j) => FloatTable::build(strategy, n, &[j])?,
                    Query::Grand => FloatTable::build(strategy, n, &[])?,
                };
                let v = match q {
                    Query::Rank(j) => t.last_row[j - 1],
                    Query::Grand => t.grand[n],
                };
                (format!("{v:.17e}"), "float")
            } else {
                let v = if n <= EXACT_BOUND {
                    match q {
                        Query::Rank(j) => exactdp::expected_cost(strategy, n, j)?,
                        Query::Grand => exactdp::grand_average(strategy, n)?,
                    }
                } else {
                    let t = CostTable::build(strategy, n)?;
                    match q {
                        Query::Rank(j) => t.get(n, j)?.clone(),
                        Query::Grand => t.grand_average(n).expect("n within table"),
                    }
                };
                (v.to_string(), "exact")
            };
            let body = match out.format {
                Format::Json => json_text(&json!({
                    "strategy": strategy,
                    "n": n,
                    "j": query_label(q),
                    "value": value,
                    "backend": backend,
                }))?,
                Format::Csv => csv_text(
                    &["strategy", "n", "j", "value", "backend"],
                    &[vec![
                        strategy.to_string(),
                        n.to_string(),
                        query_label(q),
                        value,
                        backend.into(),
                    ]],
                )?,
            };
            emit(&out, &body)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

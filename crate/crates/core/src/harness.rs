//! Cross-path concordance reports and asymptotic residual analysis.
//!
//! Concordance classification: agreement among enumeration, recurrence,
//! derived series and stated series is a hard invariant; disagreement with
//! stated closed forms, stated boundary values, registered series errata and
//! Monte Carlo deviations are findings.

use std::collections::BTreeMap;
use std::fmt;
use std::io;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exactdp::{CostTable, DpError, FloatTable, EXACT_BOUND, FLOAT_BOUND};
use crate::exactnum::Rational;
use crate::formulas::{known_discrepancy, ExpansionId, FormulaError, FormulaId, Target};
use crate::gfcatalog::{
    derive_cj_gf, derive_grand_gf, gf_erratum, partition_series, stated_gf_cached, GfError, NamedGf,
};
use crate::series::TruncSeries;
use crate::simkit::{
    enumerate_rank_totals, enumerated_value, monte_carlo, CostValue, Query, SimError, ENUM_BOUND,
};
use crate::strategies::StrategyId;
use crate::CSV_HEADER_COMMENT;

/// Largest rank covered by the derived per-rank series.
pub const DERIVED_RANKS: usize = 4;
/// Monte Carlo deviations beyond this many standard errors are findings.
pub const MC_SIGMA: f64 = 4.0;
/// Bound on the fitted `ln n` slope of an asymptotic residual.
pub const SLOPE_TOLERANCE: f64 = 0.05;
/// Bound on the spread of an asymptotic residual over the grid.
pub const BAND_TOLERANCE: f64 = 1.0;

/// Stated boundary values of the Count grand average.
const STATED_COUNT_BOUNDARY: [(usize, i64, i64); 2] = [(2, 8, 3), (3, 9, 2)];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("at least one strategy is required")]
    NoStrategies,
    #[error("n = {n} exceeds the bound {bound}")]
    BeyondBound { n: usize, bound: usize },
    #[error("the grid must contain at least four sizes >= 2")]
    Grid,
    #[error("no stated expansion for {strategy} ({target})")]
    NoExpansion {
        strategy: StrategyId,
        target: String,
    },
    #[error(transparent)]
    Dp(#[from] DpError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PathId {
    Enum,
    Mc,
    Dp,
    Gf,
    Formula,
    Asym,
}

impl PathId {
    pub fn as_str(self) -> &'static str {
        match self {
            PathId::Enum => "enum",
            PathId::Mc => "mc",
            PathId::Dp => "dp",
            PathId::Gf => "gf",
            PathId::Formula => "formula",
            PathId::Asym => "asym",
        }
    }
}

impl fmt::Display for PathId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// The value other rows are compared with.
    Reference,
    /// Shown for context, not classified (asymptotic values at finite n).
    Info,
    Agree,
    Finding,
    Violation,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Reference => "reference",
            Status::Info => "info",
            Status::Agree => "agree",
            Status::Finding => "finding",
            Status::Violation => "violation",
        }
    }
}

pub fn target_label(target: Target) -> String {
    match target {
        Target::Grand => "grand".into(),
        Target::Partition => "partition".into(),
        Target::Rank(j) => j.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcordanceRow {
    pub strategy: StrategyId,
    pub n: usize,
    pub target: String,
    pub path: PathId,
    pub value: String,
    pub reference: Option<PathId>,
    /// `value - reference`, exact whenever both sides are.
    pub delta: Option<String>,
    pub status: Status,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FindingGroup {
    pub strategy: StrategyId,
    pub path: PathId,
    pub note: String,
    pub cells: usize,
    pub n_min: usize,
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub agreements: usize,
    pub findings: usize,
    pub violations: usize,
    pub finding_groups: Vec<FindingGroup>,
    pub violation_rows: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcordanceConfig {
    pub n_max: usize,
    pub strategies: Vec<StrategyId>,
    /// Monte Carlo trials per grand-average cell; 0 disables the path.
    pub mc_trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcordanceReport {
    pub config: ConcordanceConfig,
    pub rows: Vec<ConcordanceRow>,
    pub summary: Summary,
}

impl ConcordanceReport {
    /// True iff no hard invariant is violated.
    pub fn passed(&self) -> bool {
        self.summary.violations == 0
    }

    pub fn findings(&self) -> impl Iterator<Item = &ConcordanceRow> {
        self.rows.iter().filter(|r| r.status == Status::Finding)
    }

    pub fn write_csv<W: io::Write>(&self, mut w: W) -> Result<(), HarnessError> {
        writeln!(w, "{CSV_HEADER_COMMENT}")?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "strategy",
            "n",
            "target",
            "path",
            "value",
            "reference",
            "delta",
            "status",
            "note",
        ])?;
        for r in &self.rows {
            out.write_record([
                r.strategy.as_str(),
                &r.n.to_string(),
                &r.target,
                r.path.as_str(),
                &r.value,
                r.reference.map_or("", PathId::as_str),
                r.delta.as_deref().unwrap_or(""),
                r.status.as_str(),
                &r.note,
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, HarnessError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Exact or sampled value of one cell.
enum Value {
    Exact(Rational),
    Sampled(CostValue),
    Float(f64),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Exact(r) => r.to_string(),
            Value::Sampled(v) => format!("{:.6}", v.as_f64()),
            Value::Float(x) => format!("{x:.6}"),
        }
    }
}

struct Cell {
    target: Target,
    n: usize,
}

struct Builder {
    strategy: StrategyId,
    rows: Vec<ConcordanceRow>,
}

impl Builder {
    fn push(
        &mut self,
        cell: &Cell,
        path: PathId,
        value: &Value,
        reference: Option<(PathId, &Rational)>,
        status: Status,
        note: impl Into<String>,
    ) {
        let delta = reference.map(|(_, r)| match value {
            Value::Exact(v) => (v - r).to_string(),
            Value::Sampled(s) => format!("{:.6}", s.as_f64() - r.to_f64()),
            Value::Float(x) => format!("{:.6}", x - r.to_f64()),
        });
        self.rows.push(ConcordanceRow {
            strategy: self.strategy,
            n: cell.n,
            target: target_label(cell.target),
            path,
            value: value.render(),
            reference: reference.map(|(p, _)| p),
            delta,
            status,
            note: note.into(),
        });
    }

    /// A hard comparison: agreement or violation.
    fn hard(
        &mut self,
        cell: &Cell,
        path: PathId,
        value: Rational,
        reference: (PathId, &Rational),
        note: &str,
    ) {
        let status = if &value == reference.1 {
            Status::Agree
        } else {
            Status::Violation
        };
        self.push(
            cell,
            path,
            &Value::Exact(value),
            Some(reference),
            status,
            note,
        );
    }

    /// A comparison whose disagreement is a finding.
    fn soft(
        &mut self,
        cell: &Cell,
        path: PathId,
        value: Rational,
        reference: (PathId, &Rational),
        note: String,
    ) {
        let status = if &value == reference.1 {
            Status::Agree
        } else {
            Status::Finding
        };
        self.push(
            cell,
            path,
            &Value::Exact(value),
            Some(reference),
            status,
            note,
        );
    }
}

fn stated_partition_gf(strategy: StrategyId) -> Option<NamedGf> {
    match strategy {
        StrategyId::SmallerFirst => Some(NamedGf::PartitionSf),
        StrategyId::Count => Some(NamedGf::PartitionCt),
        _ => None,
    }
}

fn stated_grand_gf(strategy: StrategyId) -> Option<NamedGf> {
    match strategy {
        StrategyId::SmallerFirst => Some(NamedGf::GrandSf),
        StrategyId::Count => Some(NamedGf::GrandCt),
        StrategyId::Clairvoyant => Some(NamedGf::GrandCv),
        _ => None,
    }
}

fn stated_rank_gf(strategy: StrategyId, j: usize) -> Option<NamedGf> {
    match (strategy, j) {
        (StrategyId::Count, 1..=4) => Some(NamedGf::RankCt(j as u8)),
        (StrategyId::Clairvoyant, 1) => Some(NamedGf::SmallestCv),
        (StrategyId::SmallerFirst, 1) => Some(NamedGf::SmallestSf),
        _ => None,
    }
}

fn formulas_for(strategy: StrategyId, target: Target) -> Vec<FormulaId> {
    FormulaId::ALL
        .into_iter()
        .filter(|f| f.strategy() == strategy)
        .filter(|f| match (f.rank(), target) {
            (None, Target::Grand) => true,
            (Some(r), Target::Rank(j)) => r == j,
            _ => false,
        })
        .collect()
}

fn formula_note(f: FormulaId, n: usize, delta: &Rational) -> String {
    if let Some(d) = known_discrepancy(f) {
        if d.delta(n).as_ref() == Some(delta) {
            return format!("{f}: registered discrepancy ({})", d.note);
        }
        if n < d.from_n {
            return format!("{f}: below the registered range n >= {}", d.from_n);
        }
    }
    match f.valid_from() {
        Some(n0) if n < n0 => format!("{f}: below validity threshold n0 = {n0}"),
        _ => format!("{f}: unregistered discrepancy"),
    }
}

fn coefficient(s: &TruncSeries, n: usize) -> Rational {
    s.coeff(n).cloned().unwrap_or_else(|_| Rational::zero())
}

/// Rows for one strategy, in `(n, target, path)` order.
fn strategy_rows(
    strategy: StrategyId,
    cfg: &ConcordanceConfig,
) -> Result<Vec<ConcordanceRow>, HarnessError> {
    let n_max = cfg.n_max;
    let mut b = Builder {
        strategy,
        rows: Vec::new(),
    };
    let table = if strategy.is_classifying() {
        Some(CostTable::build(strategy, n_max.max(2))?)
    } else {
        None
    };
    let enum_totals: Vec<Vec<u64>> = (1..=n_max.min(ENUM_BOUND))
        .map(|n| enumerate_rank_totals(n, strategy))
        .collect::<Result<_, _>>()?;

    // series of order n_max
    let order = n_max.max(2);
    let stated = |gf: NamedGf| stated_gf_cached(gf, order);
    let (derived_grand, derived_ranks) = if strategy.is_classifying() {
        let p = match stated_partition_gf(strategy) {
            Some(gf) => (*stated(gf)).clone(),
            None => partition_series(strategy, order)?,
        };
        (
            Some(derive_grand_gf(&p)?),
            derive_cj_gf(&p, DERIVED_RANKS.min(n_max))?,
        )
    } else {
        (None, Vec::new())
    };

    for n in 1..=n_max {
        let enum_row = enum_totals.get(n - 1);

        // partitioning cost
        if let Some(t) = &table {
            if n >= 2 {
                let cell = Cell {
                    target: Target::Partition,
                    n,
                };
                let dp = t.partition_cost(n).expect("within table").clone();
                b.push(
                    &cell,
                    PathId::Dp,
                    &Value::Exact(dp.clone()),
                    None,
                    Status::Reference,
                    "",
                );
                if let Some(gf) = stated_partition_gf(strategy) {
                    let v = coefficient(&stated(gf), n);
                    b.hard(
                        &cell,
                        PathId::Gf,
                        v,
                        (PathId::Dp, &dp),
                        &format!("stated {gf}"),
                    );
                }
                if matches!(strategy, StrategyId::SmallerFirst | StrategyId::LargerFirst) {
                    let v = Rational::frac(5 * n as i64 - 7, 3);
                    let ok = v == dp;
                    b.soft(
                        &cell,
                        PathId::Formula,
                        v,
                        (PathId::Dp, &dp),
                        if ok {
                            String::new()
                        } else {
                            "(5/3)n - 7/3: discrepancy".into()
                        },
                    );
                }
            }
        }

        // grand average
        let cell = Cell {
            target: Target::Grand,
            n,
        };
        let enum_grand = enum_row.map(|t| enumerated_value(t, Query::Grand));
        let reference: Option<(PathId, Rational)> = match (&table, &enum_grand) {
            (Some(t), _) => Some((PathId::Dp, t.grand_average(n).expect("within table"))),
            (None, Some(e)) => Some((PathId::Enum, e.clone())),
            _ => None,
        };
        if let Some((ref_path, ref_value)) = &reference {
            let r = (*ref_path, ref_value);
            b.push(
                &cell,
                *ref_path,
                &Value::Exact(ref_value.clone()),
                None,
                Status::Reference,
                "",
            );
            if *ref_path == PathId::Dp {
                if let Some(e) = &enum_grand {
                    b.hard(&cell, PathId::Enum, e.clone(), r, "");
                }
            }
            if cfg.mc_trials > 0 && n >= 2 {
                let est = monte_carlo(n, Query::Grand, strategy, cfg.mc_trials, cfg.seed)?;
                let ok = est.within_sigma(ref_value, MC_SIGMA);
                let status = if ok { Status::Agree } else { Status::Finding };
                let note = if ok {
                    String::new()
                } else {
                    format!("beyond {MC_SIGMA} standard errors")
                };
                b.push(
                    &cell,
                    PathId::Mc,
                    &Value::Sampled(est),
                    Some(r),
                    status,
                    note,
                );
            }
            let nn = Rational::from(n as u64);
            if let Some(gf) = stated_grand_gf(strategy) {
                let v = coefficient(&stated(gf), n) / nn.clone();
                b.hard(&cell, PathId::Gf, v, r, &format!("stated {gf}"));
            }
            if let Some(d) = &derived_grand {
                let v = coefficient(d, n) / nn;
                b.hard(&cell, PathId::Gf, v, r, "derived");
            }
            for f in formulas_for(strategy, Target::Grand) {
                if let Ok(v) = f.evaluate(n) {
                    let delta = &v - ref_value;
                    let note = if delta.is_zero() {
                        String::new()
                    } else {
                        formula_note(f, n, &delta)
                    };
                    b.soft(&cell, PathId::Formula, v, r, note);
                }
            }
            if strategy == StrategyId::Count {
                for (bn, num, den) in STATED_COUNT_BOUNDARY {
                    if bn == n {
                        let v = Rational::frac(num, den);
                        b.soft(&cell, PathId::Formula, v, r, "stated boundary value".into());
                    }
                }
            }
            if let Some(id) = expansion_for(strategy, Target::Grand).filter(|_| n >= 2) {
                let x = id.expansion()?.evaluate(n as f64);
                b.push(&cell, PathId::Asym, &Value::Float(x), Some(r), Status::Info, id.name());
            }
        }

        // fixed ranks
        for j in 1..=n {
            let cell = Cell {
                target: Target::Rank(j),
                n,
            };
            let enum_value = enum_row.map(|t| enumerated_value(t, Query::Rank(j)));
            let reference: Option<(PathId, Rational)> = match (&table, &enum_value) {
                (Some(t), _) => Some((PathId::Dp, t.get(n, j)?.clone())),
                (None, Some(e)) => Some((PathId::Enum, e.clone())),
                _ => None,
            };
            let Some((ref_path, ref_value)) = &reference else {
                continue;
            };
            let r = (*ref_path, ref_value);
            b.push(
                &cell,
                *ref_path,
                &Value::Exact(ref_value.clone()),
                None,
                Status::Reference,
                "",
            );
            if *ref_path == PathId::Dp {
                if let Some(e) = &enum_value {
                    b.hard(&cell, PathId::Enum, e.clone(), r, "");
                }
                // symmetry C(n,j) = C(n,n-j+1)
                let mirror = table.as_ref().expect("dp").get(n, n - j + 1)?.clone();
                if mirror != *ref_value {
                    b.hard(&cell, PathId::Dp, mirror, r, "mirror rank n-j+1");
                }
            }
            if let Some(gf) = stated_rank_gf(strategy, j) {
                let s = stated(gf);
                let v = coefficient(&s, n);
                let delta = &v - ref_value;
                let explained = !delta.is_zero()
                    && gf_erratum(gf, order).is_some_and(|e| coefficient(&e, n) == delta);
                if explained {
                    let note = format!("stated {gf}: registered series erratum");
                    b.push(
                        &cell,
                        PathId::Gf,
                        &Value::Exact(v),
                        Some(r),
                        Status::Finding,
                        note,
                    );
                } else {
                    b.hard(&cell, PathId::Gf, v, r, &format!("stated {gf}"));
                }
            }
            if let Some(d) = derived_ranks.get(j - 1) {
                b.hard(&cell, PathId::Gf, coefficient(d, n), r, "derived");
            }
            for f in formulas_for(strategy, Target::Rank(j)) {
                if let Ok(v) = f.evaluate(n) {
                    let delta = &v - ref_value;
                    let note = if delta.is_zero() {
                        String::new()
                    } else {
                        formula_note(f, n, &delta)
                    };
                    b.soft(&cell, PathId::Formula, v, r, note);
                }
            }
        }
    }
    Ok(b.rows)
}

fn summarize(rows: &[ConcordanceRow]) -> Summary {
    let count = |s: Status| rows.iter().filter(|r| r.status == s).count();
    let mut groups: BTreeMap<(StrategyId, PathId, String), FindingGroup> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.status == Status::Finding) {
        groups
            .entry((r.strategy, r.path, r.note.clone()))
            .and_modify(|g| {
                g.cells += 1;
                g.n_min = g.n_min.min(r.n);
                g.n_max = g.n_max.max(r.n);
            })
            .or_insert(FindingGroup {
                strategy: r.strategy,
                path: r.path,
                note: r.note.clone(),
                cells: 1,
                n_min: r.n,
                n_max: r.n,
            });
    }
    Summary {
        rows: rows.len(),
        agreements: count(Status::Agree),
        findings: count(Status::Finding),
        violations: count(Status::Violation),
        finding_groups: groups.into_values().collect(),
        violation_rows: rows
            .iter()
            .filter(|r| r.status == Status::Violation)
            .map(|r| {
                format!(
                    "{} n={} target={} path={} value={} delta={} {}",
                    r.strategy,
                    r.n,
                    r.target,
                    r.path,
                    r.value,
                    r.delta.as_deref().unwrap_or("-"),
                    r.note
                )
            })
            .collect(),
    }
}

/// Builds the concordance report over all paths for every strategy.
pub fn concordance(cfg: &ConcordanceConfig) -> Result<ConcordanceReport, HarnessError> {
    if cfg.strategies.is_empty() {
        return Err(HarnessError::NoStrategies);
    }
    if cfg.n_max > EXACT_BOUND {
        return Err(HarnessError::BeyondBound {
            n: cfg.n_max,
            bound: EXACT_BOUND,
        });
    }
    let per_strategy: Vec<Result<Vec<ConcordanceRow>, HarnessError>> = cfg
        .strategies
        .par_iter()
        .map(|&s| strategy_rows(s, cfg))
        .collect();
    let mut rows = Vec::new();
    for r in per_strategy {
        rows.extend(r?);
    }
    let summary = summarize(&rows);
    Ok(ConcordanceReport {
        config: cfg.clone(),
        rows,
        summary,
    })
}

/// `2^6, 2^7, ..., 2^12`.
pub fn default_grid() -> Vec<usize> {
    (6..=12).map(|k| 1usize << k).collect()
}

/// The stated expansion describing `(strategy, target)`. Larger-first is
/// covered by the smaller-first expansions through symmetry.
pub fn expansion_for(strategy: StrategyId, target: Target) -> Option<ExpansionId> {
    let strategy = match strategy {
        StrategyId::LargerFirst => StrategyId::SmallerFirst,
        s => s,
    };
    ExpansionId::ALL
        .into_iter()
        .find(|e| e.strategy() == strategy && e.target() == target)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRow {
    pub n: usize,
    pub value: f64,
    pub expansion: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticsReport {
    pub strategy: StrategyId,
    pub target: String,
    pub expansion_id: String,
    pub expansion: String,
    pub rows: Vec<ResidualRow>,
    /// Least-squares `ln n` coefficient of the residual, fitted together
    /// with a constant, `1/n` and `ln n / n`.
    pub slope: f64,
    /// `max - min` of the residual over the grid.
    pub band: f64,
    /// Least-squares `(ln n)^2` coefficient of `value - a n`.
    pub log_squared_fit: f64,
    /// Second differences of `value - a n` along the grid.
    pub second_differences: Vec<f64>,
}

impl AsymptoticsReport {
    pub fn slope_ok(&self) -> bool {
        self.slope.abs() < SLOPE_TOLERANCE
    }

    pub fn bounded(&self) -> bool {
        self.band <= BAND_TOLERANCE
    }

    pub fn passed(&self) -> bool {
        self.slope_ok() && self.bounded()
    }

    pub fn write_csv<W: io::Write>(&self, mut w: W) -> Result<(), HarnessError> {
        writeln!(w, "{CSV_HEADER_COMMENT}")?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["strategy", "target", "n", "value", "expansion", "residual"])?;
        for r in &self.rows {
            out.write_record([
                self.strategy.as_str(),
                &self.target,
                &r.n.to_string(),
                &format!("{:.12}", r.value),
                &format!("{:.12}", r.expansion),
                &format!("{:.12}", r.residual),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Least squares `y ~ sum_k c_k x_k` by normal equations.
fn least_squares<const K: usize>(rows: &[([f64; K], f64)]) -> [f64; K] {
    let mut a = [[0.0; K]; K];
    let mut rhs = [0.0; K];
    for (x, y) in rows {
        for i in 0..K {
            rhs[i] += x[i] * y;
            for k in 0..K {
                a[i][k] += x[i] * x[k];
            }
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..K {
        let pivot = (col..K)
            .max_by(|&i, &k| a[i][col].abs().total_cmp(&a[k][col].abs()))
            .expect("nonempty");
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..K {
            let f = a[row][col] / a[col][col];
            for k in col..K {
                a[row][k] -= f * a[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; K];
    for row in (0..K).rev() {
        let s: f64 = (row + 1..K).map(|k| a[row][k] * x[k]).sum();
        x[row] = (rhs[row] - s) / a[row][row];
    }
    x
}

fn exact_baseline(id: ExpansionId) -> Option<FormulaId> {
    match id {
        ExpansionId::ClassicalGrand => Some(FormulaId::ClassicalGrand),
        ExpansionId::ClassicalSmallest => Some(FormulaId::ClassicalSmallest),
        ExpansionId::YaroslavskiyGrand => Some(FormulaId::YaroslavskiyGrand),
        ExpansionId::YaroslavskiySmallest => Some(FormulaId::YaroslavskiySmallest),
        _ => None,
    }
}

/// Residuals of the float recurrence (or, for the baselines without a
/// recurrence, of their exact formulas) against a stated expansion.
pub fn asymptotics(
    id: ExpansionId,
    strategy: StrategyId,
    grid: &[usize],
) -> Result<AsymptoticsReport, HarnessError> {
    let grid: Vec<usize> = grid.iter().copied().filter(|&n| n >= 2).collect();
    if grid.len() < 4 {
        return Err(HarnessError::Grid);
    }
    let n_max = *grid.iter().max().expect("nonempty");
    if n_max > FLOAT_BOUND {
        return Err(HarnessError::BeyondBound {
            n: n_max,
            bound: FLOAT_BOUND,
        });
    }
    let target = id.target();
    let values: Vec<f64> = match exact_baseline(id) {
        Some(f) => grid
            .iter()
            .map(|&n| f.evaluate(n).map(|v| v.to_f64()))
            .collect::<Result<_, _>>()?,
        None => {
            let ranks: Vec<usize> = match target {
                Target::Rank(j) => vec![j],
                _ => Vec::new(),
            };
            let t = FloatTable::build(strategy, n_max, &ranks)?;
            grid.iter()
                .map(|&n| match target {
                    Target::Grand => t.grand[n],
                    Target::Partition => t.partition[n],
                    Target::Rank(j) => t.column(j).expect("tracked")[n],
                })
                .collect()
        }
    };
    let exp = id.expansion()?;
    let rows: Vec<ResidualRow> = grid
        .iter()
        .zip(&values)
        .map(|(&n, &value)| {
            let e = exp.evaluate(n as f64);
            ResidualRow {
                n,
                value,
                expansion: e,
                residual: value - e,
            }
        })
        .collect();
    // lower-order corrections O(1/n) and O(ln n / n) are fitted alongside
    let [_, slope, _, _] = least_squares(
        &rows
            .iter()
            .map(|r| {
                let (n, l) = (r.n as f64, (r.n as f64).ln());
                ([1.0, l, 1.0 / n, l / n], r.residual)
            })
            .collect::<Vec<_>>(),
    );
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.residual), hi.max(r.residual))
        });
    let a = exp.linear.to_f64();
    let sublinear: Vec<f64> = rows.iter().map(|r| r.value - a * r.n as f64).collect();
    let [_, _, log_squared_fit] = least_squares(
        &rows
            .iter()
            .zip(&sublinear)
            .map(|(r, &y)| {
                let l = (r.n as f64).ln();
                ([1.0, l, l * l], y)
            })
            .collect::<Vec<_>>(),
    );
    let second_differences = sublinear
        .windows(3)
        .map(|w| w[2] - 2.0 * w[1] + w[0])
        .collect();
    Ok(AsymptoticsReport {
        strategy,
        target: target_label(target),
        expansion_id: id.name(),
        expansion: exp.to_string(),
        rows,
        slope,
        band: hi - lo,
        log_squared_fit,
        second_differences,
    })
}

/// [`asymptotics`] for the expansion matching `(strategy, target)`.
pub fn cmd_asymptotics(
    strategy: StrategyId,
    target: Target,
    grid: &[usize],
) -> Result<AsymptoticsReport, HarnessError> {
    let id = expansion_for(strategy, target).ok_or(HarnessError::NoExpansion {
        strategy,
        target: target_label(target),
    })?;
    asymptotics(id, strategy, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n_max: usize, strategies: Vec<StrategyId>) -> ConcordanceConfig {
        ConcordanceConfig {
            n_max,
            strategies,
            mc_trials: 2_000,
            seed: 11,
        }
    }

    #[test]
    fn concordance_small() {
        let report = concordance(&cfg(8, StrategyId::ALL.to_vec())).unwrap();
        assert!(report.passed(), "{:#?}", report.summary.violation_rows);
        assert!(report
            .findings()
            .any(|r| r.strategy == StrategyId::SmallerFirst && r.note.starts_with("sf_grand")));
        assert!(report.findings().any(|r| r.note == "stated boundary value"));
        assert!(report.findings().any(|r| r.note.contains("series erratum")));
        assert!(report
            .rows
            .iter()
            .any(|r| r.path == PathId::Asym && r.status == Status::Info));
    }

    #[test]
    fn concordance_n2_grand_is_one() {
        let report = concordance(&cfg(2, StrategyId::ALL.to_vec())).unwrap();
        for s in StrategyId::ALL {
            let row = report
                .rows
                .iter()
                .find(|r| {
                    r.strategy == s
                        && r.n == 2
                        && r.target == "grand"
                        && r.status == Status::Reference
                })
                .unwrap();
            assert_eq!(row.value, "1/1", "{s}");
        }
    }

    #[test]
    fn concordance_rejects_bad_config() {
        assert!(matches!(
            concordance(&cfg(8, vec![])),
            Err(HarnessError::NoStrategies)
        ));
        assert!(matches!(
            concordance(&cfg(200, vec![StrategyId::Count])),
            Err(HarnessError::BeyondBound { .. })
        ));
    }

    #[test]
    fn concordance_is_deterministic() {
        let c = cfg(6, vec![StrategyId::Count, StrategyId::Yaroslavskiy]);
        let a = concordance(&c).unwrap().to_json().unwrap();
        let b = concordance(&c).unwrap().to_json().unwrap();
        assert_eq!(a, b);
        let mut csv = Vec::new();
        concordance(&c).unwrap().write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv)
            .unwrap()
            .starts_with("# dpqs-lab v1\nstrategy,n,target,"));
    }

    #[test]
    fn least_squares_recovers_line() {
        let rows: Vec<([f64; 2], f64)> = (0..5)
            .map(|x| ([1.0, x as f64], 2.0 + 3.0 * x as f64))
            .collect();
        let [c, m] = least_squares(&rows);
        assert!((c - 2.0).abs() < 1e-12 && (m - 3.0).abs() < 1e-12);
    }

    #[test]
    fn partition_expansions_have_flat_residuals() {
        let grid = default_grid();
        for s in [StrategyId::Count, StrategyId::Clairvoyant] {
            let r = cmd_asymptotics(s, Target::Partition, &grid).unwrap();
            assert!(r.passed(), "{s}: slope {} band {}", r.slope, r.band);
        }
    }

    #[test]
    fn clairvoyant_grand_curvature_is_negative() {
        let r = cmd_asymptotics(StrategyId::Clairvoyant, Target::Grand, &default_grid()).unwrap();
        assert!(
            r.second_differences.iter().all(|d| *d < 0.0),
            "{:?}",
            r.second_differences
        );
        assert!(r.log_squared_fit < 0.0);
    }

    #[test]
    fn asymptotics_errors() {
        assert!(matches!(
            cmd_asymptotics(StrategyId::Count, Target::Grand, &[64, 128, 256]),
            Err(HarnessError::Grid)
        ));
        assert!(matches!(
            cmd_asymptotics(StrategyId::Count, Target::Grand, &[64, 128, 256, 8192]),
            Err(HarnessError::BeyondBound { .. })
        ));
        assert!(matches!(
            cmd_asymptotics(StrategyId::Count, Target::Rank(5), &default_grid()),
            Err(HarnessError::NoExpansion { .. })
        ));
    }
}

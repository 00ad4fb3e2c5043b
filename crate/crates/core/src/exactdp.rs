//! Expected comparison counts without enumeration.
//!
//! Partitioning costs come from lattice-path DPs over the small/large
//! subsequence of a round; `C_{n,j}` comes from the selection recurrence
//!
//! ```text
//! C(n,j) = P(n) + (S + M + L) / C(n,2)
//! S = sum_{s<n} (n-1-s) C(s,j)
//! L = sum_{l<n} (n-1-l) C(l,n-j+1)
//! M = sum_{m<=n-2} sum_{s<=n-2-m} C(m,j-s-1)
//! ```
//!
//! with `C(n,j) = 0` outside `1 <= j <= n` and `C(0,.) = C(1,.) = 0`.
//! Running sums keep filling all `j` for all `n' <= n` quadratic.

use std::collections::HashMap;
use std::io;
use std::ops::{Add, Div, Mul, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::exactnum::Rational;
use crate::strategies::StrategyId;
use crate::CSV_HEADER_COMMENT;

/// Default cap of the memoized exact backend.
pub const EXACT_BOUND: usize = 128;
/// Default cap of the float backend.
pub const FLOAT_BOUND: usize = 4096;

#[derive(Debug, Error)]
pub enum DpError {
    #[error("no partitioning-cost model for strategy {0}")]
    Unsupported(StrategyId),
    #[error("partitioning needs n >= 2, got {0}")]
    TooSmall(usize),
    #[error("rank {j} out of range 1..={n}")]
    RankOutOfRange { n: usize, j: usize },
    #[error("n = {n} exceeds the configured bound {bound}")]
    BeyondBound { n: usize, bound: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn check_supported(strategy: StrategyId) -> Result<(), DpError> {
    if strategy.is_classifying() {
        Ok(())
    } else {
        Err(DpError::Unsupported(strategy))
    }
}

fn binomial2(n: usize) -> u64 {
    (n as u64) * (n as u64).saturating_sub(1) / 2
}

/// Per layer `k`, the sum over all `(s, l)` with `s + l = k` of the expected
/// number of lucky first comparisons (ones that settle the class at once).
fn lucky_sums_exact(strategy: StrategyId, k_max: usize) -> Vec<Rational> {
    match strategy {
        StrategyId::Count => lucky_sums_count(k_max),
        StrategyId::Clairvoyant => lucky_sums_clairvoyant(k_max),
        // a fixed first pivot is lucky exactly for its own side
        _ => (0..=k_max)
            .map(|k| Rational::frac((k * (k + 1) / 2) as i64, 1))
            .collect(),
    }
}

fn next_binomial_row(prev: &[BigUint]) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(prev.len() + 1);
    row.push(BigUint::from(1u32));
    for w in prev.windows(2) {
        row.push(&w[0] + &w[1]);
    }
    row.push(BigUint::from(1u32));
    row
}

/// Count. `L(s,l,d)` is the number of lucky guesses summed over all
/// arrangements of `s` smalls and `l` larges still to come, when
/// `d = seen_large - seen_small`:
///
/// ```text
/// L(s,l,d) = [s>0] ([d<=0] C(s+l-1,s-1) + L(s-1,l,d-1))
///          + [l>0] ([d>0]  C(s+l-1,l-1) + L(s,l-1,d+1))
/// ```
///
/// Processed layer by layer in `k = s + l`; only `|d| <= k_max - k` is
/// reachable from a start at `d = 0`.
fn lucky_sums_count(k_max: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero()];
    let width = |k: usize| 2 * (k_max - k) + 1;
    // prev[s][d + (k_max - k)]
    let mut prev: Vec<Vec<BigUint>> = vec![vec![BigUint::zero(); width(0)]];
    let mut binom_prev = vec![BigUint::from(1u32)];
    for k in 1..=k_max {
        let dk = (k_max - k) as isize;
        let dp = dk + 1;
        let mut layer = vec![vec![BigUint::zero(); width(k)]; k + 1];
        for (s, cells) in layer.iter_mut().enumerate() {
            let l = k - s;
            for (idx, cell) in cells.iter_mut().enumerate() {
                let d = idx as isize - dk;
                let mut v = BigUint::zero();
                if s > 0 {
                    if d <= 0 {
                        v += &binom_prev[s - 1];
                    }
                    v += &prev[s - 1][(d - 1 + dp) as usize];
                }
                if l > 0 {
                    if d > 0 {
                        v += &binom_prev[l - 1];
                    }
                    v += &prev[s][(d + 1 + dp) as usize];
                }
                *cell = v;
            }
        }
        let binom = next_binomial_row(&binom_prev);
        let total: Rational = layer
            .iter()
            .enumerate()
            .map(|(s, cells)| {
                Rational::from(num_bigint::BigInt::from(cells[dk as usize].clone()))
                    / Rational::from(num_bigint::BigInt::from(binom[s].clone()))
            })
            .sum();
        out.push(total);
        prev = layer;
        binom_prev = binom;
    }
    out
}

/// Clairvoyant. Guess `q` iff more larges than smalls remain (the element
/// being classified included), so the state is just `(s, l)`.
fn lucky_sums_clairvoyant(k_max: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero()];
    let mut prev = vec![BigUint::zero()];
    let mut binom_prev = vec![BigUint::from(1u32)];
    for k in 1..=k_max {
        let mut layer = vec![BigUint::zero(); k + 1];
        for (s, cell) in layer.iter_mut().enumerate() {
            let l = k - s;
            let guess_q = l > s;
            let mut v = BigUint::zero();
            if s > 0 {
                if !guess_q {
                    v += &binom_prev[s - 1];
                }
                v += &prev[s - 1];
            }
            if l > 0 {
                if guess_q {
                    v += &binom_prev[l - 1];
                }
                v += &prev[s];
            }
            *cell = v;
        }
        let binom = next_binomial_row(&binom_prev);
        let total: Rational = layer
            .iter()
            .zip(&binom)
            .map(|(v, b)| {
                Rational::from(num_bigint::BigInt::from(v.clone()))
                    / Rational::from(num_bigint::BigInt::from(b.clone()))
            })
            .sum();
        out.push(total);
        prev = layer;
        binom_prev = binom;
    }
    out
}

fn lucky_sums_float(strategy: StrategyId, k_max: usize) -> Vec<f64> {
    match strategy {
        StrategyId::Count => {
            // Averaged over (s, l) the small/large stream is a Polya urn
            // started at (1, 1): after t draws the number of smalls seen is
            // uniform on 0..=t and the next draw is small w.p. (a+1)/(t+2).
            let mut out = vec![0.0; k_max + 1];
            let mut acc = 0.0;
            for k in 1..=k_max {
                let t = k - 1;
                let num: usize = (0..=t).map(|a| a.max(t - a) + 1).sum();
                acc += num as f64 / ((t + 1) * (t + 2)) as f64;
                out[k] = (k + 1) as f64 * acc;
            }
            out
        }
        StrategyId::Clairvoyant => {
            let mut out = vec![0.0; k_max + 1];
            let mut prev = vec![0.0f64];
            for (k, slot) in out.iter_mut().enumerate().skip(1) {
                let mut layer = vec![0.0; k + 1];
                for (s, cell) in layer.iter_mut().enumerate() {
                    let l = k - s;
                    let guess_q = l > s;
                    let mut v = 0.0;
                    if s > 0 {
                        v += s as f64 / k as f64 * (f64::from(u8::from(!guess_q)) + prev[s - 1]);
                    }
                    if l > 0 {
                        v += l as f64 / k as f64 * (f64::from(u8::from(guess_q)) + prev[s]);
                    }
                    *cell = v;
                }
                *slot = layer.iter().sum();
                prev = layer;
            }
            out
        }
        _ => (0..=k_max).map(|k| (k * (k + 1) / 2) as f64).collect(),
    }
}

/// `P_n = 2n - 3 - (1/C(n,2)) sum_{k<=n-2} lucky(k)` for `n >= 2`, and 0 below.
fn partition_costs_from<T: Scalar>(lucky: &[T], n_max: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n_max + 1];
    let mut acc = T::zero();
    for n in 2..=n_max {
        acc = acc + lucky[n - 2].clone();
        out[n] = T::from_u64(2 * n as u64 - 3) - acc.clone() / T::from_u64(binomial2(n));
    }
    out
}

/// Exact partitioning costs `P_0..=P_{n_max}` (zero below 2).
pub fn partition_costs(strategy: StrategyId, n_max: usize) -> Result<Vec<Rational>, DpError> {
    check_supported(strategy)?;
    if matches!(strategy, StrategyId::SmallerFirst | StrategyId::LargerFirst) {
        let mut out = vec![Rational::zero(); n_max + 1];
        for (n, v) in out.iter_mut().enumerate().skip(2) {
            *v = Rational::frac(5 * n as i64 - 7, 3);
        }
        return Ok(out);
    }
    let lucky = lucky_sums_exact(strategy, n_max.saturating_sub(2));
    Ok(partition_costs_from(&lucky, n_max))
}

/// Expected comparisons of one partitioning round on a random permutation
/// of size `n`, pivot comparison included.
pub fn partition_cost(strategy: StrategyId, n: usize) -> Result<Rational, DpError> {
    if n < 2 {
        check_supported(strategy)?;
        return Err(DpError::TooSmall(n));
    }
    Ok(partition_costs(strategy, n)?.swap_remove(n))
}

pub fn partition_costs_float(strategy: StrategyId, n_max: usize) -> Result<Vec<f64>, DpError> {
    check_supported(strategy)?;
    if matches!(strategy, StrategyId::SmallerFirst | StrategyId::LargerFirst) {
        let mut out = vec![0.0; n_max + 1];
        for (n, v) in out.iter_mut().enumerate().skip(2) {
            *v = (5 * n) as f64 / 3.0 - 7.0 / 3.0;
        }
        return Ok(out);
    }
    let lucky = lucky_sums_float(strategy, n_max.saturating_sub(2));
    Ok(partition_costs_from(&lucky, n_max))
}

trait Scalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn zero() -> Self;
    fn from_u64(v: u64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_u64(v: u64) -> Self {
        v as f64
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn from_u64(v: u64) -> Self {
        Rational::from(v)
    }
}

/// Runs the recurrence for `n = 0..=n_max`, handing each finished row
/// (`row[j-1] = C(n,j)`) to `on_row`. Only the two most recent rows are kept.
///
/// `M` is split as `sum_m R_m(j-1) - sum_m R_m(m+j-n)` where `R_m(x)` is the
/// prefix sum of row `m` over ranks `<= x`; both parts are maintained as
/// arrays (`b` over `x`, `t` over the diagonal offset `c = j-n`).
fn run_recurrence<T: Scalar>(partition: &[T], n_max: usize, mut on_row: impl FnMut(usize, &[T])) {
    let zero = T::zero();
    let mut a1 = vec![zero.clone(); n_max + 2];
    let mut a2 = vec![zero.clone(); n_max + 2];
    let mut b = vec![zero.clone(); n_max + 1];
    // t[c + n_max] for c in -n_max..=0
    let mut t = vec![zero.clone(); n_max + 1];

    let mut older: Vec<T> = Vec::new(); // row n-2
    let mut newer: Vec<T> = Vec::new(); // row n-1
    on_row(0, &[]);
    if n_max >= 1 {
        newer = vec![zero.clone()];
        on_row(1, &newer);
    }
    for n in 2..=n_max {
        let last = n as u64 - 1;
        for (j, c) in newer.iter().enumerate() {
            a1[j + 1] = a1[j + 1].clone() + c.clone();
            a2[j + 1] = a2[j + 1].clone() + T::from_u64(last) * c.clone();
        }
        let m = n - 2;
        if !older.is_empty() {
            let mut prefix = Vec::with_capacity(m + 1);
            prefix.push(zero.clone());
            for c in &older {
                let next = prefix.last().unwrap().clone() + c.clone();
                prefix.push(next);
            }
            for (x, bx) in b.iter_mut().enumerate().skip(1) {
                *bx = bx.clone() + prefix[x.min(m)].clone();
            }
            // c in (1-m)..=0, so m + c in 1..=m
            for y in 1..=m {
                let slot = y + n_max - m;
                t[slot] = t[slot].clone() + prefix[y].clone();
            }
        }
        let denom = T::from_u64(binomial2(n));
        let scale = T::from_u64(last);
        let row: Vec<T> = (1..=n)
            .map(|j| {
                let jj = n - j + 1;
                let s = scale.clone() * a1[j].clone() - a2[j].clone();
                let l = scale.clone() * a1[jj].clone() - a2[jj].clone();
                let mid = b[j - 1].clone() - t[j + n_max - n].clone();
                partition[n].clone() + (s + mid + l) / denom.clone()
            })
            .collect();
        on_row(n, &row);
        older = std::mem::replace(&mut newer, row);
    }
}

/// Exact `C_{n,j}` for `n <= n_max`.
#[derive(Debug, Clone)]
pub struct CostTable {
    strategy: StrategyId,
    partition: Vec<Rational>,
    rows: Vec<Vec<Rational>>,
}

impl CostTable {
    /// Builds the full table. No cap is applied here; cost grows with the
    /// bit length of the entries.
    pub fn build(strategy: StrategyId, n_max: usize) -> Result<Self, DpError> {
        let partition = partition_costs(strategy, n_max)?;
        let mut rows = Vec::with_capacity(n_max + 1);
        run_recurrence(&partition, n_max, |_, row| rows.push(row.to_vec()));
        Ok(CostTable {
            strategy,
            partition,
            rows,
        })
    }

    pub fn strategy(&self) -> StrategyId {
        self.strategy
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, n: usize) -> Option<&[Rational]> {
        self.rows.get(n).map(Vec::as_slice)
    }

    pub fn get(&self, n: usize, j: usize) -> Result<&Rational, DpError> {
        if n > self.n_max() {
            return Err(DpError::BeyondBound {
                n,
                bound: self.n_max(),
            });
        }
        if j == 0 || j > n {
            return Err(DpError::RankOutOfRange { n, j });
        }
        Ok(&self.rows[n][j - 1])
    }

    pub fn partition_cost(&self, n: usize) -> Option<&Rational> {
        self.partition.get(n).filter(|_| n >= 2)
    }

    pub fn grand_sum(&self, n: usize) -> Option<Rational> {
        self.row(n).map(|r| r.iter().sum())
    }

    pub fn grand_average(&self, n: usize) -> Option<Rational> {
        match n {
            0 => Some(Rational::zero()),
            _ => self.grand_sum(n).map(|s| s / Rational::from(n as u64)),
        }
    }

    /// CSV with columns `strategy,n,j,value,backend`.
    pub fn write_csv<W: io::Write>(&self, mut w: W) -> Result<(), DpError> {
        writeln!(w, "{CSV_HEADER_COMMENT}")?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["strategy", "n", "j", "value", "backend"])?;
        for (n, row) in self.rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                out.write_record([
                    self.strategy.as_str(),
                    &n.to_string(),
                    &(j + 1).to_string(),
                    &v.to_string(),
                    "exact",
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

fn memo() -> &'static Mutex<HashMap<StrategyId, Arc<CostTable>>> {
    static MEMO: OnceLock<Mutex<HashMap<StrategyId, Arc<CostTable>>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// Shared exact table covering at least `n` (capped at [`EXACT_BOUND`]).
pub fn exact_table(strategy: StrategyId, n: usize) -> Result<Arc<CostTable>, DpError> {
    check_supported(strategy)?;
    if n > EXACT_BOUND {
        return Err(DpError::BeyondBound {
            n,
            bound: EXACT_BOUND,
        });
    }
    if let Some(t) = memo().lock().unwrap().get(&strategy) {
        if t.n_max() >= n {
            return Ok(Arc::clone(t));
        }
    }
    // Build outside the lock; grow geometrically to limit rebuilds.
    let target = n.max(16).next_power_of_two().min(EXACT_BOUND);
    let table = Arc::new(CostTable::build(strategy, target)?);
    let mut guard = memo().lock().unwrap();
    let entry = guard.entry(strategy).or_insert_with(|| Arc::clone(&table));
    if entry.n_max() < table.n_max() {
        *entry = Arc::clone(&table);
    }
    Ok(Arc::clone(entry))
}

pub fn expected_cost(strategy: StrategyId, n: usize, j: usize) -> Result<Rational, DpError> {
    if j == 0 || j > n {
        return Err(DpError::RankOutOfRange { n, j });
    }
    exact_table(strategy, n)?.get(n, j).cloned()
}

/// `(1/n) sum_j C_{n,j}`; 0 for `n = 0`.
pub fn grand_average(strategy: StrategyId, n: usize) -> Result<Rational, DpError> {
    Ok(exact_table(strategy, n)?
        .grand_average(n)
        .expect("table covers n"))
}

/// Float results of one recurrence run: grand averages for every `n` and the
/// full columns of a few tracked ranks.
#[derive(Debug, Clone)]
pub struct FloatTable {
    pub strategy: StrategyId,
    pub partition: Vec<f64>,
    pub grand: Vec<f64>,
    pub tracked: Vec<(usize, Vec<f64>)>,
    pub last_row: Vec<f64>,
}

impl FloatTable {
    /// Runs the float recurrence up to `n_max` (at most [`FLOAT_BOUND`]),
    /// recording the columns of `ranks` (entries with `j > n` are 0).
    pub fn build(strategy: StrategyId, n_max: usize, ranks: &[usize]) -> Result<Self, DpError> {
        if n_max > FLOAT_BOUND {
            return Err(DpError::BeyondBound {
                n: n_max,
                bound: FLOAT_BOUND,
            });
        }
        let partition = partition_costs_float(strategy, n_max)?;
        let mut grand = vec![0.0; n_max + 1];
        let mut tracked: Vec<(usize, Vec<f64>)> =
            ranks.iter().map(|&j| (j, vec![0.0; n_max + 1])).collect();
        let mut last_row = Vec::new();
        run_recurrence(&partition, n_max, |n, row| {
            if n > 0 {
                grand[n] = row.iter().sum::<f64>() / n as f64;
            }
            for (j, col) in tracked.iter_mut() {
                if *j >= 1 && *j <= n {
                    col[n] = row[*j - 1];
                }
            }
            if n == n_max {
                last_row = row.to_vec();
            }
        });
        Ok(FloatTable {
            strategy,
            partition,
            grand,
            tracked,
            last_row,
        })
    }

    pub fn column(&self, j: usize) -> Option<&[f64]> {
        self.tracked
            .iter()
            .find(|(r, _)| *r == j)
            .map(|(_, c)| c.as_slice())
    }

    pub fn write_csv<W: io::Write>(&self, mut w: W) -> Result<(), DpError> {
        writeln!(w, "{CSV_HEADER_COMMENT}")?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["strategy", "n", "j", "value", "backend"])?;
        for n in 1..self.grand.len() {
            for (j, col) in &self.tracked {
                if *j <= n {
                    out.write_record([
                        self.strategy.as_str(),
                        &n.to_string(),
                        &j.to_string(),
                        &format!("{:.17e}", col[n]),
                        "float",
                    ])?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }
}

pub fn expected_cost_float(strategy: StrategyId, n: usize, j: usize) -> Result<f64, DpError> {
    if j == 0 || j > n {
        return Err(DpError::RankOutOfRange { n, j });
    }
    Ok(FloatTable::build(strategy, n, &[])?.last_row[j - 1])
}

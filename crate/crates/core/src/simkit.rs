//! Measurement by exhaustive enumeration and by seeded Monte Carlo.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::Rational;
use crate::selector::{rank_costs, select, SelectError};
use crate::strategies::{partition, StrategyError, StrategyId};

/// Default cap of exhaustive enumeration (`n!` inputs).
pub const ENUM_BOUND: usize = 9;
/// Cap of the randomness-preservation check.
pub const PRESERVATION_BOUND: usize = 7;
/// Default number of Monte Carlo trials.
pub const DEFAULT_TRIALS: u64 = 100_000;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("n = {n} exceeds the enumeration bound {bound}")]
    BeyondBound { n: usize, bound: usize },
    #[error("n must be at least 1")]
    Empty,
    #[error("rank {j} out of range 1..={n}")]
    RankOutOfRange { n: usize, j: usize },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Select(#[from] SelectError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// Which quantity is measured: a fixed rank or the uniform-rank average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Query {
    Grand,
    Rank(usize),
}

impl Query {
    fn check(self, n: usize) -> Result<(), SimError> {
        if n == 0 {
            return Err(SimError::Empty);
        }
        match self {
            Query::Rank(j) if j == 0 || j > n => Err(SimError::RankOutOfRange { n, j }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Grand => f.write_str("grand"),
            Query::Rank(j) => write!(f, "{j}"),
        }
    }
}

/// A measured cost: exact, or a sample mean with its standard error.
/// `stderr` is `None` when it is undefined (a single trial).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CostValue {
    Exact {
        value: Rational,
    },
    Estimated {
        mean: f64,
        stderr: Option<f64>,
        trials: u64,
        seed: u64,
    },
}

impl CostValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            CostValue::Exact { value } => value.to_f64(),
            CostValue::Estimated { mean, .. } => *mean,
        }
    }

    /// Whether `exact` lies within `k` standard errors of an estimate.
    /// Exact values must match exactly; a missing stderr never matches.
    pub fn within_sigma(&self, exact: &Rational, k: f64) -> bool {
        match self {
            CostValue::Exact { value } => value == exact,
            CostValue::Estimated { mean, stderr, .. } => match stderr {
                Some(se) => (mean - exact.to_f64()).abs() <= k * se,
                None => false,
            },
        }
    }
}

fn next_permutation(a: &mut [u32]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut k = n - 1;
    while a[k] <= a[i - 1] {
        k -= 1;
    }
    a.swap(i - 1, k);
    a[i..].reverse();
    true
}

/// Total comparisons per rank over all `n!` permutations of `1..=n`, visited
/// in lexicographic order; blocks sharing a first element run in parallel.
pub fn enumerate_rank_totals(n: usize, strategy: StrategyId) -> Result<Vec<u64>, SimError> {
    if n == 0 {
        return Err(SimError::Empty);
    }
    if n > ENUM_BOUND {
        return Err(SimError::BeyondBound {
            n,
            bound: ENUM_BOUND,
        });
    }
    let blocks: Vec<Result<Vec<u64>, SimError>> = (1..=n as u32)
        .into_par_iter()
        .map(|first| {
            let mut perm: Vec<u32> = std::iter::once(first)
                .chain((1..=n as u32).filter(|&x| x != first))
                .collect();
            let mut totals = vec![0u64; n];
            loop {
                for (t, c) in totals.iter_mut().zip(rank_costs(&perm, strategy)?) {
                    *t += c;
                }
                if !next_permutation(&mut perm[1..]) {
                    break;
                }
            }
            Ok(totals)
        })
        .collect();
    let mut totals = vec![0u64; n];
    for block in blocks {
        for (t, c) in totals.iter_mut().zip(block?) {
            *t += c;
        }
    }
    Ok(totals)
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Exact average comparison count over all `n!` inputs (and over a uniform
/// rank for [`Query::Grand`]).
pub fn enumerate_exact(n: usize, query: Query, strategy: StrategyId) -> Result<Rational, SimError> {
    query.check(n)?;
    let totals = enumerate_rank_totals(n, strategy)?;
    Ok(enumerated_value(&totals, query))
}

/// Averages derived from [`enumerate_rank_totals`] output.
pub fn enumerated_value(totals: &[u64], query: Query) -> Rational {
    let n = totals.len();
    let perms = Rational::from(factorial(n));
    match query {
        Query::Grand => {
            let sum: u64 = totals.iter().sum();
            Rational::from(sum) / (perms * Rational::from(n as u64))
        }
        Query::Rank(j) => Rational::from(totals[j - 1]) / perms,
    }
}

/// Generator for one trial; depends only on `(seed, trial)`.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Sample mean and standard error over `trials` uniform permutations. For
/// [`Query::Grand`] each trial contributes the average over all ranks of
/// its permutation. Integer accumulation keeps the result independent of
/// scheduling.
pub fn monte_carlo(
    n: usize,
    query: Query,
    strategy: StrategyId,
    trials: u64,
    seed: u64,
) -> Result<CostValue, SimError> {
    query.check(n)?;
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    let (sum, sum_sq) = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(u128, u128), SimError> {
            let mut perm: Vec<u32> = (1..=n as u32).collect();
            perm.shuffle(&mut trial_rng(seed, t));
            let x = match query {
                Query::Grand => rank_costs(&perm, strategy)?.iter().sum::<u64>(),
                Query::Rank(j) => select(&perm, j, strategy)?.comparisons,
            } as u128;
            Ok((x, x * x))
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    // samples are scaled by `n` in the grand case
    let scale = match query {
        Query::Grand => n as f64,
        Query::Rank(_) => 1.0,
    };
    let mean = sum as f64 / trials as f64 / scale;
    let stderr = (trials > 1).then(|| {
        let t = trials as u128;
        let centered = t * sum_sq - sum * sum;
        let var = centered as f64 / (trials as f64 * (trials - 1) as f64);
        (var / trials as f64).sqrt() / scale
    });
    Ok(CostValue::Estimated {
        mean,
        stderr,
        trials,
        seed,
    })
}

/// Outcome of one class-size triple in a preservation check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TripleCounts {
    pub sizes: (usize, usize, usize),
    pub inputs: u64,
    /// Distinct relative-order combinations observed.
    pub patterns_seen: u64,
    /// `s! m! l!`, the number a uniform outcome must hit.
    pub patterns_expected: u64,
    pub min_count: u64,
    pub max_count: u64,
}

impl TripleCounts {
    pub fn uniform(&self) -> bool {
        self.patterns_seen == self.patterns_expected && self.min_count == self.max_count
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreservationReport {
    pub n: usize,
    pub strategy: StrategyId,
    pub triples: Vec<TripleCounts>,
}

impl PreservationReport {
    pub fn uniform(&self) -> bool {
        self.triples.iter().all(TripleCounts::uniform)
    }
}

fn relative_order(xs: &[u32]) -> impl Iterator<Item = u8> + '_ {
    xs.iter()
        .map(|x| xs.iter().filter(|y| *y < x).count() as u8)
}

/// Partitions every permutation of `1..=n` once and counts, per class-size
/// triple, how often each combination of sublist relative orders occurs.
pub fn randomness_preservation_check(
    n: usize,
    strategy: StrategyId,
) -> Result<PreservationReport, SimError> {
    if n > PRESERVATION_BOUND {
        return Err(SimError::BeyondBound {
            n,
            bound: PRESERVATION_BOUND,
        });
    }
    if n < 2 {
        return Err(StrategyError::TooShort(n).into());
    }
    let mut hist: BTreeMap<(usize, usize, usize), HashMap<Vec<u8>, u64>> = BTreeMap::new();
    let mut perm: Vec<u32> = (1..=n as u32).collect();
    loop {
        let part = partition(&perm, strategy)?;
        let sizes = (part.smalls.len(), part.mediums.len(), part.larges.len());
        let key: Vec<u8> = relative_order(&part.smalls)
            .chain(relative_order(&part.mediums))
            .chain(relative_order(&part.larges))
            .collect();
        *hist.entry(sizes).or_default().entry(key).or_default() += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let triples = hist
        .into_iter()
        .map(|(sizes, counts)| TripleCounts {
            sizes,
            inputs: counts.values().sum(),
            patterns_seen: counts.len() as u64,
            patterns_expected: factorial(sizes.0) * factorial(sizes.1) * factorial(sizes.2),
            min_count: counts.values().copied().min().unwrap_or(0),
            max_count: counts.values().copied().max().unwrap_or(0),
        })
        .collect();
    Ok(PreservationReport {
        n,
        strategy,
        triples,
    })
}

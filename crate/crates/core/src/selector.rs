//! Quickselect engines: dual-pivot recursion over the strategies, plus the
//! classical single-pivot baseline.

use thiserror::Error;

use crate::strategies::{partition, StrategyError, StrategyId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectError {
    #[error("rank {j} out of range 1..={n}")]
    RankOutOfRange { j: usize, n: usize },
    #[error("cannot select from an empty array")]
    Empty,
    #[error("keys must be distinct")]
    DuplicateKey,
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectOutcome<K> {
    pub key: K,
    pub comparisons: u64,
}

fn validate<K: Ord>(keys: &[K], j: Option<usize>) -> Result<(), SelectError> {
    let n = keys.len();
    if n == 0 {
        return Err(SelectError::Empty);
    }
    if let Some(j) = j {
        if j == 0 || j > n {
            return Err(SelectError::RankOutOfRange { j, n });
        }
    }
    let mut sorted: Vec<&K> = keys.iter().collect();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(SelectError::DuplicateKey);
    }
    Ok(())
}

/// Finds the `j`-th smallest key (1-based), counting key comparisons.
/// `StrategyId::Classical` dispatches to [`select_classical`].
pub fn select<K: Ord + Clone>(
    keys: &[K],
    j: usize,
    strategy: StrategyId,
) -> Result<SelectOutcome<K>, SelectError> {
    if strategy == StrategyId::Classical {
        return select_classical(keys, j);
    }
    validate(keys, Some(j))?;
    let mut comparisons = 0u64;
    let mut current = keys.to_vec();
    let mut j = j;
    loop {
        if current.len() == 1 {
            return Ok(SelectOutcome {
                key: current.swap_remove(0),
                comparisons,
            });
        }
        let part = partition(&current, strategy)?;
        comparisons += part.comparisons;
        let (s, m) = (part.smalls.len(), part.mediums.len());
        current = if j <= s {
            part.smalls
        } else if j == s + 1 {
            return Ok(SelectOutcome {
                key: part.p,
                comparisons,
            });
        } else if j <= s + m + 1 {
            j -= s + 1;
            part.mediums
        } else if j == s + m + 2 {
            return Ok(SelectOutcome {
                key: part.q,
                comparisons,
            });
        } else {
            j -= s + m + 2;
            part.larges
        };
    }
}

/// Single-pivot quickselect with the first element as pivot; each round
/// costs `n - 1` comparisons.
pub fn select_classical<K: Ord + Clone>(
    keys: &[K],
    j: usize,
) -> Result<SelectOutcome<K>, SelectError> {
    validate(keys, Some(j))?;
    let mut comparisons = 0u64;
    let mut current = keys.to_vec();
    let mut j = j;
    loop {
        if current.len() == 1 {
            return Ok(SelectOutcome {
                key: current.swap_remove(0),
                comparisons,
            });
        }
        let (smalls, pivot, larges) = classical_partition(&current);
        comparisons += current.len() as u64 - 1;
        let s = smalls.len();
        current = if j <= s {
            smalls
        } else if j == s + 1 {
            return Ok(SelectOutcome {
                key: pivot,
                comparisons,
            });
        } else {
            j -= s + 1;
            larges
        };
    }
}

fn classical_partition<K: Ord + Clone>(keys: &[K]) -> (Vec<K>, K, Vec<K>) {
    let pivot = keys[0].clone();
    let (smalls, larges): (Vec<K>, Vec<K>) = keys[1..].iter().cloned().partition(|x| *x < pivot);
    (smalls, pivot, larges)
}

/// Comparison counts of selecting every rank `1..=n` from `keys`, sharing
/// the partitioning work between ranks. Entry `j - 1` equals
/// `select(keys, j, strategy).comparisons`.
pub fn rank_costs<K: Ord + Clone>(
    keys: &[K],
    strategy: StrategyId,
) -> Result<Vec<u64>, SelectError> {
    validate(keys, None)?;
    rank_costs_unchecked(keys, strategy)
}

fn rank_costs_unchecked<K: Ord + Clone>(
    keys: &[K],
    strategy: StrategyId,
) -> Result<Vec<u64>, SelectError> {
    let n = keys.len();
    if n <= 1 {
        return Ok(vec![0; n]);
    }
    let mut out = Vec::with_capacity(n);
    if strategy == StrategyId::Classical {
        let (smalls, _, larges) = classical_partition(keys);
        let cost = n as u64 - 1;
        out.extend(
            rank_costs_unchecked(&smalls, strategy)?
                .into_iter()
                .map(|c| c + cost),
        );
        out.push(cost);
        out.extend(
            rank_costs_unchecked(&larges, strategy)?
                .into_iter()
                .map(|c| c + cost),
        );
    } else {
        let part = partition(keys, strategy)?;
        let cost = part.comparisons;
        out.extend(
            rank_costs_unchecked(&part.smalls, strategy)?
                .into_iter()
                .map(|c| c + cost),
        );
        out.push(cost);
        out.extend(
            rank_costs_unchecked(&part.mediums, strategy)?
                .into_iter()
                .map(|c| c + cost),
        );
        out.push(cost);
        out.extend(
            rank_costs_unchecked(&part.larges, strategy)?
                .into_iter()
                .map(|c| c + cost),
        );
    }
    Ok(out)
}

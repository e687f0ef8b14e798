//! Ruling out the pattern when only entrywise lower bounds of `C` are known.
//!
//! Raising entries can only move a column away from the shape, except where
//! the bound is still below the target value. So `(T, s)` survives against a
//! lower bound `lb` iff, for all `t ≠ t′` in `T` and `j ∉ T ∪ {s}`:
//!
//! ```text
//! lb[t][t] ≤ 2,  lb[t][t′] ≤ 1,  lb[t][s] ≤ 1,  lb[t][j] = 0
//! ```

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{check_matrix, DetectOptions, KawataError, KawataPattern};
use crate::blockdata::{CartanMatrix, Exactness};

/// A witness here proves nothing about the true Cartan matrix; it only says
/// the bounds are too weak to exclude the shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ExclusionResult {
    Excluded,
    NotExcluded { witness: KawataPattern },
}

impl ExclusionResult {
    pub fn is_excluded(&self) -> bool {
        matches!(self, Self::Excluded)
    }
}

pub fn exclude_by_lower_bounds(c: &CartanMatrix) -> Result<ExclusionResult, KawataError> {
    exclude_by_lower_bounds_with(c, DetectOptions::default())
}

/// Decides whether any consistent `(T, s)` exists, returning the smallest by
/// `(n, t_set, s)` if so.
///
/// For fixed `s`, every `t ∈ T` drags in all `j ≠ s` with `lb[t][j] > 0`.
/// Closing `{t}` under that rule gives the least `T` containing `t`, and it
/// is consistent iff each of its members is (`lb` diagonal ≤ 2, other entries
/// ≤ 1). Any consistent `T` contains the closure of each of its members, so
/// a minimum-size consistent `T` is itself a closure and trying every
/// `(t, s)` is exhaustive.
pub fn exclude_by_lower_bounds_with(
    c: &CartanMatrix,
    opts: DetectOptions,
) -> Result<ExclusionResult, KawataError> {
    if c.exactness != Exactness::LowerBound {
        return Err(KawataError::WrongExactness {
            operation: "lower-bound exclusion",
            expected: Exactness::LowerBound,
            found: c.exactness,
        });
    }
    check_matrix(c, opts)?;
    let m = &c.matrix;
    let size = m.cols();
    let two = BigInt::from(2);
    let one = BigInt::one();

    let candidate: Vec<bool> = (0..size)
        .map(|t| (0..size).all(|j| m.get(t, j) <= if j == t { &two } else { &one }))
        .collect();
    let support: Vec<Vec<usize>> = (0..size)
        .map(|t| {
            (0..size)
                .filter(|&j| j != t && !m.get(t, j).is_zero())
                .collect()
        })
        .collect();

    let mut best: Option<KawataPattern> = None;
    for t in (0..size).filter(|&t| candidate[t]) {
        for s in (0..size).filter(|&s| s != t) {
            let Some(t_set) = closure(t, s, &candidate, &support) else {
                continue;
            };
            let pat = KawataPattern::new(s, t_set, size);
            if best.as_ref().is_none_or(|b| pat < *b) {
                best = Some(pat);
            }
        }
    }
    Ok(match best {
        None => ExclusionResult::Excluded,
        Some(witness) => ExclusionResult::NotExcluded { witness },
    })
}

fn closure(t: usize, s: usize, candidate: &[bool], support: &[Vec<usize>]) -> Option<Vec<usize>> {
    let mut member = vec![false; candidate.len()];
    member[t] = true;
    let mut stack = vec![t];
    while let Some(x) = stack.pop() {
        if !candidate[x] {
            return None;
        }
        for &j in &support[x] {
            if j != s && !member[j] {
                member[j] = true;
                stack.push(j);
            }
        }
    }
    Some((0..member.len()).filter(|&j| member[j]).collect())
}

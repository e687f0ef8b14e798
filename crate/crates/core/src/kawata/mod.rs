//! Detection of the Cartan-matrix shape forced by a simple module lying off
//! the rim of its stable AR component.
//!
//! A *pattern* is a distinguished column `s` and a nonempty set `T` of other
//! columns such that, for all `t ≠ t′` in `T` and `j ∉ T ∪ {s}`:
//!
//! ```text
//! C[t][t] = 2,  C[t][t′] = 1,  C[t][s] = 1,  C[t][j] = 0
//! ```
//!
//! with the row and column of `s` otherwise unconstrained. If a simple module
//! `S` of a wild block sits on row `n ≥ 2` (minimal) of its component, the
//! Cartan matrix has such a pattern with `|T| = n − 1`; so an empty pattern
//! list proves every simple module lies at the end of its component. The
//! converse only holds for `n = 2`.
//!
//! All indices are 0-based.

mod exclude;
mod synth;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::blockdata::{CartanMatrix, Exactness};
use crate::exactmat::IntMatrix;

pub use exclude::{exclude_by_lower_bounds, exclude_by_lower_bounds_with, ExclusionResult};
pub use synth::synth_pattern_matrix;

/// Column cap applied unless [`DetectOptions::max_columns`] is lifted.
pub const DEFAULT_MAX_COLUMNS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KawataError {
    #[error("{operation} needs a Cartan matrix marked {expected:?}, got {found:?}")]
    WrongExactness {
        operation: &'static str,
        expected: Exactness,
        found: Exactness,
    },
    #[error("invalid Cartan matrix: {0}")]
    InvalidMatrix(String),
    #[error("matrix has {columns} columns, above the cap of {cap} (lift the cap to proceed)")]
    TooLarge { columns: usize, cap: usize },
    #[error("label misalignment: {got} labels for a {expected}-column matrix")]
    LabelMismatch { expected: usize, got: usize },
    #[error("invalid filler block: {0}")]
    InvalidFiller(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectOptions {
    /// `None` removes the cap.
    pub max_columns: Option<usize>,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            max_columns: Some(DEFAULT_MAX_COLUMNS),
        }
    }
}

impl DetectOptions {
    pub fn uncapped() -> Self {
        Self { max_columns: None }
    }
}

/// A witness `(s, T)` for the shape above. `t_set` is kept ascending: the
/// constraints are symmetric in `T`, and the finer ordering of the modules
/// `S_2, ..., S_n` is not visible in the Cartan matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct KawataPattern {
    pub n: usize,
    pub t_set: Vec<usize>,
    pub s: usize,
    /// Number of columns of the source matrix.
    pub size: usize,
}

impl KawataPattern {
    pub fn new(s: usize, mut t_set: Vec<usize>, size: usize) -> Self {
        t_set.sort_unstable();
        t_set.dedup();
        Self {
            n: t_set.len() + 1,
            t_set,
            s,
            size,
        }
    }

    /// Checks the four shape constraints directly against `c`.
    pub fn fits(&self, c: &IntMatrix) -> bool {
        if c.cols() != self.size || !c.is_square() || self.t_set.is_empty() {
            return false;
        }
        if self.s >= self.size || self.t_set.iter().any(|&t| t >= self.size || t == self.s) {
            return false;
        }
        let one = BigInt::one();
        let two = BigInt::from(2);
        self.t_set.iter().all(|&t| {
            (0..self.size).all(|j| {
                let e = c.get(t, j);
                if j == t {
                    *e == two
                } else if j == self.s || self.t_set.contains(&j) {
                    *e == one
                } else {
                    e.is_zero()
                }
            })
        })
    }

    /// The pattern after relabelling column `i` as `map[i]`.
    pub fn relabel(&self, map: &[usize]) -> Self {
        Self::new(
            map[self.s],
            self.t_set.iter().map(|&t| map[t]).collect(),
            self.size,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternClass {
    /// `n = 2`: the shape is also sufficient, so `S` is on the second row.
    ConfirmedOffRim,
    /// `n >= 3`: necessary condition only.
    CandidateOnly,
}

pub fn classify_pattern(pattern: &KawataPattern) -> PatternClass {
    if pattern.n == 2 {
        PatternClass::ConfirmedOffRim
    } else {
        PatternClass::CandidateOnly
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cell {
    Zero,
    One,
    Two,
    Other,
}

fn cell(e: &BigInt) -> Cell {
    if e.is_zero() {
        Cell::Zero
    } else if e.is_one() {
        Cell::One
    } else if *e == BigInt::from(2) {
        Cell::Two
    } else {
        Cell::Other
    }
}

pub(crate) fn check_matrix(c: &CartanMatrix, opts: DetectOptions) -> Result<(), KawataError> {
    let m = &c.matrix;
    if let Some(cap) = opts.max_columns {
        if m.cols() > cap {
            return Err(KawataError::TooLarge {
                columns: m.cols(),
                cap,
            });
        }
    }
    match m.is_symmetric() {
        Ok(true) => {}
        Ok(false) => return Err(KawataError::InvalidMatrix("not symmetric".into())),
        Err(e) => return Err(KawataError::InvalidMatrix(e.to_string())),
    }
    if m.entries().iter().any(Signed::is_negative) {
        return Err(KawataError::InvalidMatrix("negative entry".into()));
    }
    Ok(())
}

pub fn detect_patterns(c: &CartanMatrix) -> Result<Vec<KawataPattern>, KawataError> {
    detect_patterns_with(c, DetectOptions::default())
}

/// All patterns of an exact Cartan matrix, sorted by `(n, t_set, s)`.
///
/// A column `t` can belong to `T` only if `C[t][t] = 2` and its other
/// entries are 0 or 1; then `T ∪ {s}` must be exactly `{t} ∪ supp(t)`, which
/// leaves `|supp(t)|` choices of `s` per candidate.
pub fn detect_patterns_with(
    c: &CartanMatrix,
    opts: DetectOptions,
) -> Result<Vec<KawataPattern>, KawataError> {
    if c.exactness != Exactness::Exact {
        return Err(KawataError::WrongExactness {
            operation: "pattern detection",
            expected: Exactness::Exact,
            found: c.exactness,
        });
    }
    check_matrix(c, opts)?;
    let m = &c.matrix;
    let size = m.cols();
    let cells: Vec<Cell> = m.entries().iter().map(cell).collect();
    let at = |i: usize, j: usize| cells[i * size + j];

    let candidate: Vec<bool> = (0..size)
        .map(|t| {
            at(t, t) == Cell::Two
                && (0..size).all(|j| j == t || matches!(at(t, j), Cell::Zero | Cell::One))
        })
        .collect();
    // closed neighbourhood {t} ∪ supp(t), ascending
    let closed: Vec<Vec<usize>> = (0..size)
        .map(|t| {
            (0..size)
                .filter(|&j| j == t || at(t, j) == Cell::One)
                .collect()
        })
        .collect();

    let mut found = BTreeSet::new();
    for t in (0..size).filter(|&t| candidate[t]) {
        let u = &closed[t];
        for &s in u.iter().filter(|&&s| s != t) {
            let t_set: Vec<usize> = u.iter().copied().filter(|&j| j != s).collect();
            if t_set.iter().all(|&x| candidate[x] && closed[x] == *u) {
                found.insert(KawataPattern::new(s, t_set, size));
            }
        }
    }
    Ok(found.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PimLadder {
    pub simple: String,
    /// Loewy layers from top to socle; length `n + 1`.
    pub layers: Vec<String>,
}

/// Structure predicted for `P(S)` and the `P(S_i)` by a pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeartReport {
    pub s_label: String,
    /// The uniserial summand `S_2, ..., S_n` of the heart of `P(S)`
    /// (length `n − 1`).
    pub uniserial_ladder: Vec<String>,
    /// Symbolic name of the complementary summand, predicted nonzero and
    /// indecomposable.
    pub remainder_label: String,
    pub remainder_nonzero: bool,
    pub pim_ladders: Vec<PimLadder>,
    pub ordering_note: String,
}

pub fn heart_report<S: AsRef<str>>(
    pattern: &KawataPattern,
    labels: &[S],
) -> Result<HeartReport, KawataError> {
    if labels.len() != pattern.size {
        return Err(KawataError::LabelMismatch {
            expected: pattern.size,
            got: labels.len(),
        });
    }
    let label = |i: usize| labels[i].as_ref().to_string();
    let s_label = label(pattern.s);
    let ladder: Vec<String> = pattern.t_set.iter().map(|&t| label(t)).collect();

    // cyclic order S_2, ..., S_n, S
    let mut cycle = ladder.clone();
    cycle.push(s_label.clone());
    let len = cycle.len();
    let pim_ladders = (0..ladder.len())
        .map(|i| PimLadder {
            simple: ladder[i].clone(),
            layers: (0..=len).map(|k| cycle[(i + k) % len].clone()).collect(),
        })
        .collect();

    Ok(HeartReport {
        s_label,
        uniserial_ladder: ladder,
        remainder_label: "V".into(),
        remainder_nonzero: true,
        pim_ladders,
        ordering_note: "S_2..S_n are listed in ascending column order; the order along the \
                        Heller orbit is not determined by the Cartan matrix"
            .into(),
    })
}

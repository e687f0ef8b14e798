//! Consistency report for a loaded block record. Nothing here fails: every
//! check either produces a value, raises a flag, or records why it was
//! skipped.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::{BlockRecord, Exactness};
use crate::arith::p_valuation;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnCount {
    pub column: usize,
    pub label: String,
    /// Positive entries in this column of `D`.
    pub nonzero: usize,
    /// `Σ_r D[r][j]²`, a lower bound for `C[j][j]` (exact when `D` is
    /// complete). Never smaller than `nonzero`.
    #[serde(serialize_with = "super::serde_matrix::serialize_bigint")]
    pub diagonal_lower_bound: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BrauerCheck {
    /// `min ν_p(dim S) = ν_p(|G|) − d(B)`.
    Consistent {
        min_valuation: u32,
        expected: u32,
    },
    Violation {
        min_valuation: u32,
        expected: u32,
    },
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "flag", rename_all = "snake_case")]
pub enum ValidationFlag {
    BrauerViolation { min_valuation: u32, expected: u32 },
    NotSymmetric,
    NegativeEntry,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedCheck {
    pub check: &'static str,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub group_id: String,
    pub columns: Option<Vec<ColumnCount>>,
    /// 0-based positions `j` with `C[j][j] = 2`.
    pub diagonal_two: Vec<usize>,
    pub brauer: BrauerCheck,
    pub symmetric: bool,
    pub nonnegative: bool,
    pub flags: Vec<ValidationFlag>,
    pub skipped: Vec<SkippedCheck>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn nonzero_counts(&self) -> Option<Vec<usize>> {
        self.columns
            .as_ref()
            .map(|cols| cols.iter().map(|c| c.nonzero).collect())
    }
}

pub fn validate_block(record: &BlockRecord) -> ValidationReport {
    let mut flags = Vec::new();
    let mut skipped = Vec::new();

    let columns = match &record.decomposition {
        Some(d) => {
            let counts = d.matrix.column_nonzero_counts();
            Some(
                counts
                    .into_iter()
                    .enumerate()
                    .map(|(j, nonzero)| ColumnCount {
                        column: j,
                        label: d.brauer_labels[j].clone(),
                        nonzero,
                        diagonal_lower_bound: d.matrix.column(j).map(|e| e * e).sum(),
                    })
                    .collect(),
            )
        }
        None => {
            skipped.push(SkippedCheck {
                check: "column_counts",
                reason: "record carries no decomposition matrix".into(),
            });
            None
        }
    };

    let cartan = record.cartan();
    let two = BigInt::from(2);
    let diagonal_two = cartan
        .matrix
        .diagonal()
        .enumerate()
        .filter(|(_, d)| **d == two)
        .map(|(i, _)| i)
        .collect();

    let symmetric = cartan.matrix.is_symmetric().unwrap_or(false);
    if !symmetric {
        flags.push(ValidationFlag::NotSymmetric);
    }
    let nonnegative = cartan.matrix.is_nonnegative()
        && record
            .decomposition
            .as_ref()
            .is_none_or(|d| d.matrix.is_nonnegative());
    if !nonnegative {
        flags.push(ValidationFlag::NegativeEntry);
    }

    let brauer = match (&record.simple_dims, cartan.exactness) {
        (None, _) => {
            skipped.push(SkippedCheck {
                check: "brauer_valuation",
                reason: "record carries no simple_dims".into(),
            });
            BrauerCheck::Skipped
        }
        (Some(_), Exactness::LowerBound) => {
            skipped.push(SkippedCheck {
                check: "brauer_valuation",
                reason: "Cartan matrix is only a lower bound; the simple modules may be incomplete"
                    .into(),
            });
            BrauerCheck::Skipped
        }
        (Some(dims), Exactness::Exact) => {
            let expected = record.group_p_valuation - record.defect;
            let min_valuation = dims
                .iter()
                .filter(|d| !d.is_zero())
                .map(|&d| p_valuation(d, record.prime))
                .min()
                .unwrap_or(0);
            if min_valuation == expected {
                BrauerCheck::Consistent {
                    min_valuation,
                    expected,
                }
            } else {
                flags.push(ValidationFlag::BrauerViolation {
                    min_valuation,
                    expected,
                });
                BrauerCheck::Violation {
                    min_valuation,
                    expected,
                }
            }
        }
    };

    ValidationReport {
        group_id: record.group_id.clone(),
        columns,
        diagonal_two,
        brauer,
        symmetric,
        nonnegative,
        flags,
        skipped,
    }
}

//! Block records: decomposition and Cartan matrices of one block of one
//! group at one prime, together with the numeric metadata the rim checks
//! consume.
//!
//! Records are read from JSON (see [`load_block_record`]) and are fully
//! validated on load. When a record only carries a decomposition matrix the
//! Cartan matrix `ᵀD·D` is computed and attached as exact.

mod clifford;
mod gap;
mod serde_matrix;
mod validate;

use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::exactmat::{IntMatrix, MatrixError};

pub use clifford::{clifford_counts, nonperiodicity_certificate, CliffordCounts, CliffordError};
pub use gap::{format_gap_display, parse_gap_display, GapParseError};
pub use validate::{
    validate_block, BrauerCheck, ColumnCount, SkippedCheck, ValidationFlag, ValidationReport,
};

#[derive(Debug, Error)]
pub enum BlockError {
    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("validation error [{invariant}]: {detail}")]
    Validation {
        invariant: &'static str,
        detail: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl BlockError {
    fn invalid(invariant: &'static str, detail: impl Into<String>) -> Self {
        Self::Validation {
            invariant,
            detail: detail.into(),
        }
    }
}

/// Whether a Cartan matrix is the true one or only an entrywise lower bound
/// (for instance the Gram matrix of a row-submatrix of `D`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    LowerBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionMatrix {
    pub ordinary_labels: Vec<String>,
    pub brauer_labels: Vec<String>,
    pub matrix: IntMatrix,
}

impl DecompositionMatrix {
    pub fn new(
        matrix: IntMatrix,
        ordinary_labels: Vec<String>,
        brauer_labels: Vec<String>,
    ) -> Result<Self, BlockError> {
        let d = Self {
            ordinary_labels,
            brauer_labels,
            matrix,
        };
        d.check()?;
        Ok(d)
    }

    /// Unlabelled decomposition matrix; rows are `chi1..`, columns `phi1..`.
    pub fn unlabelled(matrix: IntMatrix) -> Result<Self, BlockError> {
        let ordinary = (1..=matrix.rows()).map(|i| format!("chi{i}")).collect();
        let brauer = (1..=matrix.cols()).map(|i| format!("phi{i}")).collect();
        Self::new(matrix, ordinary, brauer)
    }

    pub fn check(&self) -> Result<(), BlockError> {
        let m = &self.matrix;
        if m.is_empty() {
            return Err(BlockError::invalid(
                "decomposition.nonempty",
                "decomposition matrix has no entries",
            ));
        }
        if !m.is_nonnegative() {
            return Err(BlockError::invalid(
                "decomposition.nonnegative",
                "decomposition numbers must be >= 0",
            ));
        }
        if let Some(j) = m.column_nonzero_counts().iter().position(|&c| c == 0) {
            return Err(BlockError::invalid(
                "decomposition.no_zero_column",
                format!("column {} ({}) is zero", j + 1, self.label(j)),
            ));
        }
        if self.ordinary_labels.len() != m.rows() {
            return Err(BlockError::invalid(
                "decomposition.labels",
                format!(
                    "{} ordinary labels for {} rows",
                    self.ordinary_labels.len(),
                    m.rows()
                ),
            ));
        }
        if self.brauer_labels.len() != m.cols() {
            return Err(BlockError::invalid(
                "decomposition.labels",
                format!(
                    "{} Brauer labels for {} columns",
                    self.brauer_labels.len(),
                    m.cols()
                ),
            ));
        }
        Ok(())
    }

    fn label(&self, j: usize) -> &str {
        self.brauer_labels.get(j).map(String::as_str).unwrap_or("?")
    }

    pub fn cartan(&self) -> IntMatrix {
        self.matrix
            .transpose_multiply()
            .expect("validated decomposition matrices are nonempty")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CartanMatrix {
    pub exactness: Exactness,
    pub matrix: IntMatrix,
}

impl CartanMatrix {
    pub fn new(matrix: IntMatrix, exactness: Exactness) -> Result<Self, BlockError> {
        let c = Self { exactness, matrix };
        c.check()?;
        Ok(c)
    }

    pub fn exact(matrix: IntMatrix) -> Result<Self, BlockError> {
        Self::new(matrix, Exactness::Exact)
    }

    pub fn lower_bound(matrix: IntMatrix) -> Result<Self, BlockError> {
        Self::new(matrix, Exactness::LowerBound)
    }

    pub fn size(&self) -> usize {
        self.matrix.cols()
    }

    pub fn is_exact(&self) -> bool {
        self.exactness == Exactness::Exact
    }

    pub fn check(&self) -> Result<(), BlockError> {
        let m = &self.matrix;
        if m.is_empty() {
            return Err(BlockError::invalid(
                "cartan.nonempty",
                "Cartan matrix is empty",
            ));
        }
        match m.is_symmetric() {
            Err(MatrixError::NotSquare { rows, cols }) => {
                return Err(BlockError::invalid(
                    "cartan.square",
                    format!("Cartan matrix is {rows}x{cols}"),
                ))
            }
            Ok(false) => {
                return Err(BlockError::invalid(
                    "cartan.symmetric",
                    "Cartan matrix is not symmetric",
                ))
            }
            _ => {}
        }
        if !m.is_nonnegative() {
            return Err(BlockError::invalid(
                "cartan.nonnegative",
                "Cartan entries must be >= 0",
            ));
        }
        if self.is_exact() {
            if let Some(i) = m.diagonal().position(|d| d < &BigInt::one()) {
                return Err(BlockError::invalid(
                    "cartan.positive_diagonal",
                    format!("exact Cartan matrix has diagonal entry {} = 0", i + 1),
                ));
            }
        }
        Ok(())
    }
}

/// One block of one group at one prime.
///
/// `group_p_valuation` is `ν_p(|G|)`; `p_rank` is the rank of a maximal
/// elementary abelian `p`-subgroup. The two are different numbers and both
/// show up in the checks, so they are never merged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockRecord {
    pub group_id: String,
    pub prime: u64,
    pub block_tag: String,
    pub defect: u32,
    pub group_p_valuation: u32,
    pub p_rank: u32,
    /// Asserted, never inferred.
    pub wild: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cartan: Option<CartanMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simple_dims: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl BlockRecord {
    /// Checks every record invariant and attaches the computed Cartan matrix
    /// when only a decomposition matrix is present.
    pub fn finalize(mut self) -> Result<Self, BlockError> {
        if !arith::is_prime(self.prime) {
            return Err(BlockError::invalid(
                "record.prime",
                format!("{} is not a prime", self.prime),
            ));
        }
        if self.defect > self.group_p_valuation {
            return Err(BlockError::invalid(
                "record.defect_bound",
                format!(
                    "defect {} exceeds group_p_valuation {}",
                    self.defect, self.group_p_valuation
                ),
            ));
        }
        if self.p_rank > self.group_p_valuation {
            return Err(BlockError::invalid(
                "record.p_rank_bound",
                format!(
                    "p_rank {} exceeds group_p_valuation {}",
                    self.p_rank, self.group_p_valuation
                ),
            ));
        }
        if let Some(d) = &self.decomposition {
            d.check()?;
        }
        if let Some(c) = &self.cartan {
            c.check()?;
        }
        match (&self.decomposition, &self.cartan) {
            (None, None) => {
                return Err(BlockError::invalid(
                    "record.has_matrix",
                    "record needs a decomposition or a Cartan matrix",
                ))
            }
            (Some(d), None) => {
                self.cartan = Some(CartanMatrix::exact(d.cartan())?);
            }
            (Some(d), Some(c)) => {
                // A lower-bound Cartan matrix next to D means D is a row
                // submatrix; either way the stored matrix must be ᵀD·D.
                if d.cartan() != c.matrix {
                    return Err(BlockError::invalid(
                        "cartan.matches_decomposition",
                        "provided Cartan matrix differs from the transpose-product of the decomposition matrix",
                    ));
                }
            }
            (None, Some(_)) => {}
        }
        if let Some(dims) = &self.simple_dims {
            if dims.iter().any(Zero::is_zero) {
                return Err(BlockError::invalid(
                    "simple_dims.positive",
                    "simple module dimensions must be positive",
                ));
            }
            let n = self.num_simples();
            if dims.len() != n {
                return Err(BlockError::invalid(
                    "simple_dims.length",
                    format!("{} dimensions for {n} simple modules", dims.len()),
                ));
            }
        }
        Ok(self)
    }

    /// The Cartan matrix; always present on loaded records.
    pub fn cartan(&self) -> &CartanMatrix {
        self.cartan
            .as_ref()
            .expect("finalized block records always carry a Cartan matrix")
    }

    pub fn num_simples(&self) -> usize {
        match (&self.cartan, &self.decomposition) {
            (Some(c), _) => c.size(),
            (None, Some(d)) => d.matrix.cols(),
            (None, None) => 0,
        }
    }

    /// Brauer labels, falling back to `S1, S2, ...` for Cartan-only records.
    pub fn simple_labels(&self) -> Vec<String> {
        match &self.decomposition {
            Some(d) => d.brauer_labels.clone(),
            None => (1..=self.num_simples()).map(|i| format!("S{i}")).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("block records always serialize")
    }
}

/// Parses and validates a block record from UTF-8 JSON.
pub fn load_block_record(bytes: &[u8]) -> Result<BlockRecord, BlockError> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let record: BlockRecord = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        BlockError::Parse {
            path,
            message: e.into_inner().to_string(),
        }
    })?;
    de.end().map_err(|e| BlockError::Parse {
        path: ".".into(),
        message: e.to_string(),
    })?;
    record.finalize()
}

pub fn load_block_file(path: &Path) -> Result<BlockRecord, BlockError> {
    let bytes = std::fs::read(path).map_err(|source| BlockError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_block_record(&bytes)
}

/// A bare matrix object `{"matrix": [[...]]}`, the output of GAP-display
/// conversion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub matrix: IntMatrix,
}

pub fn load_matrix_document(bytes: &[u8]) -> Result<MatrixDocument, BlockError> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(&mut de).map_err(|e| BlockError::Parse {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record_json(extra: &str) -> String {
        format!(
            r#"{{"group_id":"G","prime":3,"block_tag":"principal","defect":1,
               "group_p_valuation":1,"p_rank":1,"wild":false{extra}}}"#
        )
    }

    #[test]
    fn decomposition_only_gets_exact_cartan() {
        let json = record_json(
            r#","decomposition":{"ordinary_labels":["a"],"brauer_labels":["b"],"matrix":[[1]]}"#,
        );
        let rec = load_block_record(json.as_bytes()).unwrap();
        let c = rec.cartan();
        assert_eq!(c.exactness, Exactness::Exact);
        assert_eq!(c.matrix, IntMatrix::identity(1));
    }

    #[test]
    fn inconsistent_cartan_is_rejected() {
        let json = record_json(
            r#","decomposition":{"ordinary_labels":["a","b"],"brauer_labels":["x"],"matrix":[[1],[1]]},
               "cartan":{"exactness":"exact","matrix":[[3]]}"#,
        );
        let err = load_block_record(json.as_bytes()).unwrap_err();
        assert!(matches!(
            err,
            BlockError::Validation {
                invariant: "cartan.matches_decomposition",
                ..
            }
        ));
    }

    #[test]
    fn missing_field_names_the_field() {
        let err = load_block_record(br#"{"group_id":"G"}"#).unwrap_err();
        assert!(err.to_string().contains("prime"), "{err}");
    }

    #[test]
    fn wrong_type_names_the_field() {
        let json = record_json(r#","cartan":{"exactness":"exact","matrix":[["1"]]}"#);
        let err = load_block_record(json.as_bytes()).unwrap_err();
        match err {
            BlockError::Parse { path, .. } => assert!(path.starts_with("cartan.matrix"), "{path}"),
            other => panic!("unexpected {other}"),
        }
        let json = record_json("").replace(r#""prime":3"#, r#""prime":"three""#);
        let err = load_block_record(json.as_bytes()).unwrap_err();
        match err {
            BlockError::Parse { path, .. } => assert_eq!(path, "prime"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn needs_some_matrix() {
        let err = load_block_record(record_json("").as_bytes()).unwrap_err();
        assert!(matches!(
            err,
            BlockError::Validation {
                invariant: "record.has_matrix",
                ..
            }
        ));
    }

    #[test]
    fn invariant_violations() {
        let cases = [
            (
                r#","cartan":{"exactness":"exact","matrix":[[1,2],[3,1]]}"#,
                "cartan.symmetric",
            ),
            (
                r#","cartan":{"exactness":"exact","matrix":[[1,2]]}"#,
                "cartan.square",
            ),
            (
                r#","cartan":{"exactness":"exact","matrix":[[0]]}"#,
                "cartan.positive_diagonal",
            ),
            (
                r#","cartan":{"exactness":"exact","matrix":[[-1]]}"#,
                "cartan.nonnegative",
            ),
            (
                r#","decomposition":{"ordinary_labels":["a"],"brauer_labels":["x","y"],"matrix":[[1,0]]}"#,
                "decomposition.no_zero_column",
            ),
            (
                r#","decomposition":{"ordinary_labels":["a"],"brauer_labels":["x"],"matrix":[[-1]]}"#,
                "decomposition.nonnegative",
            ),
            (
                r#","decomposition":{"ordinary_labels":[],"brauer_labels":["x"],"matrix":[[1]]}"#,
                "decomposition.labels",
            ),
            (
                r#","cartan":{"exactness":"exact","matrix":[[1]]},"simple_dims":[1,2]"#,
                "simple_dims.length",
            ),
            (
                r#","cartan":{"exactness":"exact","matrix":[[1]]},"simple_dims":[0]"#,
                "simple_dims.positive",
            ),
        ];
        for (extra, invariant) in cases {
            let err = load_block_record(record_json(extra).as_bytes()).unwrap_err();
            match err {
                BlockError::Validation { invariant: got, .. } => {
                    assert_eq!(got, invariant, "{extra}")
                }
                other => panic!("{extra}: unexpected {other}"),
            }
        }
    }

    #[test]
    fn lower_bound_allows_zero_diagonal() {
        let json = record_json(r#","cartan":{"exactness":"lower_bound","matrix":[[0]]}"#);
        assert!(load_block_record(json.as_bytes()).is_ok());
    }

    #[test]
    fn defect_and_rank_bounds() {
        let json = record_json(r#","cartan":{"exactness":"exact","matrix":[[1]]}"#)
            .replace(r#""defect":1"#, r#""defect":2"#);
        assert!(matches!(
            load_block_record(json.as_bytes()).unwrap_err(),
            BlockError::Validation {
                invariant: "record.defect_bound",
                ..
            }
        ));
        let json = record_json(r#","cartan":{"exactness":"exact","matrix":[[1]]}"#)
            .replace(r#""p_rank":1"#, r#""p_rank":2"#);
        assert!(matches!(
            load_block_record(json.as_bytes()).unwrap_err(),
            BlockError::Validation {
                invariant: "record.p_rank_bound",
                ..
            }
        ));
        let json = record_json(r#","cartan":{"exactness":"exact","matrix":[[1]]}"#)
            .replace(r#""prime":3"#, r#""prime":4"#);
        assert!(load_block_record(json.as_bytes()).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let json = record_json(r#","cartan":{"exactness":"exact","matrix":[[1]]},"extra":1"#);
        assert!(matches!(
            load_block_record(json.as_bytes()).unwrap_err(),
            BlockError::Parse { .. }
        ));
    }

    #[test]
    fn huge_entries_survive_round_trip() {
        let json = record_json(
            r#","cartan":{"exactness":"exact","matrix":[[123456789012345678901234567890]]}"#,
        );
        let rec = load_block_record(json.as_bytes()).unwrap();
        assert_eq!(
            rec.cartan().matrix.get(0, 0).to_string(),
            "123456789012345678901234567890"
        );
        let again = load_block_record(rec.to_json().as_bytes()).unwrap();
        assert_eq!(again, rec);
    }
}

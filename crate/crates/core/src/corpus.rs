//! Bundled block records and dossiers, plus the harness that re-runs each
//! recorded check and compares it with the expected outcome.
//!
//! `manifest.json` lists the entries; paths inside it are relative to the
//! corpus directory. Entries run in parallel and are reported in manifest
//! order.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::p_valuation;
use crate::blockdata::{
    load_block_file, nonperiodicity_certificate, validate_block, BlockRecord, Exactness,
};
use crate::exactmat::IntMatrix;
use crate::kawata::{detect_patterns, exclude_by_lower_bounds};
use crate::verdict::{
    apply_rules, classify_simple_group, load_dossier_file, replay, RuleId, SimpleFactorRef,
    TraceStep, VerdictContext,
};

pub const CORPUS_DIR_ENV: &str = "RIMCHECK_CORPUS_DIR";

/// `$RIMCHECK_CORPUS_DIR` if set, else the corpus shipped with this crate.
pub fn default_corpus_dir() -> PathBuf {
    std::env::var_os(CORPUS_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// Values printed in the source text.
    PAPER,
    /// Produced by an external program before the build; names the program
    /// and the command.
    ORACLE(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `ᵀD·D` equals `params.matrix`.
    TransposeProduct,
    LowerBoundExclusion,
    /// No diagonal entry equals 2 (and hence no pattern).
    NoDiagonalTwo,
    NoPatterns,
    /// Every column of `D` has at least `params.min` positive entries.
    ColumnCountAtLeast,
    /// Every simple dimension carries a non-periodicity certificate.
    Nonperiodic,
    /// The Cartan matrix dominates `params.matrix` entrywise.
    Dominates,
    Verdict,
    Family,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<IntMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<usize>,
    /// Rules that must appear in a verdict trace.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rules: Option<Vec<RuleId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<SimpleFactorRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub check: CheckKind,
    pub outcome: String,
    pub citation: String,
    #[serde(default)]
    pub params: CheckParams,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dossier_file: Option<String>,
    pub expected: Vec<Expected>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub entries: Vec<CorpusEntry>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("invalid id pattern `{pattern}`: {message}")]
    Pattern { pattern: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub check: CheckKind,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
    pub citation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceStep>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryResult {
    pub id: String,
    pub outcome: Outcome,
    pub provenance: Provenance,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusReport {
    pub entries: Vec<EntryResult>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl CorpusReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.skipped == 0
    }
}

pub fn load_manifest(dir: &Path) -> Result<Manifest, CorpusError> {
    let path = dir.join("manifest.json");
    let bytes = std::fs::read(&path).map_err(|source| CorpusError::Io {
        path: path.clone(),
        source,
    })?;
    let de = &mut serde_json::Deserializer::from_slice(&bytes);
    let manifest: Manifest =
        serde_path_to_error::deserialize(de).map_err(|e| CorpusError::Manifest {
            path: path.clone(),
            message: format!("{}: {}", e.path(), e.inner()),
        })?;
    for e in &manifest.entries {
        if let Provenance::ORACLE(desc) = &e.provenance {
            if desc.trim().is_empty() {
                return Err(CorpusError::Manifest {
                    path,
                    message: format!("entry `{}`: ORACLE provenance must name its oracle", e.id),
                });
            }
        }
    }
    Ok(manifest)
}

/// Blocks and dossiers of the corpus, for verdict checks. Load failures are
/// kept and reported by the entries that need the context.
fn load_context(dir: &Path) -> Result<VerdictContext, String> {
    let mut ctx = VerdictContext::default();
    ctx.add_blocks_dir(&dir.join("blocks"))
        .map_err(|e| e.to_string())?;
    let dossiers = dir.join("dossiers");
    if dossiers.is_dir() {
        ctx.add_dossiers_dir(&dossiers).map_err(|e| e.to_string())?;
    }
    Ok(ctx)
}

/// Runs all entries whose id matches the glob `filter` (all when `None`).
pub fn verify_corpus(dir: &Path, filter: Option<&str>) -> Result<CorpusReport, CorpusError> {
    let manifest = load_manifest(dir)?;
    let pattern = filter
        .map(|f| {
            glob::Pattern::new(f).map_err(|e| CorpusError::Pattern {
                pattern: f.to_string(),
                message: e.to_string(),
            })
        })
        .transpose()?;
    let selected: Vec<&CorpusEntry> = manifest
        .entries
        .iter()
        .filter(|e| pattern.as_ref().is_none_or(|p| p.matches(&e.id)))
        .collect();
    let ctx = if selected.is_empty() {
        Ok(VerdictContext::default())
    } else {
        load_context(dir)
    };

    let entries: Vec<EntryResult> = selected
        .par_iter()
        .map(|e| run_entry(dir, e, &ctx))
        .collect();
    let count = |o| entries.iter().filter(|e| e.outcome == o).count();
    Ok(CorpusReport {
        passed: count(Outcome::Pass),
        failed: count(Outcome::Fail),
        skipped: count(Outcome::Skip),
        entries,
    })
}

fn skip(e: &CorpusEntry, reason: String) -> EntryResult {
    EntryResult {
        id: e.id.clone(),
        outcome: Outcome::Skip,
        provenance: e.provenance.clone(),
        checks: Vec::new(),
        reason: Some(reason),
    }
}

fn run_entry(dir: &Path, e: &CorpusEntry, ctx: &Result<VerdictContext, String>) -> EntryResult {
    let block = match &e.block_file {
        None => None,
        Some(rel) => {
            let path = dir.join(rel);
            if !path.is_file() {
                return skip(e, format!("missing data file {rel}"));
            }
            match load_block_file(&path) {
                Ok(b) => Some(b),
                Err(err) => {
                    return EntryResult {
                        reason: Some(err.to_string()),
                        outcome: Outcome::Fail,
                        ..skip(e, String::new())
                    }
                }
            }
        }
    };
    if let Some(rel) = &e.dossier_file {
        if !dir.join(rel).is_file() {
            return skip(e, format!("missing data file {rel}"));
        }
    }
    let checks: Vec<CheckResult> = e
        .expected
        .iter()
        .map(|x| run_check(dir, e, x, block.as_ref(), ctx))
        .collect();
    let outcome = if checks.iter().all(|c| c.passed) {
        Outcome::Pass
    } else {
        Outcome::Fail
    };
    EntryResult {
        id: e.id.clone(),
        outcome,
        provenance: e.provenance.clone(),
        checks,
        reason: None,
    }
}

struct Actual {
    value: String,
    detail: Option<String>,
    trace: Option<Vec<TraceStep>>,
}

impl Actual {
    fn new(value: impl Into<String>) -> Self {
        Self {
            value: value.into(),
            detail: None,
            trace: None,
        }
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

fn run_check(
    dir: &Path,
    e: &CorpusEntry,
    x: &Expected,
    block: Option<&BlockRecord>,
    ctx: &Result<VerdictContext, String>,
) -> CheckResult {
    let actual =
        evaluate(dir, e, x, block, ctx).unwrap_or_else(|err| Actual::new("error").detail(err));
    CheckResult {
        check: x.check,
        passed: actual.value == x.outcome,
        expected: x.outcome.clone(),
        actual: actual.value,
        citation: x.citation.clone(),
        detail: actual.detail,
        trace: actual.trace,
    }
}

fn matrix_diff(expected: &IntMatrix, got: &IntMatrix) -> String {
    if expected.rows() != got.rows() || expected.cols() != got.cols() {
        return format!(
            "shape {}x{} expected, got {}x{}",
            expected.rows(),
            expected.cols(),
            got.rows(),
            got.cols()
        );
    }
    let mut diffs = Vec::new();
    for i in 0..got.rows() {
        for j in 0..got.cols() {
            if expected.get(i, j) != got.get(i, j) {
                diffs.push(format!(
                    "({},{}): expected {}, got {}",
                    i + 1,
                    j + 1,
                    expected.get(i, j),
                    got.get(i, j)
                ));
            }
        }
    }
    diffs.join("; ")
}

fn evaluate(
    dir: &Path,
    e: &CorpusEntry,
    x: &Expected,
    block: Option<&BlockRecord>,
    ctx: &Result<VerdictContext, String>,
) -> Result<Actual, String> {
    let need_block = || block.ok_or_else(|| "check needs a block_file".to_string());
    let need_matrix = || {
        x.params
            .matrix
            .as_ref()
            .ok_or_else(|| "check needs params.matrix".to_string())
    };
    Ok(match x.check {
        CheckKind::TransposeProduct => {
            let b = need_block()?;
            let d = b
                .decomposition
                .as_ref()
                .ok_or("block has no decomposition matrix")?;
            let want = need_matrix()?;
            let got = d.cartan();
            if &got == want {
                Actual::new("equal")
            } else {
                Actual::new("differs").detail(matrix_diff(want, &got))
            }
        }
        CheckKind::LowerBoundExclusion => {
            let c = need_block()?.cartan();
            let mut lb = c.clone();
            lb.exactness = Exactness::LowerBound;
            match exclude_by_lower_bounds(&lb).map_err(|err| err.to_string())? {
                crate::kawata::ExclusionResult::Excluded => Actual::new("excluded"),
                crate::kawata::ExclusionResult::NotExcluded { witness } => {
                    Actual::new("not_excluded").detail(format!("witness {witness:?}"))
                }
            }
        }
        CheckKind::NoDiagonalTwo => {
            let b = need_block()?;
            let c = b.cartan();
            if c.exactness != Exactness::Exact {
                return Err("needs an exact Cartan matrix".into());
            }
            let twos = validate_block(b).diagonal_two;
            let patterns = detect_patterns(c).map_err(|err| err.to_string())?;
            if twos.is_empty() && patterns.is_empty() {
                Actual::new("none")
            } else {
                Actual::new("present").detail(format!(
                    "diagonal 2 at {twos:?} (0-based), {} patterns",
                    patterns.len()
                ))
            }
        }
        CheckKind::NoPatterns => {
            let c = need_block()?.cartan();
            let patterns = detect_patterns(c).map_err(|err| err.to_string())?;
            if patterns.is_empty() {
                Actual::new("empty")
            } else {
                Actual::new(format!("{} patterns", patterns.len())).detail(format!("{patterns:?}"))
            }
        }
        CheckKind::ColumnCountAtLeast => {
            let b = need_block()?;
            let min = x.params.min.ok_or("check needs params.min")?;
            let report = validate_block(b);
            let counts = report
                .nonzero_counts()
                .ok_or("block has no decomposition matrix")?;
            let diag_min = b.cartan().matrix.diagonal().min().cloned();
            let detail = format!("column counts {counts:?}, smallest Cartan diagonal {diag_min:?}");
            if counts.iter().all(|&n| n >= min) {
                Actual::new("holds").detail(detail)
            } else {
                Actual::new("fails").detail(detail)
            }
        }
        CheckKind::Nonperiodic => {
            let b = need_block()?;
            let dims = b.simple_dims.as_ref().ok_or("block has no simple_dims")?;
            let bad: Vec<u64> = dims
                .iter()
                .copied()
                .filter(|&d| !nonperiodicity_certificate(d, b.prime, b.p_rank))
                .collect();
            let vals: Vec<u32> = dims.iter().map(|&d| p_valuation(d, b.prime)).collect();
            if bad.is_empty() {
                Actual::new("all_certified")
                    .detail(format!("valuations {vals:?}, p_rank {}", b.p_rank))
            } else {
                Actual::new("not_all_certified").detail(format!("uncertified dims {bad:?}"))
            }
        }
        CheckKind::Dominates => {
            let c = need_block()?.cartan();
            let want = need_matrix()?;
            match c.matrix.dominates(want) {
                Some(true) => Actual::new("dominates"),
                Some(false) => Actual::new("does_not_dominate"),
                None => Actual::new("shape_mismatch"),
            }
        }
        CheckKind::Verdict => {
            let ctx = ctx.as_ref().map_err(Clone::clone)?;
            let rel = e
                .dossier_file
                .as_ref()
                .ok_or("check needs a dossier_file")?;
            let d = load_dossier_file(&dir.join(rel)).map_err(|err| err.to_string())?;
            let v = apply_rules(&d, ctx).map_err(|err| err.to_string())?;
            replay(&v, &d, ctx).map_err(|err| format!("replay failed: {err}"))?;
            let missing: Vec<RuleId> = x
                .params
                .rules
                .iter()
                .flatten()
                .copied()
                .filter(|r| !v.trace.iter().any(|s| s.rule_id == *r))
                .collect();
            let mut a = if missing.is_empty() {
                Actual::new(v.status.to_string())
            } else {
                Actual::new(format!("{} without {missing:?}", v.status))
            };
            a.trace = Some(v.trace);
            a
        }
        CheckKind::Family => {
            let r = x
                .params
                .family
                .as_ref()
                .ok_or("check needs params.family")?;
            match classify_simple_group(r) {
                Ok(tag) => Actual::new(format!("case {}", tag.case.roman())).detail(tag.condition),
                Err(err) => Actual::new("not_in_family").detail(err.to_string()),
            }
        }
    })
}

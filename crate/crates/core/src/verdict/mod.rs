//! Rule engine deciding whether every simple module of a (principal) block
//! lies at the end of its stable AR component.
//!
//! Inputs are [`GroupDossier`]s: structural facts about a group, each one
//! either asserted or absent. Absent facts are unknown; no rule ever fires on
//! a default. Every derivation is recorded as a [`TraceStep`] carrying the
//! rule's citation, and [`replay`] re-checks a trace against its inputs.

mod catalog;
mod engine;
mod family;
mod render;
mod replay;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blockdata::{load_block_file, BlockError, BlockRecord};

pub use catalog::{citation, message, Citation};
pub use engine::{apply_rules, apply_rules_to_block};
pub use family::{
    classify_simple_group, Family, FamilyCase, FamilyError, FamilyParams, FamilyTag,
    SimpleFactorRef,
};
pub use render::render_verdict;
pub use replay::{replay, ReplayError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R12,
    R13,
}

impl RuleId {
    /// Catalog order, which is also firing order.
    pub const ALL: [RuleId; 13] = [
        Self::R1,
        Self::R2,
        Self::R3,
        Self::R4,
        Self::R5,
        Self::R6,
        Self::R7,
        Self::R8,
        Self::R9,
        Self::R10,
        Self::R11,
        Self::R12,
        Self::R13,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::R1 => "R1",
            Self::R2 => "R2",
            Self::R3 => "R3",
            Self::R4 => "R4",
            Self::R5 => "R5",
            Self::R6 => "R6",
            Self::R7 => "R7",
            Self::R8 => "R8",
            Self::R9 => "R9",
            Self::R10 => "R10",
            Self::R11 => "R11",
            Self::R12 => "R12",
            Self::R13 => "R13",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.as_str() == s)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for RuleId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for RuleId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown rule id `{s}`")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SylowFacts {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abelian: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cyclic: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_rank: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Predicates {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_solvable: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub has_nontrivial_normal_p_subgroup: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perfect_lie_type_defining_char: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_defect: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric_alternating_or_cover: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect_divisible_by_p_cubed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub o_p_prime_trivial: Option<bool>,
}

/// `O^{p'}(G) = Q × H_1 × … × H_m` for `G` with `O_{p'}(G) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpPrimeDecomposition {
    pub q_part_nontrivial: bool,
    pub simple_factors: Vec<SimpleFactorRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalChainLink {
    /// Dossier name of the normal subgroup `N`.
    pub subgroup_name: String,
    pub quotient_solvable_p_prime: bool,
    pub same_block_idempotent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquivalenceKind {
    Morita,
    Puig,
}

/// Trusted input: the equivalence is asserted with a citation, not checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Equivalence {
    /// Dossier name of the other side.
    pub target: String,
    pub kind: EquivalenceKind,
    pub citation: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDossier {
    pub name: String,
    pub prime: u64,
    #[serde(default)]
    pub sylow: SylowFacts,
    #[serde(default)]
    pub predicates: Predicates,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub o_pprime_decomposition: Option<OpPrimeDecomposition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal_chain: Option<Vec<NormalChainLink>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_refs: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wild: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub equivalences: Vec<Equivalence>,
    /// Dossier name of `G/O_{p'}(G)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub o_p_prime_quotient: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodic_simple_claimed: Option<bool>,
    /// The dossier concerns a non-principal block; rules stated for
    /// principal blocks are switched off.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub non_principal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl GroupDossier {
    pub fn new(name: impl Into<String>, prime: u64) -> Self {
        Self {
            name: name.into(),
            prime,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<(), VerdictError> {
        let bad = |detail: String| VerdictError::Malformed {
            dossier: self.name.clone(),
            detail,
        };
        if self.name.is_empty() {
            return Err(bad("empty name".into()));
        }
        if !crate::arith::is_prime(self.prime) {
            return Err(bad(format!("prime = {} is not a prime", self.prime)));
        }
        if self.o_pprime_decomposition.is_some() && self.predicates.o_p_prime_trivial != Some(true)
        {
            return Err(bad(
                "o_pprime_decomposition requires predicates.o_p_prime_trivial = true".into(),
            ));
        }
        if self.sylow.cyclic == Some(true) && self.sylow.p_rank.is_some_and(|r| r >= 2) {
            return Err(bad("cyclic Sylow subgroup with p_rank >= 2".into()));
        }
        Ok(())
    }

    pub fn is_principal(&self) -> bool {
        !self.non_principal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    AllAtEnd,
    NotAllAtEnd,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::AllAtEnd => "AllAtEnd",
            Self::NotAllAtEnd => "NotAllAtEnd",
            Self::Unknown => "Unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conclusion {
    AllAtEnd,
    NotAllAtEnd,
    Advisory,
}

impl Conclusion {
    pub fn status(self) -> Option<Status> {
        match self {
            Self::AllAtEnd => Some(Status::AllAtEnd),
            Self::NotAllAtEnd => Some(Status::NotAllAtEnd),
            Self::Advisory => None,
        }
    }
}

impl From<Status> for Conclusion {
    fn from(s: Status) -> Self {
        match s {
            Status::AllAtEnd => Self::AllAtEnd,
            Status::NotAllAtEnd => Self::NotAllAtEnd,
            Status::Unknown => Self::Advisory,
        }
    }
}

/// One rule firing. `inputs["subject"]` names the dossier or block the step
/// concludes about; the other inputs are the facts the rule read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule_id: RuleId,
    pub citation: String,
    pub inputs: BTreeMap<String, String>,
    pub conclusion: Conclusion,
}

impl TraceStep {
    pub fn subject(&self) -> &str {
        self.inputs.get("subject").map_or("", String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub subject: String,
    pub status: Status,
    /// Derivation steps in firing order, including those for referenced
    /// dossiers and blocks.
    pub trace: Vec<TraceStep>,
    /// Notes that never decide a status: candidate patterns with `n >= 3`,
    /// unresolved references, inconsistency flags.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub advisories: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerdictError {
    #[error("conflicting derivations for {subject}: both AllAtEnd and NotAllAtEnd are derivable")]
    ConflictingDerivations {
        subject: String,
        all_at_end: Vec<TraceStep>,
        not_all_at_end: Vec<TraceStep>,
    },
    #[error("malformed dossier {dossier}: {detail}")]
    Malformed { dossier: String, detail: String },
    #[error("no dossier named {0}")]
    UnknownDossier(String),
}

/// Everything the engine may consult. Blocks are keyed by file stem,
/// dossiers by their `name`.
#[derive(Debug, Clone, Default)]
pub struct VerdictContext {
    pub blocks: BTreeMap<String, BlockRecord>,
    pub dossiers: BTreeMap<String, GroupDossier>,
    /// Treat every dossier as concerning a non-principal block.
    pub force_non_principal: bool,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error("{path}: {message}")]
    Dossier { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("duplicate {kind} `{name}` ({path})")]
    Duplicate {
        kind: &'static str,
        name: String,
        path: PathBuf,
    },
}

pub fn load_dossier(bytes: &[u8]) -> Result<GroupDossier, String> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let dossier: GroupDossier = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            e.into_inner().to_string()
        } else {
            format!("{path}: {}", e.into_inner())
        }
    })?;
    dossier.check().map_err(|e| e.to_string())?;
    Ok(dossier)
}

pub fn load_dossier_file(path: &Path) -> Result<GroupDossier, LoadError> {
    let bytes = std::fs::read(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_dossier(&bytes).map_err(|message| LoadError::Dossier {
        path: path.to_path_buf(),
        message,
    })
}

fn sorted_entries(dir: &Path, suffix: &str) -> Result<Vec<PathBuf>, LoadError> {
    let read = std::fs::read_dir(dir).map_err(|source| LoadError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for entry in read {
        let entry = entry.map_err(|source| LoadError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = entry.path();
        if path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.ends_with(suffix))
        {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Block id of a `*.block.json` path: the file name without that suffix.
pub fn block_id(path: &Path) -> Option<&str> {
    path.file_name()?.to_str()?.strip_suffix(".block.json")
}

impl VerdictContext {
    pub fn add_blocks_dir(&mut self, dir: &Path) -> Result<(), LoadError> {
        for path in sorted_entries(dir, ".block.json")? {
            let id = block_id(&path).expect("filtered by suffix").to_string();
            let record = load_block_file(&path)?;
            if self.blocks.insert(id.clone(), record).is_some() {
                return Err(LoadError::Duplicate {
                    kind: "block",
                    name: id,
                    path,
                });
            }
        }
        Ok(())
    }

    pub fn add_dossiers_dir(&mut self, dir: &Path) -> Result<(), LoadError> {
        for path in sorted_entries(dir, ".dossier.json")? {
            let d = load_dossier_file(&path)?;
            self.add_dossier(d, &path)?;
        }
        Ok(())
    }

    pub fn add_dossier(&mut self, d: GroupDossier, path: &Path) -> Result<(), LoadError> {
        if self.dossiers.contains_key(&d.name) {
            return Err(LoadError::Duplicate {
                kind: "dossier",
                name: d.name,
                path: path.to_path_buf(),
            });
        }
        self.dossiers.insert(d.name.clone(), d);
        Ok(())
    }
}

//! Membership tests for the families of non-abelian simple groups with
//! non-cyclic abelian Sylow 3-subgroups.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::prime_power;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[allow(non_camel_case_types)]
pub enum Family {
    A7,
    A8,
    M11,
    M22,
    M23,
    HS,
    ON,
    PSL3,
    PSU3,
    PSp4_qminus,
    PSp4_qplus,
    PSL4,
    PSU4,
    PSL5,
    PSU5,
    PSL2_3n,
    Other,
}

impl Family {
    pub fn parse(name: &str) -> Option<Self> {
        serde_json::from_value(serde_json::Value::String(name.to_string())).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimpleFactorRef {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<FamilyParams>,
    /// Block id or dossier name carrying this factor's verdict.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict_ref: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyCase {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
    IX,
    X,
}

impl FamilyCase {
    pub fn roman(self) -> &'static str {
        match self {
            Self::I => "i",
            Self::II => "ii",
            Self::III => "iii",
            Self::IV => "iv",
            Self::V => "v",
            Self::VI => "vi",
            Self::VII => "vii",
            Self::VIII => "viii",
            Self::IX => "ix",
            Self::X => "x",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyTag {
    pub case: FamilyCase,
    /// The side condition that was checked, with the parameter substituted.
    pub condition: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("{family:?} is not in family ({case}): {condition} fails")]
    NotInFamily {
        family: Family,
        case: &'static str,
        condition: String,
    },
    #[error("{0:?} is not one of the listed families")]
    Unlisted(Family),
    #[error("{family:?} needs parameter `{param}`")]
    MissingParam { family: Family, param: &'static str },
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u64),
}

fn exactly_3_divides(x: u64) -> bool {
    x.is_multiple_of(3) && !x.is_multiple_of(9)
}

pub fn classify_simple_group(r: &SimpleFactorRef) -> Result<FamilyTag, FamilyError> {
    use Family::*;
    let family = r.family;
    let params = r.params.unwrap_or_default();
    let need_q = || {
        params
            .q
            .ok_or(FamilyError::MissingParam { family, param: "q" })
    };

    let (case, holds, condition, q) = match family {
        A7 | A8 | M11 | M22 | M23 | HS | ON => {
            return Ok(FamilyTag {
                case: FamilyCase::I,
                condition: "sporadic or alternating member".into(),
            })
        }
        PSL2_3n => {
            let n = params
                .n
                .ok_or(FamilyError::MissingParam { family, param: "n" })?;
            let holds = n >= 2;
            let condition = format!("n >= 2 (n = {n})");
            if !holds {
                return Err(FamilyError::NotInFamily {
                    family,
                    case: "x",
                    condition,
                });
            }
            return Ok(FamilyTag {
                case: FamilyCase::X,
                condition,
            });
        }
        PSL3 => {
            let q = need_q()?;
            let x = q.wrapping_sub(1);
            (
                FamilyCase::II,
                q >= 1 && exactly_3_divides(x),
                format!("3||(q-1) with q-1 = {x}"),
                q,
            )
        }
        PSU3 => {
            let q = need_q()?;
            (
                FamilyCase::III,
                exactly_3_divides(q + 1),
                format!("3||(q+1) with q+1 = {}", q + 1),
                q,
            )
        }
        PSp4_qminus => {
            let q = need_q()?;
            (
                FamilyCase::IV,
                q >= 1 && (q - 1) % 3 == 0,
                format!("3|(q-1) with q = {q}"),
                q,
            )
        }
        PSp4_qplus => {
            let q = need_q()?;
            (
                FamilyCase::V,
                q > 2 && (q + 1) % 3 == 0,
                format!("q>2 and 3|(q+1) with q = {q}"),
                q,
            )
        }
        PSL4 => {
            let q = need_q()?;
            (
                FamilyCase::VI,
                q > 2 && (q + 1) % 3 == 0,
                format!("q>2 and 3|(q+1) with q = {q}"),
                q,
            )
        }
        PSU4 => {
            let q = need_q()?;
            (
                FamilyCase::VII,
                q >= 1 && (q - 1) % 3 == 0,
                format!("3|(q-1) with q = {q}"),
                q,
            )
        }
        PSL5 => {
            let q = need_q()?;
            (
                FamilyCase::VIII,
                (q + 1) % 3 == 0,
                format!("3|(q+1) with q = {q}"),
                q,
            )
        }
        PSU5 => {
            let q = need_q()?;
            (
                FamilyCase::IX,
                q >= 1 && (q - 1) % 3 == 0,
                format!("3|(q-1) with q = {q}"),
                q,
            )
        }
        Other => return Err(FamilyError::Unlisted(family)),
    };
    if !holds {
        return Err(FamilyError::NotInFamily {
            family,
            case: case.roman(),
            condition,
        });
    }
    if prime_power(q).is_none() {
        return Err(FamilyError::NotPrimePower(q));
    }
    Ok(FamilyTag { case, condition })
}

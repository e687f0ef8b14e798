//! JSON form of [`IntMatrix`]: a list of rows of integer literals.
//!
//! Entries go through `serde_json::Number` with arbitrary precision, so
//! integers of any size survive a round trip. Non-integral numbers are
//! rejected.

use std::str::FromStr;

use num_bigint::BigInt;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::Number;

use crate::exactmat::IntMatrix;

/// For `#[serde(serialize_with)]` on single `BigInt` fields.
pub(crate) fn serialize_bigint<S: Serializer>(
    value: &BigInt,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    Number::from_str(&value.to_string())
        .map_err(serde::ser::Error::custom)?
        .serialize(serializer)
}

struct Row<'a>(&'a [BigInt]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for e in self.0 {
            let n = Number::from_str(&e.to_string()).map_err(serde::ser::Error::custom)?;
            seq.serialize_element(&n)?;
        }
        seq.end()
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows()))?;
        for row in self.row_iter() {
            seq.serialize_element(&Row(row))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<Number>> = Vec::deserialize(deserializer)?;
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            let mut r = Vec::with_capacity(row.len());
            for n in row {
                let text = n.to_string();
                let value = BigInt::from_str(&text).map_err(|_| {
                    de::Error::invalid_value(de::Unexpected::Other(&text), &"an integer")
                })?;
                r.push(value);
            }
            out.push(r);
        }
        IntMatrix::from_rows(out).map_err(de::Error::custom)
    }
}

//! Rule and message texts, kept in `data/citations.json` and compiled in.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;

use super::RuleId;

#[derive(Debug, Clone, Deserialize)]
pub struct Citation {
    pub name: String,
    pub label: String,
    pub anchor: String,
    pub source: Option<String>,
}

impl Citation {
    /// `label: anchor`, the form carried by trace steps.
    pub fn render(&self) -> String {
        format!("{}: {}", self.label, self.anchor)
    }
}

#[derive(Debug, Deserialize)]
struct Catalog {
    rules: BTreeMap<String, Citation>,
    messages: BTreeMap<String, String>,
}

fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| {
        serde_json::from_str(include_str!("../../data/citations.json"))
            .expect("bundled citation catalog is valid JSON")
    })
}

pub fn citation(rule: RuleId) -> &'static Citation {
    &catalog().rules[rule.as_str()]
}

/// Fixed message texts used by reports; panics on an unknown key.
pub fn message(key: &str) -> &'static str {
    catalog()
        .messages
        .get(key)
        .unwrap_or_else(|| panic!("no catalog message `{key}`"))
}

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::constraints::SplittingType;

const SOURCE: &str = include_str!("../../resources/nonexistence.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Nonexistence is asserted for this tuple.
    Stated,
    /// The tuple is solved for but left out of the case's bundle list.
    Inferred,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KbEntry {
    pub id: String,
    #[serde(rename = "type")]
    pub splitting_type: String,
    pub display: Vec<i64>,
    pub basis: Basis,
}

#[derive(Debug, Deserialize)]
pub struct Nonexistence {
    pub version: u32,
    pub n: u32,
    pub entries: Vec<KbEntry>,
}

pub fn nonexistence() -> &'static Nonexistence {
    static KB: OnceLock<Nonexistence> = OnceLock::new();
    KB.get_or_init(|| serde_json::from_str(SOURCE).expect("bundled nonexistence table parses"))
}

pub fn lookup(st: &SplittingType, n: u32, display: &[i64]) -> Option<&'static KbEntry> {
    let kb = nonexistence();
    if kb.n != n {
        return None;
    }
    let key = st.normalized().to_string();
    kb.entries.iter().find(|e| e.splitting_type == key && e.display == display)
}

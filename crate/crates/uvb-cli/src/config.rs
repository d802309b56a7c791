use std::fs;
use std::path::Path;

use serde::Deserialize;

use uvb_core::solver::{SolverConfig, Strategy};

/// Solver presets read from a TOML file, e.g.
///
/// ```toml
/// bound = 120
/// strategy = "dfs"
/// max_solutions = 5000
/// parallel = false
/// ```
///
/// Every key is optional. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub bound: Option<i64>,
    pub strategy: Option<Strategy>,
    pub max_solutions: Option<usize>,
    pub parallel: Option<bool>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<FileConfig, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<FileConfig, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn apply(&self, cfg: &mut SolverConfig) {
        if let Some(b) = self.bound {
            cfg.bound = b;
        }
        if let Some(s) = self.strategy {
            cfg.strategy = s;
        }
        if let Some(m) = self.max_solutions {
            cfg.max_solutions = m;
        }
        if let Some(p) = self.parallel {
            cfg.parallel = p;
        }
    }
}

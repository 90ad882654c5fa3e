//! JSON encoding of a base system.
//!
//! ```json
//! {"n": 2, "target_alphabet": [2, 3], "source_alphabets": [[1, 2, 3], [1, 2, 3]],
//!  "pmf": [{"x": [1, 2], "t": 2, "p": 0.25}]}
//! ```

use std::collections::HashSet;

use ftpid_core::{JointSystem, Outcome, Symbol};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub n: usize,
    pub target_alphabet: Vec<Symbol>,
    pub source_alphabets: Vec<Vec<Symbol>>,
    pub pmf: Vec<PmfEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmfEntry {
    pub x: Vec<Symbol>,
    pub t: Symbol,
    pub p: f64,
}

impl SystemFile {
    pub fn from_system(system: &JointSystem) -> Self {
        Self {
            n: system.n(),
            target_alphabet: system.target_alphabet().to_vec(),
            source_alphabets: system.source_alphabets().to_vec(),
            pmf: system
                .support()
                .iter()
                .map(|o| PmfEntry {
                    x: o.x.clone(),
                    t: o.t,
                    p: o.p,
                })
                .collect(),
        }
    }

    /// Structural checks with field paths, then the library's own
    /// validation.
    pub fn to_system(&self) -> Result<JointSystem, CliError> {
        if self.source_alphabets.len() != self.n {
            return Err(CliError::Input(format!(
                "source_alphabets: {} alphabets for n = {}",
                self.source_alphabets.len(),
                self.n
            )));
        }
        let mut seen = HashSet::new();
        for (i, e) in self.pmf.iter().enumerate() {
            if e.x.len() != self.n {
                return Err(CliError::Input(format!(
                    "pmf[{i}].x: {} symbols for n = {}",
                    e.x.len(),
                    self.n
                )));
            }
            if !seen.insert((&e.x, e.t)) {
                return Err(CliError::Input(format!(
                    "pmf[{i}]: duplicate entry for x = {:?}, t = {}",
                    e.x, e.t
                )));
            }
        }
        let outcomes = self
            .pmf
            .iter()
            .map(|e| Outcome::new(e.x.clone(), e.t, e.p))
            .collect();
        JointSystem::new(self.target_alphabet.clone(), self.source_alphabets.clone(), outcomes)
            .map_err(|e| CliError::Input(format!("pmf: {e}")))
    }
}

pub fn parse_system(text: &str) -> Result<JointSystem, CliError> {
    let file: SystemFile = serde_json::from_str(text).map_err(|e| {
        CliError::Input(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    file.to_system()
}

pub fn write_system(system: &JointSystem) -> String {
    serde_json::to_string_pretty(&SystemFile::from_system(system)).expect("plain data serializes")
}

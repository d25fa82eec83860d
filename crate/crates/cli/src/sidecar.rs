//! Per-rule hit counts saved next to an extraction output.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use causex::{Label, RuleSet, RunSummary};
use serde::{Deserialize, Serialize};

pub const SUFFIX: &str = ".coverage.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleCount {
    pub id: String,
    pub label: Label,
    pub count: u64,
}

/// Contents of `<output>.coverage.json`. Rules are listed in priority order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub summary: RunSummary,
    pub rules: Vec<RuleCount>,
}

impl Coverage {
    pub fn from_run(rules: &RuleSet, summary: RunSummary) -> Self {
        Coverage {
            summary,
            rules: rules
                .counts()
                .into_iter()
                .map(|(id, label, count)| RuleCount { id, label, count })
                .collect(),
        }
    }

    pub fn counts(&self) -> Vec<(String, Label, u64)> {
        self.rules
            .iter()
            .map(|r| (r.id.clone(), r.label, r.count))
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json + "\n")
            .with_context(|| format!("cannot write coverage file {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| {
            format!(
                "no coverage file at {}; run `causex extract` first",
                path.display()
            )
        })?;
        serde_json::from_str(&text)
            .with_context(|| format!("malformed coverage file {}", path.display()))
    }

    /// Adds another run's counts. Rules unseen so far are appended in the
    /// order the other run lists them.
    pub fn merge(&mut self, other: Coverage) -> Result<()> {
        self.summary.sentences += other.summary.sentences;
        self.summary.triggers += other.summary.triggers;
        self.summary.triplets += other.summary.triplets;
        for r in other.rules {
            match self.rules.iter_mut().find(|x| x.id == r.id) {
                Some(x) if x.label != r.label => {
                    bail!(
                        "rule {} is {} in one run and {} in another",
                        r.id,
                        x.label,
                        r.label
                    )
                }
                Some(x) => x.count += r.count,
                None => self.rules.push(r),
            }
        }
        Ok(())
    }
}

/// Sidecar path for an extraction output; a path that already names a
/// sidecar is returned unchanged.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let s = output.as_os_str().to_string_lossy();
    if s.ends_with(SUFFIX) {
        output.to_path_buf()
    } else {
        PathBuf::from(format!("{s}{SUFFIX}"))
    }
}

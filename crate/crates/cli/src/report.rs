use serde::{Deserialize, Serialize};

use bisym_core::extract::{ConsistencyReport, GapReport, ReconstructionReport};
use bisym_core::verify::{Aczel3Profile, NeutralSearch, PropertyReport, Refutation};
use bisym_core::ToleranceConfig;

/// Everything one invocation produced. Field order is the key order of the
/// JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub command: Vec<String>,
    pub config: ToleranceConfig,
    pub results: Vec<ResultEntry>,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResultEntry {
    Property(PropertyReport),
    Neutral(NeutralSearch),
    Consistency(ConsistencyReport),
    Gap(GapReport),
    Reconstruction(ReconstructionReport),
    Refutation { refutation: Refutation, reproduced: bool },
    Profile(Aczel3Profile),
    Catalog { entries: Vec<CatalogItem> },
}

impl ResultEntry {
    /// `Some(false)` for a check that failed, `None` for pure evidence.
    /// Reconstruction passes when its sup error is within `cfg.eq_tol`.
    pub fn passed(&self, cfg: &ToleranceConfig) -> Option<bool> {
        match self {
            ResultEntry::Property(r) => Some(r.passed),
            ResultEntry::Neutral(n) => Some(n.report.passed),
            ResultEntry::Consistency(c) => Some(c.passed),
            ResultEntry::Gap(g) => Some(!g.jump_detected),
            ResultEntry::Refutation { reproduced, .. } => Some(*reproduced),
            ResultEntry::Reconstruction(r) => Some(r.sup_error <= cfg.eq_tol),
            ResultEntry::Profile(_) | ResultEntry::Catalog { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogItem {
    pub name: String,
    pub params: String,
    pub summary: String,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports contain only finite numbers");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

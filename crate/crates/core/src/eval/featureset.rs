//! The seven feature-set groupings compared in the evaluation grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{LINEAR_FEATURES, NONLINEAR_STEMS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Block {
    Linear,
    Nonlinear,
    Pli,
}

/// Block of a feature name, from its `<feature>@<channel>` stem or `pli:` prefix.
pub fn block_of(name: &str) -> Option<Block> {
    if name.starts_with("pli:") {
        return Some(Block::Pli);
    }
    let stem = name.split_once('@')?.0;
    if LINEAR_FEATURES.contains(&stem) {
        Some(Block::Linear)
    } else if NONLINEAR_STEMS.contains(&stem) || stem.starts_with("renyi_q") {
        Some(Block::Nonlinear)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureSetTag {
    #[serde(rename = "L")]
    L,
    #[serde(rename = "NL")]
    Nl,
    #[serde(rename = "L+NL")]
    LNl,
    #[serde(rename = "PLI")]
    Pli,
    #[serde(rename = "L+PLI")]
    LPli,
    #[serde(rename = "NL+PLI")]
    NlPli,
    #[serde(rename = "All")]
    All,
}

impl FeatureSetTag {
    pub const ALL: [FeatureSetTag; 7] = [
        FeatureSetTag::L,
        FeatureSetTag::Nl,
        FeatureSetTag::LNl,
        FeatureSetTag::Pli,
        FeatureSetTag::LPli,
        FeatureSetTag::NlPli,
        FeatureSetTag::All,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureSetTag::L => "L",
            FeatureSetTag::Nl => "NL",
            FeatureSetTag::LNl => "L+NL",
            FeatureSetTag::Pli => "PLI",
            FeatureSetTag::LPli => "L+PLI",
            FeatureSetTag::NlPli => "NL+PLI",
            FeatureSetTag::All => "All",
        }
    }

    pub fn blocks(self) -> &'static [Block] {
        use Block::*;
        match self {
            FeatureSetTag::L => &[Linear],
            FeatureSetTag::Nl => &[Nonlinear],
            FeatureSetTag::LNl => &[Linear, Nonlinear],
            FeatureSetTag::Pli => &[Pli],
            FeatureSetTag::LPli => &[Linear, Pli],
            FeatureSetTag::NlPli => &[Nonlinear, Pli],
            FeatureSetTag::All => &[Linear, Nonlinear, Pli],
        }
    }

    pub fn has_pli(self) -> bool {
        self.blocks().contains(&Block::Pli)
    }

    /// Columns of `names` in this set, in table order.
    pub fn resolve(self, names: &[String]) -> Result<FeatureSetSpec> {
        let blocks = self.blocks();
        let columns: Vec<String> = names
            .iter()
            .filter(|n| block_of(n).is_some_and(|b| blocks.contains(&b)))
            .cloned()
            .collect();
        if columns.is_empty() {
            return Err(Error::Schema(format!(
                "feature set {} has no columns in this table",
                self.as_str()
            )));
        }
        Ok(FeatureSetSpec { tag: self, columns })
    }
}

impl std::fmt::Display for FeatureSetTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FeatureSetTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureSetTag::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown feature set {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSetSpec {
    pub tag: FeatureSetTag,
    pub columns: Vec<String>,
}

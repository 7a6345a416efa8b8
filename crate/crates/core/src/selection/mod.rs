//! Feature selection: CFS with greedy stepwise search, information-gain
//! ranking and ReliefF, over MDL-discretized or range-normalized features.

pub mod cfs;
pub mod discretize;
pub mod info;
pub mod infogain;
pub mod relieff;

pub use cfs::{cfs_greedy_stepwise, cfs_greedy_trace, cfs_merit, SuCache};
pub use discretize::mdl_discretize;
pub use info::{cond_entropy, entropy, info_gain, symmetrical_uncertainty};
pub use infogain::{info_gain_rank, info_gain_scores};
pub use relieff::{relieff_rank, relieff_weights};

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::Label;
use crate::signal::FeatureMatrix;

pub const DEFAULT_TOP_N: usize = 18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorKind {
    None,
    Cfs,
    InfoGain,
    Relieff,
}

impl SelectorKind {
    pub const ALL: [SelectorKind; 4] = [
        SelectorKind::None,
        SelectorKind::Cfs,
        SelectorKind::InfoGain,
        SelectorKind::Relieff,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SelectorKind::None => "none",
            SelectorKind::Cfs => "cfs",
            SelectorKind::InfoGain => "info_gain",
            SelectorKind::Relieff => "relieff",
        }
    }
}

impl std::fmt::Display for SelectorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionScope {
    /// Selector sees only the training fold.
    #[default]
    Fold,
    /// Selector runs once on every row before cross-validation.
    Global,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectorConfig {
    pub method: SelectorKind,
    /// Cut-off for the rankers; CFS chooses its own subset size.
    pub n: usize,
    pub scope: SelectionScope,
    pub relieff_k: usize,
    /// Sampled instances; `None` uses every row once.
    pub relieff_m: Option<usize>,
    pub seed: u64,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        SelectorConfig {
            method: SelectorKind::Relieff,
            n: DEFAULT_TOP_N,
            scope: SelectionScope::Fold,
            relieff_k: relieff::DEFAULT_K,
            relieff_m: None,
            seed: 1,
        }
    }
}

impl SelectorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 && matches!(self.method, SelectorKind::InfoGain | SelectorKind::Relieff) {
            return Err(Error::Config("selector n must be at least 1".into()));
        }
        if self.relieff_k == 0 {
            return Err(Error::Config("relieff_k must be at least 1".into()));
        }
        if self.relieff_m == Some(0) {
            return Err(Error::Config("relieff_m must be at least 1".into()));
        }
        Ok(())
    }
}

/// Rows, binary labels and unique feature names viewed together.
#[derive(Debug, Clone, Copy)]
pub struct LabeledTable<'a> {
    pub values: ArrayView2<'a, f64>,
    pub labels: &'a [Label],
    pub names: &'a [String],
}

impl<'a> LabeledTable<'a> {
    pub fn new(values: ArrayView2<'a, f64>, labels: &'a [Label], names: &'a [String]) -> Result<Self> {
        if values.nrows() != labels.len() {
            return Err(Error::LengthMismatch {
                left: values.nrows(),
                right: labels.len(),
            });
        }
        if values.ncols() != names.len() {
            return Err(Error::ArityMismatch {
                expected: names.len(),
                got: values.ncols(),
            });
        }
        Ok(LabeledTable { values, labels, names })
    }

    pub fn from_matrix(m: &'a FeatureMatrix) -> Self {
        LabeledTable {
            values: m.values.view(),
            labels: &m.labels,
            names: &m.names,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }

    pub fn class_codes(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.as_index()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.column(j).to_vec()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub name: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub method: SelectorKind,
    pub n_selected: usize,
    /// Score-descending, ties by ascending name. Rankers list every feature;
    /// CFS lists its chosen subset with the merit reached when each was added.
    pub ranked: Vec<RankedFeature>,
    pub selected: Vec<String>,
    pub config: SelectorConfig,
}

impl SelectionResult {
    fn from_ranking(method: SelectorKind, ranked: Vec<RankedFeature>, take: usize, config: SelectorConfig) -> Self {
        let selected: Vec<String> = ranked.iter().take(take).map(|r| r.name.clone()).collect();
        SelectionResult {
            method,
            n_selected: selected.len(),
            ranked,
            selected,
            config,
        }
    }
}

/// Sorts by descending score, then ascending name.
pub fn rank(names: &[String], scores: &[f64]) -> Vec<RankedFeature> {
    let mut idx: Vec<usize> = (0..names.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then_with(|| names[a].cmp(&names[b])));
    idx.into_iter()
        .map(|i| RankedFeature {
            name: names[i].clone(),
            score: scores[i],
        })
        .collect()
}

/// Both classes must be present for any supervised selector.
pub(crate) fn check_binary(t: &LabeledTable) -> Result<()> {
    if t.n_rows() < 2 {
        return Err(Error::InsufficientData {
            available: t.n_rows(),
            needed: 2,
        });
    }
    if t.labels.iter().all(|&l| l == t.labels[0]) {
        return Err(Error::SingleClassTraining);
    }
    if t.values.iter().any(|v| !v.is_finite()) {
        let pos = t
            .values
            .indexed_iter()
            .find(|(_, v)| !v.is_finite())
            .map(|(p, _)| p)
            .unwrap();
        return Err(Error::NonFiniteFeature {
            row: pos.0,
            column: pos.1,
        });
    }
    Ok(())
}

pub fn select(t: &LabeledTable, cfg: &SelectorConfig) -> Result<SelectionResult> {
    cfg.validate()?;
    match cfg.method {
        SelectorKind::None => Err(Error::Config(
            "selector `none` keeps every feature and produces no ranking".into(),
        )),
        SelectorKind::Cfs => cfs_greedy_stepwise(t, cfg),
        SelectorKind::InfoGain => info_gain_rank(t, cfg),
        SelectorKind::Relieff => relieff_rank(t, cfg),
    }
}

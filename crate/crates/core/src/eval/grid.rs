//! Feature set × selector × classifier grid of LOSO runs.

use serde::{Deserialize, Serialize};

use super::cv::{loso_cv_models, CvOptions, CvReport};
use super::featureset::FeatureSetTag;
use crate::classify::{ModelKind, ModelSpec};
use crate::digest::config_digest;
use crate::error::Result;
use crate::selection::{SelectorConfig, SelectorKind};
use crate::signal::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub featuresets: Vec<FeatureSetTag>,
    pub selectors: Vec<SelectorKind>,
    pub models: Vec<ModelSpec>,
    /// Shared selector settings; `method` is overridden per column.
    pub selector: SelectorConfig,
    pub options: CvOptions,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            featuresets: FeatureSetTag::ALL.to_vec(),
            selectors: SelectorKind::ALL.to_vec(),
            models: ModelKind::ALL.iter().map(|k| k.default_spec()).collect(),
            selector: SelectorConfig::default(),
            options: CvOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub featureset: FeatureSetTag,
    pub selector: SelectorKind,
    pub model: ModelKind,
    pub accuracy: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub subject_accuracy: Option<f64>,
    pub mean_selected: Option<f64>,
    /// Set when the cell failed; the metrics are then absent.
    pub error: Option<String>,
}

impl GridCell {
    fn from_result(
        fs: FeatureSetTag,
        sel: SelectorKind,
        model: ModelKind,
        r: std::result::Result<CvReport, String>,
    ) -> Self {
        match r {
            Ok(rep) => GridCell {
                featureset: fs,
                selector: sel,
                model,
                accuracy: Some(rep.metrics.accuracy),
                sensitivity: rep.metrics.sensitivity,
                specificity: rep.metrics.specificity,
                subject_accuracy: Some(rep.subject_metrics.accuracy),
                mean_selected: Some(rep.mean_selected),
                error: None,
            },
            Err(e) => GridCell {
                featureset: fs,
                selector: sel,
                model,
                accuracy: None,
                sensitivity: None,
                specificity: None,
                subject_accuracy: None,
                mean_selected: None,
                error: Some(e),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    /// Sample standard deviation; absent with fewer than two values.
    pub sd: Option<f64>,
    pub n: usize,
}

impl MeanSd {
    pub fn of(values: &[f64]) -> Option<MeanSd> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = (n > 1).then(|| (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt());
        Some(MeanSd { mean, sd, n })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub featureset: FeatureSetTag,
    /// One entry per selector, in `GridReport::selectors` order: mean ± sd over models.
    pub cells: Vec<Option<MeanSd>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierMean {
    pub model: ModelKind,
    pub selector: SelectorKind,
    /// Mean accuracy over feature sets.
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorLength {
    pub selector: SelectorKind,
    /// Mean selected-feature count over feature sets and folds.
    pub mean_length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub featuresets: Vec<FeatureSetTag>,
    pub selectors: Vec<SelectorKind>,
    pub models: Vec<ModelKind>,
    /// Ordered by feature set, then selector, then model.
    pub cells: Vec<GridCell>,
    pub table: Vec<TableRow>,
    pub classifier_means: Vec<ClassifierMean>,
    pub selector_lengths: Vec<SelectorLength>,
    pub config_digest: String,
}

fn mean(values: &[f64]) -> Option<f64> {
    MeanSd::of(values).map(|m| m.mean)
}

/// Runs every cell. Failures are recorded in their cells instead of aborting.
pub fn grid_evaluate(m: &FeatureMatrix, cfg: &GridConfig, workers: usize) -> Result<GridReport> {
    for spec in &cfg.models {
        spec.validate()?;
    }
    let kinds: Vec<ModelKind> = cfg.models.iter().map(|s| s.kind()).collect();
    let mut cells = Vec::new();
    for &fs_tag in &cfg.featuresets {
        let fs = fs_tag.resolve(&m.names);
        for &sel_kind in &cfg.selectors {
            let sel = SelectorConfig {
                method: sel_kind,
                ..cfg.selector.clone()
            };
            let results = fs.as_ref().map_err(|e| e.to_string()).and_then(|fs| {
                loso_cv_models(m, fs, &sel, &cfg.models, &cfg.options, workers).map_err(|e| e.to_string())
            });
            match results {
                Ok(rs) => {
                    for (k, r) in kinds.iter().zip(rs) {
                        cells.push(GridCell::from_result(
                            fs_tag,
                            sel_kind,
                            *k,
                            r.map_err(|e| e.to_string()),
                        ));
                    }
                }
                Err(msg) => {
                    for k in &kinds {
                        cells.push(GridCell::from_result(fs_tag, sel_kind, *k, Err(msg.clone())));
                    }
                }
            }
        }
    }
    let pick = |f: &dyn Fn(&GridCell) -> bool, v: &dyn Fn(&GridCell) -> Option<f64>| -> Vec<f64> {
        cells.iter().filter(|c| f(c)).filter_map(v).collect()
    };
    let table = cfg
        .featuresets
        .iter()
        .map(|&fs| TableRow {
            featureset: fs,
            cells: cfg
                .selectors
                .iter()
                .map(|&s| MeanSd::of(&pick(&|c| c.featureset == fs && c.selector == s, &|c| c.accuracy)))
                .collect(),
        })
        .collect();
    let classifier_means = kinds
        .iter()
        .flat_map(|&k| cfg.selectors.iter().map(move |&s| (k, s)))
        .map(|(k, s)| ClassifierMean {
            model: k,
            selector: s,
            accuracy: mean(&pick(&|c| c.model == k && c.selector == s, &|c| c.accuracy)),
        })
        .collect();
    let first_model = kinds.first().copied();
    let selector_lengths = cfg
        .selectors
        .iter()
        .map(|&s| SelectorLength {
            selector: s,
            // Selection is shared by the models, so one model's cells suffice.
            mean_length: mean(&pick(&|c| c.selector == s && Some(c.model) == first_model, &|c| {
                c.mean_selected
            })),
        })
        .collect();
    Ok(GridReport {
        featuresets: cfg.featuresets.clone(),
        selectors: cfg.selectors.clone(),
        models: kinds,
        cells,
        table,
        classifier_means,
        selector_lengths,
        config_digest: config_digest(cfg)?,
    })
}

impl GridReport {
    pub fn cell(&self, fs: FeatureSetTag, sel: SelectorKind, model: ModelKind) -> Option<&GridCell> {
        self.cells
            .iter()
            .find(|c| c.featureset == fs && c.selector == sel && c.model == model)
    }

    pub fn table_cell(&self, fs: FeatureSetTag, sel: SelectorKind) -> Option<MeanSd> {
        let row = self.table.iter().find(|r| r.featureset == fs)?;
        let col = self.selectors.iter().position(|&s| s == sel)?;
        row.cells[col]
    }

    /// Mean of a row's selector-column means.
    pub fn row_mean(&self, fs: FeatureSetTag) -> Option<f64> {
        let row = self.table.iter().find(|r| r.featureset == fs)?;
        mean(&row.cells.iter().flatten().map(|c| c.mean).collect::<Vec<_>>())
    }

    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.error.is_some()).count()
    }

    /// Rows = feature sets, columns = selectors, cells = `mean ± sd` in percent.
    pub fn table_csv(&self) -> String {
        let mut out = String::from("feature_set");
        for s in &self.selectors {
            out.push(',');
            out.push_str(s.as_str());
        }
        out.push('\n');
        for row in &self.table {
            out.push_str(row.featureset.as_str());
            for c in &row.cells {
                out.push(',');
                match c {
                    Some(MeanSd { mean, sd: Some(sd), .. }) => {
                        out.push_str(&format!("{:.2} ± {:.2}", 100.0 * mean, 100.0 * sd))
                    }
                    Some(MeanSd { mean, sd: None, .. }) => out.push_str(&format!("{:.2}", 100.0 * mean)),
                    None => out.push_str("NA"),
                }
            }
            out.push('\n');
        }
        out
    }
}

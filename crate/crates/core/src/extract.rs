//! Dataset-level feature extraction: filtering, univariate blocks and PLI edges.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::connectivity::{edge_names, pli_matrix, pli_matrix_band, vectorize_upper};
use crate::data::Dataset;
use crate::error::{Error, Result, ResultExt};
use crate::features::{extract_univariate, UnivariateConfig};
use crate::parallel::par_map;
use crate::signal::{filter::DEFAULT_TAPS, Epoch, FeatureMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub enabled: bool,
    pub lo: f64,
    pub hi: f64,
    pub taps: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            enabled: true,
            lo: 1.0,
            hi: 40.0,
            taps: DEFAULT_TAPS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureBlocks {
    pub linear: bool,
    pub nonlinear: bool,
    pub pli: bool,
}

impl Default for FeatureBlocks {
    fn default() -> Self {
        FeatureBlocks {
            linear: true,
            nonlinear: true,
            pli: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractConfig {
    pub filter: FilterConfig,
    pub blocks: FeatureBlocks,
    pub univariate: UnivariateConfig,
    /// Compute PLI on this sub-band of the filtered epoch instead of broadband.
    pub pli_band: Option<[f64; 2]>,
}

impl ExtractConfig {
    pub fn feature_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        if self.blocks.linear {
            names.extend(self.univariate.linear_names());
        }
        if self.blocks.nonlinear {
            names.extend(self.univariate.nonlinear_names());
        }
        if self.blocks.pli {
            names.extend(edge_names());
        }
        names
    }
}

/// Feature row for one epoch, in `ExtractConfig::feature_names` order.
pub fn extract_epoch(epoch: &Epoch, cfg: &ExtractConfig) -> Result<Vec<f64>> {
    let mut e = epoch.clone();
    if cfg.filter.enabled {
        e.bandpass(cfg.filter.lo, cfg.filter.hi, cfg.filter.taps)
            .context("bandpass_fir")?;
    }
    let mut row = Vec::new();
    if cfg.blocks.linear || cfg.blocks.nonlinear {
        let block = extract_univariate(&e, &cfg.univariate)?;
        if cfg.blocks.linear {
            row.extend_from_slice(block.linear());
        }
        if cfg.blocks.nonlinear {
            row.extend_from_slice(block.nonlinear());
        }
    }
    if cfg.blocks.pli {
        let m = match cfg.pli_band {
            Some([lo, hi]) => pli_matrix_band(&e, lo, hi, cfg.filter.taps)?,
            None => pli_matrix(&e)?,
        };
        row.extend(vectorize_upper(&m).values);
    }
    Ok(row)
}

pub fn extract_features(ds: &Dataset, cfg: &ExtractConfig, workers: usize) -> Result<FeatureMatrix> {
    let names = cfg.feature_names();
    if names.is_empty() {
        return Err(Error::Config("no feature blocks enabled".into()));
    }
    let rows = par_map(&ds.epochs, workers, |e| {
        extract_epoch(e, cfg).with_context(|| format!("subject {} epoch {}", e.subject_id, e.epoch_index))
    });
    let mut values = Array2::zeros((ds.epochs.len(), names.len()));
    for (i, row) in rows.into_iter().enumerate() {
        let row = row?;
        values.row_mut(i).iter_mut().zip(row).for_each(|(d, v)| *d = v);
    }
    let fm = FeatureMatrix::new(
        names,
        values,
        ds.epochs.iter().map(|e| e.subject_id.clone()).collect(),
        ds.epochs.iter().map(|e| e.label).collect(),
        ds.epochs.iter().map(|e| e.epoch_index).collect(),
    )?;
    fm.check_finite()?;
    Ok(fm)
}

//! Per-channel linear and nonlinear features.
//!
//! Each channel yields 8 linear values (variance, mean peak-to-peak, mean
//! square, Hjorth mobility and complexity, and three AR-spectrum features) and
//! 6 nonlinear values (C0-complexity, SVD entropy, spectral entropy and three
//! Rényi entropies). Hjorth activity equals the variance and is not emitted
//! separately. Names follow `<feature>@<channel>`.

pub mod ar;
pub mod entropy;
pub mod linear;
pub mod spectral;

pub use ar::{ar_psd_features, burg, ArModel, ArPsdFeatures};
pub use entropy::{renyi_entropies, svd_entropy};
pub use linear::{basic_stats, hjorth, BasicStats, Hjorth};
pub use spectral::{c0_complexity, spectral_entropy};

use serde::{Deserialize, Serialize};

use crate::error::{Result, ResultExt};
use crate::layout::CHANNELS;
use crate::signal::Epoch;

pub const LINEAR_FEATURES: [&str; 8] = [
    "variance",
    "mean_p2p",
    "mean_square",
    "mobility",
    "complexity",
    "ar_max_psd",
    "ar_peak_freq",
    "ar_psd_integral",
];

/// Nonlinear feature stems; the Rényi entries are generated from the configured orders.
pub const NONLINEAR_STEMS: [&str; 3] = ["c0", "svden", "spec_ent"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UnivariateConfig {
    pub ar_order: usize,
    pub psd_lo: f64,
    pub psd_hi: f64,
    pub psd_step: f64,
    pub svd_dim: usize,
    pub svd_delay: usize,
    pub renyi_orders: Vec<f64>,
    pub renyi_bins: usize,
    pub spectral_lo: f64,
    pub spectral_hi: f64,
}

impl Default for UnivariateConfig {
    fn default() -> Self {
        UnivariateConfig {
            ar_order: ar::DEFAULT_AR_ORDER,
            psd_lo: 1.0,
            psd_hi: 40.0,
            psd_step: 0.5,
            svd_dim: entropy::DEFAULT_SVD_DIM,
            svd_delay: entropy::DEFAULT_SVD_DELAY,
            renyi_orders: entropy::DEFAULT_RENYI_ORDERS.to_vec(),
            renyi_bins: entropy::DEFAULT_RENYI_BINS,
            spectral_lo: 1.0,
            spectral_hi: 40.0,
        }
    }
}

impl UnivariateConfig {
    pub fn nonlinear_features(&self) -> Vec<String> {
        NONLINEAR_STEMS
            .iter()
            .map(|s| s.to_string())
            .chain(self.renyi_orders.iter().map(|q| format!("renyi_q{q}")))
            .collect()
    }

    pub fn linear_names(&self) -> Vec<String> {
        block_names(LINEAR_FEATURES.iter().map(|s| s.to_string()))
    }

    pub fn nonlinear_names(&self) -> Vec<String> {
        block_names(self.nonlinear_features().into_iter())
    }
}

// Feature-major: every channel for the first feature, then the next feature.
fn block_names(features: impl Iterator<Item = String>) -> Vec<String> {
    features
        .flat_map(|f| CHANNELS.iter().map(move |c| format!("{f}@{c}")))
        .collect()
}

/// Named univariate values for one epoch: the linear block followed by the
/// nonlinear block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnivariateBlock {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    pub n_linear: usize,
}

impl UnivariateBlock {
    pub fn linear(&self) -> &[f64] {
        &self.values[..self.n_linear]
    }

    pub fn nonlinear(&self) -> &[f64] {
        &self.values[self.n_linear..]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

/// All linear then nonlinear values for one channel.
pub fn channel_features(x: &[f64], fs: f64, cfg: &UnivariateConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let stats = basic_stats(x).context("basic_stats")?;
    let hj = hjorth(x).context("hjorth")?;
    let grid = ar::frequency_grid(cfg.psd_lo, cfg.psd_hi, cfg.psd_step);
    let ar = ar_psd_features(x, fs, cfg.ar_order, &grid).context("ar_psd_features")?;
    let linear = vec![
        stats.variance,
        stats.mean_p2p,
        stats.mean_square,
        hj.mobility,
        hj.complexity,
        ar.max_psd,
        ar.peak_freq,
        ar.psd_integral,
    ];

    let mut nonlinear = vec![
        c0_complexity(x).context("c0_complexity")?,
        svd_entropy(x, cfg.svd_dim, cfg.svd_delay).context("svd_entropy")?,
        spectral::spectral_entropy_band(x, fs, cfg.spectral_lo, cfg.spectral_hi).context("spectral_entropy")?,
    ];
    nonlinear.extend(renyi_entropies(x, &cfg.renyi_orders, cfg.renyi_bins).context("renyi_entropies")?);
    Ok((linear, nonlinear))
}

pub fn extract_univariate(epoch: &Epoch, cfg: &UnivariateConfig) -> Result<UnivariateBlock> {
    epoch.validate()?;
    let n_ch = CHANNELS.len();
    let n_nl = cfg.nonlinear_features().len();
    let mut linear = vec![0.0; LINEAR_FEATURES.len() * n_ch];
    let mut nonlinear = vec![0.0; n_nl * n_ch];

    for (c, name) in CHANNELS.iter().enumerate() {
        let x = epoch.channel(c).to_vec();
        let (lin, nl) = channel_features(&x, epoch.fs, cfg).with_context(|| format!("channel {name}"))?;
        for (f, v) in lin.into_iter().enumerate() {
            linear[f * n_ch + c] = v;
        }
        for (f, v) in nl.into_iter().enumerate() {
            nonlinear[f * n_ch + c] = v;
        }
    }

    let mut names = cfg.linear_names();
    names.extend(cfg.nonlinear_names());
    let n_linear = linear.len();
    linear.extend(nonlinear);
    Ok(UnivariateBlock {
        names,
        values: linear,
        n_linear,
    })
}

//! Pipeline configuration file (TOML).

use std::path::{Path, PathBuf};

use eegdep::classify::{ModelKind, ModelSpec};
use eegdep::data::SynthConfig;
use eegdep::digest::config_digest;
use eegdep::eval::{CvOptions, FeatureSetTag, StatsLevel, DEFAULT_ALPHA};
use eegdep::extract::ExtractConfig;
use eegdep::selection::{SelectorConfig, SelectorKind};
use eegdep::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSource {
    /// Long-form epoch CSV.
    File {
        path: PathBuf,
    },
    Synth(SynthConfig),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    #[default]
    Single,
    Grid,
    Stats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridAxes {
    pub featuresets: Vec<FeatureSetTag>,
    pub selectors: Vec<SelectorKind>,
}

impl Default for GridAxes {
    fn default() -> Self {
        GridAxes {
            featuresets: FeatureSetTag::ALL.to_vec(),
            selectors: SelectorKind::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub mode: EvalMode,
    /// Feature set for `select` and `eval`.
    pub featureset: FeatureSetTag,
    pub options: CvOptions,
    pub grid: GridAxes,
    pub alpha: f64,
    /// Bonferroni divisor; the number of features when absent.
    pub bonferroni_divisor: Option<usize>,
    /// Whether `stats` compares subject means or individual epochs.
    pub stats_level: StatsLevel,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            mode: EvalMode::Single,
            featureset: FeatureSetTag::All,
            options: CvOptions::default(),
            grid: GridAxes::default(),
            alpha: DEFAULT_ALPHA,
            bonferroni_divisor: None,
            stats_level: StatsLevel::Subject,
        }
    }
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_models() -> Vec<ModelSpec> {
    ModelKind::ALL.iter().map(|k| k.default_spec()).collect()
}

fn default_dataset() -> DatasetSource {
    DatasetSource::Synth(SynthConfig::depression_scenario(20, 0))
}

/// `seed` is mandatory and overrides the seeds of the synthetic generator
/// and the selector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_dataset")]
    pub dataset: DatasetSource,
    #[serde(default)]
    pub extract: ExtractConfig,
    #[serde(default)]
    pub selector: SelectorConfig,
    #[serde(default = "default_models")]
    pub models: Vec<ModelSpec>,
    #[serde(default)]
    pub eval: EvalConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            out_dir: default_out_dir(),
            dataset: default_dataset(),
            extract: ExtractConfig::default(),
            selector: SelectorConfig::default(),
            models: default_models(),
            eval: EvalConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Copies `seed` into the component configs and validates them.
    pub fn resolved(mut self) -> Result<Self> {
        if let DatasetSource::Synth(s) = &mut self.dataset {
            s.seed = self.seed;
            s.validate()?;
        }
        self.selector.seed = self.seed;
        self.selector.validate()?;
        if self.models.is_empty() {
            return Err(Error::Config("at least one model is required".into()));
        }
        for m in &self.models {
            m.validate()?;
        }
        if !(self.eval.alpha > 0.0 && self.eval.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.eval.alpha
            )));
        }
        if self.eval.bonferroni_divisor == Some(0) {
            return Err(Error::Config("bonferroni_divisor must be positive".into()));
        }
        Ok(self)
    }

    /// Digest of everything that affects results; the output directory is excluded.
    pub fn digest(&self) -> Result<String> {
        let mut c = self.clone();
        c.out_dir = PathBuf::new();
        config_digest(&c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let c = PipelineConfig::default();
        let text = c.to_toml().unwrap();
        assert_eq!(PipelineConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn seed_is_required() {
        let err = PipelineConfig::from_toml("out_dir = \"x\"\n").unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
    }

    #[test]
    fn minimal_file_fills_defaults() {
        let c = PipelineConfig::from_toml("seed = 5\n[eval]\nmode = \"grid\"\n").unwrap();
        assert_eq!(c.eval.mode, EvalMode::Grid);
        assert_eq!(c.models.len(), 4);
        let r = c.resolved().unwrap();
        assert_eq!(r.selector.seed, 5);
        match r.dataset {
            DatasetSource::Synth(s) => assert_eq!(s.seed, 5),
            _ => panic!("expected synthetic source"),
        }
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(PipelineConfig::from_toml("seed = 1\ncolour = 2\n").is_err());
        let bad = PipelineConfig::from_toml("seed = 1\n[eval]\nalpha = 2.0\n").unwrap();
        assert!(matches!(bad.resolved(), Err(Error::Config(_))));
        let file = PipelineConfig::from_toml("seed = 1\n[dataset.file]\npath = \"eeg.csv\"\n").unwrap();
        assert_eq!(file.dataset, DatasetSource::File { path: "eeg.csv".into() });
    }

    #[test]
    fn digest_ignores_out_dir_only() {
        let a = PipelineConfig::default();
        let mut b = a.clone();
        b.out_dir = "elsewhere".into();
        assert_eq!(a.digest().unwrap(), b.digest().unwrap());
        b.seed = 1;
        assert_ne!(a.digest().unwrap(), b.digest().unwrap());
    }
}

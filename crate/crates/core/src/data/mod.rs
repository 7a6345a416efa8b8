//! Epoch datasets: validation, CSV persistence and synthetic generation.

pub mod csv_io;
pub mod synth;

pub use csv_io::{
    load_epochs_csv, load_feature_csv, read_epochs_csv, read_feature_csv, save_dataset, save_feature_csv,
    write_dataset, write_feature_csv, CsvMeta,
};
pub use synth::{synth_dataset, EdgeCoupling, SynthConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{ChannelLayout, Label};
use crate::signal::Epoch;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    File { path: String },
    Synthetic { seed: u64, config_digest: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub epochs: Vec<Epoch>,
    pub layout: ChannelLayout,
    pub provenance: Provenance,
}

impl Dataset {
    /// Checks shared sampling rate and epoch length, per-subject label
    /// consistency and contiguous subject blocks.
    pub fn new(epochs: Vec<Epoch>, provenance: Provenance) -> Result<Self> {
        let first = epochs
            .first()
            .ok_or_else(|| Error::Schema("dataset holds no epochs".into()))?;
        let (fs, len) = (first.fs, first.len());
        let mut seen: Vec<(&str, Label)> = Vec::new();
        for e in &epochs {
            e.validate()?;
            if e.fs != fs {
                return Err(Error::Schema(format!(
                    "epoch {} of subject {} has fs {} but the dataset uses {fs}",
                    e.epoch_index, e.subject_id, e.fs
                )));
            }
            if e.len() != len {
                return Err(Error::Schema(format!(
                    "epoch {} of subject {} has {} samples, expected {len}",
                    e.epoch_index,
                    e.subject_id,
                    e.len()
                )));
            }
            match seen.last() {
                Some(&(s, l)) if s == e.subject_id => {
                    if l != e.label {
                        return Err(Error::Schema(format!(
                            "subject {} carries both {} and {}",
                            s, l, e.label
                        )));
                    }
                }
                _ => {
                    if seen.iter().any(|(s, _)| *s == e.subject_id) {
                        return Err(Error::Schema(format!(
                            "epochs of subject {} are not contiguous",
                            e.subject_id
                        )));
                    }
                    seen.push((&e.subject_id, e.label));
                }
            }
        }
        Ok(Dataset {
            epochs,
            layout: ChannelLayout::canonical(),
            provenance,
        })
    }

    pub fn fs(&self) -> f64 {
        self.epochs[0].fs
    }

    pub fn epoch_len(&self) -> usize {
        self.epochs[0].len()
    }

    /// Subjects with their labels in order of first appearance.
    pub fn subjects(&self) -> Vec<(String, Label)> {
        let mut out: Vec<(String, Label)> = Vec::new();
        for e in &self.epochs {
            if out.last().map(|(s, _)| s != &e.subject_id).unwrap_or(true) {
                out.push((e.subject_id.clone(), e.label));
            }
        }
        out
    }

    pub fn n_subjects(&self) -> usize {
        self.subjects().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn epoch(subject: &str, label: Label, idx: usize, len: usize) -> Epoch {
        Epoch {
            subject_id: subject.into(),
            label,
            fs: 250.0,
            samples: Array2::from_shape_fn((16, len), |(c, t)| (c * 7 + t) as f64),
            epoch_index: idx,
        }
    }

    fn prov() -> Provenance {
        Provenance::File { path: "x".into() }
    }

    #[test]
    fn subjects_in_order() {
        let ds = Dataset::new(
            vec![
                epoch("b", Label::Nc, 0, 20),
                epoch("b", Label::Nc, 1, 20),
                epoch("a", Label::Mdd, 0, 20),
            ],
            prov(),
        )
        .unwrap();
        assert_eq!(ds.subjects(), vec![("b".into(), Label::Nc), ("a".into(), Label::Mdd)]);
        assert_eq!(ds.epoch_len(), 20);
    }

    #[test]
    fn rejects_inconsistent_datasets() {
        let ragged = Dataset::new(vec![epoch("a", Label::Nc, 0, 20), epoch("a", Label::Nc, 1, 21)], prov());
        assert!(matches!(ragged, Err(Error::Schema(m)) if m.contains("epoch 1")));
        let mixed = Dataset::new(
            vec![epoch("a", Label::Nc, 0, 20), epoch("a", Label::Mdd, 1, 20)],
            prov(),
        );
        assert!(matches!(mixed, Err(Error::Schema(_))));
        let split = Dataset::new(
            vec![
                epoch("a", Label::Nc, 0, 20),
                epoch("b", Label::Nc, 0, 20),
                epoch("a", Label::Nc, 1, 20),
            ],
            prov(),
        );
        assert!(matches!(split, Err(Error::Schema(m)) if m.contains("contiguous")));
        assert!(Dataset::new(vec![], prov()).is_err());
    }
}

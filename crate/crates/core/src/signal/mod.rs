//! Recordings, epochs, filtering and the feature matrix they feed.

pub mod filter;
pub mod standardize;

pub use filter::{bandpass_fir, bandpass_kernel, filtfilt};
pub use standardize::{standardize_apply, standardize_fit, ScalingMode, StandardizationParams};

use ndarray::{s, Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{Label, N_CHANNELS};

pub const DEFAULT_FS: f64 = 250.0;
pub const DEFAULT_EPOCH_LEN_S: f64 = 2.0;
pub const DEFAULT_EPOCH_COUNT: usize = 40;

/// A continuous multichannel recording for one subject.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub subject_id: String,
    pub label: Label,
    pub fs: f64,
    /// channels × time
    pub samples: Array2<f64>,
}

impl Recording {
    pub fn new(subject_id: impl Into<String>, label: Label, fs: f64, samples: Array2<f64>) -> Result<Self> {
        if samples.nrows() != N_CHANNELS {
            return Err(Error::Schema(format!(
                "recording has {} channels, expected {N_CHANNELS}",
                samples.nrows()
            )));
        }
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(Error::Config(format!("sampling rate must be positive, got {fs}")));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Schema("recording contains non-finite samples".into()));
        }
        Ok(Recording {
            subject_id: subject_id.into(),
            label,
            fs,
            samples,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Epoch {
    pub subject_id: String,
    pub label: Label,
    pub fs: f64,
    /// channels × samples
    pub samples: Array2<f64>,
    pub epoch_index: usize,
}

impl Epoch {
    pub fn len(&self) -> usize {
        self.samples.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.ncols() == 0
    }

    pub fn channel(&self, idx: usize) -> ArrayView1<'_, f64> {
        self.samples.row(idx)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.nrows() != N_CHANNELS {
            return Err(Error::Schema(format!(
                "epoch {} of subject {} has {} channels, expected {N_CHANNELS}",
                self.epoch_index,
                self.subject_id,
                self.samples.nrows()
            )));
        }
        if self.len() < 4 {
            return Err(Error::SignalTooShort {
                len: self.len(),
                needed: 4,
            });
        }
        if self.samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Schema(format!(
                "epoch {} of subject {} contains non-finite samples",
                self.epoch_index, self.subject_id
            )));
        }
        Ok(())
    }

    /// Band-pass every channel in place.
    pub fn bandpass(&mut self, lo: f64, hi: f64, taps: usize) -> Result<()> {
        let kernel = bandpass_kernel(self.fs, lo, hi, taps)?;
        if self.len() <= taps {
            return Err(Error::SignalTooShort {
                len: self.len(),
                needed: taps + 1,
            });
        }
        for mut row in self.samples.axis_iter_mut(Axis(0)) {
            let filtered = filtfilt(&kernel, &row.to_vec());
            row.iter_mut().zip(filtered).for_each(|(d, v)| *d = v);
        }
        Ok(())
    }
}

/// Cut `count` consecutive, non-overlapping epochs from the start of `rec`.
pub fn epoch_recording(rec: &Recording, epoch_len_s: f64, count: usize) -> Result<Vec<Epoch>> {
    let len = (epoch_len_s * rec.fs).round() as usize;
    if len < 4 {
        return Err(Error::Config(format!(
            "epoch length {epoch_len_s} s at {} Hz gives {len} samples, need at least 4",
            rec.fs
        )));
    }
    let needed = len * count;
    if rec.samples.ncols() < needed {
        return Err(Error::InsufficientData {
            available: rec.samples.ncols(),
            needed,
        });
    }
    Ok((0..count)
        .map(|i| Epoch {
            subject_id: rec.subject_id.clone(),
            label: rec.label,
            fs: rec.fs,
            samples: rec.samples.slice(s![.., i * len..(i + 1) * len]).to_owned(),
            epoch_index: i,
        })
        .collect())
}

/// Epoch-by-feature table with per-row subject grouping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub names: Vec<String>,
    pub values: Array2<f64>,
    pub subjects: Vec<String>,
    pub labels: Vec<Label>,
    pub epoch_index: Vec<usize>,
}

impl FeatureMatrix {
    pub fn new(
        names: Vec<String>,
        values: Array2<f64>,
        subjects: Vec<String>,
        labels: Vec<Label>,
        epoch_index: Vec<usize>,
    ) -> Result<Self> {
        let rows = values.nrows();
        if values.ncols() != names.len() {
            return Err(Error::ArityMismatch {
                expected: names.len(),
                got: values.ncols(),
            });
        }
        if subjects.len() != rows || labels.len() != rows || epoch_index.len() != rows {
            return Err(Error::Schema(format!(
                "row metadata lengths ({}, {}, {}) disagree with {rows} rows",
                subjects.len(),
                labels.len(),
                epoch_index.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::Schema(format!("duplicate feature name {n}")));
            }
        }
        Ok(FeatureMatrix {
            names,
            values,
            subjects,
            labels,
            epoch_index,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            names: self.names.clone(),
            values: self.values.select(Axis(0), rows),
            subjects: rows.iter().map(|&r| self.subjects[r].clone()).collect(),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            epoch_index: rows.iter().map(|&r| self.epoch_index[r]).collect(),
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            names: cols.iter().map(|&c| self.names[c].clone()).collect(),
            values: self.values.select(Axis(1), cols),
            subjects: self.subjects.clone(),
            labels: self.labels.clone(),
            epoch_index: self.epoch_index.clone(),
        }
    }

    pub fn select_named(&self, names: &[String]) -> Result<FeatureMatrix> {
        let cols = names
            .iter()
            .map(|n| {
                self.column_index(n)
                    .ok_or_else(|| Error::Schema(format!("unknown feature {n}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.select_columns(&cols))
    }

    /// Distinct subjects in order of first appearance, each with its row indices.
    pub fn subject_groups(&self) -> Vec<(String, Label, Vec<usize>)> {
        let mut groups: Vec<(String, Label, Vec<usize>)> = Vec::new();
        for (r, s) in self.subjects.iter().enumerate() {
            match groups.iter_mut().find(|g| &g.0 == s) {
                Some(g) => g.2.push(r),
                None => groups.push((s.clone(), self.labels[r], vec![r])),
            }
        }
        groups
    }

    pub fn label_indices(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.as_index()).collect()
    }

    pub fn check_finite(&self) -> Result<()> {
        for ((row, column), v) in self.values.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFiniteFeature { row, column });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ramp_recording(len: usize) -> Recording {
        ramp_recording_at(len, 250.0)
    }

    fn ramp_recording_at(len: usize, fs: f64) -> Recording {
        let samples = Array2::from_shape_fn((N_CHANNELS, len), |(c, t)| (c * 100_000 + t) as f64);
        Recording::new("s01", Label::Nc, fs, samples).unwrap()
    }

    #[test]
    fn forty_two_second_epochs() {
        let rec = ramp_recording(20_000);
        let epochs = epoch_recording(&rec, 2.0, 40).unwrap();
        assert_eq!(epochs.len(), 40);
        for (i, e) in epochs.iter().enumerate() {
            assert_eq!(e.samples.dim(), (16, 500));
            assert_eq!(e.epoch_index, i);
            assert_eq!(e.subject_id, "s01");
            assert_eq!(e.label, Label::Nc);
        }
    }

    #[test]
    fn zero_count_gives_no_epochs() {
        let rec = ramp_recording(100);
        assert!(epoch_recording(&rec, 2.0, 0).unwrap().is_empty());
    }

    #[test]
    fn too_short_recording_is_rejected() {
        let rec = ramp_recording(900);
        match epoch_recording(&rec, 2.0, 2) {
            Err(Error::InsufficientData { available, needed }) => {
                assert_eq!((available, needed), (900, 1000));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn recording_rejects_wrong_channel_count() {
        let samples = Array2::zeros((15, 10));
        assert!(Recording::new("x", Label::Mdd, 250.0, samples).is_err());
    }

    #[test]
    fn subject_groups_follow_first_appearance() {
        let m = FeatureMatrix::new(
            vec!["a".into()],
            Array2::zeros((4, 1)),
            vec!["b".into(), "a".into(), "b".into(), "a".into()],
            vec![Label::Mdd, Label::Nc, Label::Mdd, Label::Nc],
            vec![0, 0, 1, 1],
        )
        .unwrap();
        let g = m.subject_groups();
        assert_eq!(g[0], ("b".to_string(), Label::Mdd, vec![0, 2]));
        assert_eq!(g[1], ("a".to_string(), Label::Nc, vec![1, 3]));
    }

    proptest! {
        #[test]
        fn epochs_concatenate_to_recording_prefix(len_samples in 4usize..40, count in 0usize..6, extra in 0usize..50) {
            let fs = 10.0;
            let epoch_len_s = len_samples as f64 / fs;
            let rec = ramp_recording_at(len_samples * count + extra, fs);
            let epochs = epoch_recording(&rec, epoch_len_s, count).unwrap();
            prop_assert_eq!(epochs.len(), count);
            for c in 0..N_CHANNELS {
                let joined: Vec<f64> = epochs.iter().flat_map(|e| e.samples.row(c).to_vec()).collect();
                let prefix: Vec<f64> = rec.samples.row(c).iter().take(len_samples * count).copied().collect();
                prop_assert_eq!(joined, prefix);
            }
        }

        #[test]
        fn bandpass_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..400).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..400).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mix: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
            let fx = bandpass_fir(&x, 250.0, 1.0, 40.0, 101).unwrap();
            let fy = bandpass_fir(&y, 250.0, 1.0, 40.0, 101).unwrap();
            let fm = bandpass_fir(&mix, 250.0, 1.0, 40.0, 101).unwrap();
            let scale = fm.iter().fold(1e-12f64, |m, v| m.max(v.abs()));
            for i in 0..400 {
                let expect = a * fx[i] + b * fy[i];
                prop_assert!((fm[i] - expect).abs() <= 1e-9 * scale.max(1.0));
            }
        }
    }
}

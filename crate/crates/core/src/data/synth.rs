//! Synthetic resting-state epochs with planted lagged phase coupling.
//!
//! Each channel carries a narrow-band oscillation around `base_freq`, built as
//! an analytic signal (positive frequencies only) so that its Hilbert phase is
//! exactly the phase of the generating phasor. A coupled edge `A-B` replaces
//! the target's phasor with a normalized mix of itself and the source phasor
//! rotated by `-lag`, so B trails A by `lag` in proportion to the strength.
//! Independent 1/f noise with a low-frequency knee is added per channel.
//!
//! The random stream is ChaCha20 seeded from `seed`; draws happen in a fixed
//! order, so output depends only on the configuration.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Provenance};
use crate::digest::config_digest;
use crate::dsp::{fft_in_place, fft_real};
use crate::error::{Error, Result};
use crate::layout::{ChannelLayout, Label, N_CHANNELS};
use crate::signal::{epoch_recording, Recording};

/// A group of directed edges `source-target` sharing one coupling strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeCoupling {
    pub edges: Vec<String>,
    pub strength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub subjects_per_class: usize,
    pub epochs_per_subject: usize,
    pub fs: f64,
    pub epoch_len_s: f64,
    pub base_freq: f64,
    /// Standard deviation in Hz of the Gaussian spectral bump around `base_freq`.
    pub bandwidth: f64,
    /// Phase lag of a target behind its source, radians.
    pub lag: f64,
    pub oscillation_amplitude: f64,
    pub noise_sd: f64,
    /// Below this frequency the noise spectrum is flat instead of 1/f.
    pub noise_knee: f64,
    /// Log-normal spread of per-subject channel gains.
    pub subject_gain_sd: f64,
    /// Per-subject Gaussian jitter added to every coupling strength, clamped to [0, 1].
    pub subject_coupling_sd: f64,
    /// Keys are `MDD` and `NC`.
    pub coupling_strength_by_class: BTreeMap<String, Vec<EdgeCoupling>>,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            subjects_per_class: 20,
            epochs_per_subject: crate::signal::DEFAULT_EPOCH_COUNT,
            fs: crate::signal::DEFAULT_FS,
            epoch_len_s: crate::signal::DEFAULT_EPOCH_LEN_S,
            base_freq: 10.0,
            bandwidth: 4.0,
            lag: PI / 4.0,
            oscillation_amplitude: 1.0,
            noise_sd: 0.5,
            noise_knee: 2.0,
            subject_gain_sd: 0.2,
            subject_coupling_sd: 0.05,
            coupling_strength_by_class: BTreeMap::new(),
            seed: 0,
        }
    }
}

pub const LEFT_TREE: [&str; 7] = ["Fp1-F3", "F3-C3", "C3-P3", "P3-O1", "F3-F7", "F7-T3", "T3-T5"];
pub const RIGHT_TREE: [&str; 7] = ["Fp2-F4", "F4-C4", "C4-P4", "P4-O2", "F4-F8", "F8-T4", "T4-T6"];

impl SynthConfig {
    /// Two mirrored intra-hemispheric coupling trees; the left tree is weaker
    /// in the MDD class and the right tree is identical across classes.
    pub fn depression_scenario(subjects_per_class: usize, seed: u64) -> Self {
        let tree = |edges: &[&str], strength: f64| EdgeCoupling {
            edges: edges.iter().map(|e| e.to_string()).collect(),
            strength,
        };
        let mut coupling = BTreeMap::new();
        coupling.insert(
            Label::Nc.to_string(),
            vec![tree(&LEFT_TREE, 0.5), tree(&RIGHT_TREE, 0.5)],
        );
        coupling.insert(
            Label::Mdd.to_string(),
            vec![tree(&LEFT_TREE, 0.3), tree(&RIGHT_TREE, 0.5)],
        );
        SynthConfig {
            subjects_per_class,
            coupling_strength_by_class: coupling,
            subject_coupling_sd: 0.08,
            seed,
            ..SynthConfig::default()
        }
    }

    pub fn epoch_samples(&self) -> usize {
        (self.epoch_len_s * self.fs).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.subjects_per_class < 1 {
            return bad("subjects_per_class must be >= 1".into());
        }
        if self.epochs_per_subject < 1 {
            return bad("epochs_per_subject must be >= 1".into());
        }
        if !(self.fs > 0.0 && self.fs.is_finite()) {
            return bad(format!("fs must be positive, got {}", self.fs));
        }
        if self.epoch_samples() < crate::connectivity::MIN_PHASE_LEN {
            return bad(format!(
                "epoch_len_s {} gives {} samples, need at least {}",
                self.epoch_len_s,
                self.epoch_samples(),
                crate::connectivity::MIN_PHASE_LEN
            ));
        }
        if !(self.base_freq > 0.0 && self.base_freq < self.fs / 2.0) {
            return bad(format!("base_freq {} outside (0, fs/2)", self.base_freq));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return bad(format!("bandwidth must be positive, got {}", self.bandwidth));
        }
        if !self.lag.is_finite() {
            return bad("lag must be finite".into());
        }
        for (name, v) in [
            ("oscillation_amplitude", self.oscillation_amplitude),
            ("noise_sd", self.noise_sd),
            ("noise_knee", self.noise_knee),
            ("subject_gain_sd", self.subject_gain_sd),
            ("subject_coupling_sd", self.subject_coupling_sd),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if self.oscillation_amplitude == 0.0 && self.noise_sd == 0.0 {
            return bad("oscillation_amplitude and noise_sd are both zero".into());
        }
        for (class, groups) in &self.coupling_strength_by_class {
            class
                .parse::<Label>()
                .map_err(|_| Error::Config(format!("unknown class {class:?} in coupling map")))?;
            for g in groups {
                if !(0.0..=1.0).contains(&g.strength) {
                    return bad(format!("coupling strength {} outside [0, 1]", g.strength));
                }
                for e in &g.edges {
                    parse_directed_edge(e)?;
                }
            }
        }
        Ok(())
    }

    fn couplings_for(&self, label: Label) -> Result<Vec<(usize, usize, f64)>> {
        let mut out = Vec::new();
        if let Some(groups) = self.coupling_strength_by_class.get(label.as_str()) {
            for g in groups {
                for e in &g.edges {
                    let (s, t) = parse_directed_edge(e)?;
                    out.push((s, t, g.strength));
                }
            }
        }
        Ok(out)
    }
}

/// `"C3-P3"` → (index of C3, index of P3).
pub fn parse_directed_edge(edge: &str) -> Result<(usize, usize)> {
    let layout = ChannelLayout::canonical();
    let (a, b) = edge
        .split_once('-')
        .ok_or_else(|| Error::Config(format!("edge {edge:?} is not of the form A-B")))?;
    let (s, t) = (
        layout.index_of(a.trim()).map_err(|e| Error::Config(e.to_string()))?,
        layout.index_of(b.trim()).map_err(|e| Error::Config(e.to_string()))?,
    );
    if s == t {
        return Err(Error::Config(format!("edge {edge:?} joins a channel to itself")));
    }
    Ok((s, t))
}

fn normal(rng: &mut ChaCha20Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Analytic narrow-band process scaled so its real part has unit mean power.
fn analytic_oscillation(rng: &mut ChaCha20Rng, n: usize, fs: f64, f0: f64, bw: f64) -> Vec<Complex64> {
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    for (k, c) in spec.iter_mut().enumerate().take(n.div_ceil(2)).skip(1) {
        let f = k as f64 * fs / n as f64;
        let a = (-0.5 * ((f - f0) / bw).powi(2)).exp();
        *c = Complex64::new(normal(rng), normal(rng)) * a;
    }
    fft_in_place(&mut spec, true);
    let power = spec.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
    let scale = if power > 0.0 { (2.0 / power).sqrt() } else { 0.0 };
    spec.iter().map(|z| z * scale).collect()
}

/// Unit-variance noise with power ∝ 1/max(f, knee).
fn knee_pink_noise(rng: &mut ChaCha20Rng, n: usize, fs: f64, knee: f64) -> Vec<f64> {
    let white: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
    let mut spec = fft_real(&white);
    spec[0] = Complex64::new(0.0, 0.0);
    for (k, c) in spec.iter_mut().enumerate().skip(1) {
        let f = k.min(n - k) as f64 * fs / n as f64;
        *c /= f.max(knee).max(f64::MIN_POSITIVE).sqrt();
    }
    fft_in_place(&mut spec, true);
    let x: Vec<f64> = spec.iter().map(|z| z.re).collect();
    let sd = (x.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if sd > 0.0 {
        x.iter().map(|v| v / sd).collect()
    } else {
        x
    }
}

fn subject_ids(cfg: &SynthConfig) -> Vec<(String, Label)> {
    let width = cfg.subjects_per_class.to_string().len().max(2);
    [Label::Mdd, Label::Nc]
        .into_iter()
        .flat_map(|label| {
            let stem = label.as_str().to_ascii_lowercase();
            (1..=cfg.subjects_per_class).map(move |k| (format!("{stem}{k:0width$}"), label))
        })
        .collect()
}

fn synth_subject(cfg: &SynthConfig, rng: &mut ChaCha20Rng, id: &str, label: Label) -> Result<Recording> {
    let n = cfg.epoch_samples() * cfg.epochs_per_subject;
    let gains: Vec<f64> = (0..N_CHANNELS)
        .map(|_| (cfg.subject_gain_sd * normal(rng)).exp())
        .collect();
    let mut z: Vec<Vec<Complex64>> = (0..N_CHANNELS)
        .map(|_| analytic_oscillation(rng, n, cfg.fs, cfg.base_freq, cfg.bandwidth))
        .collect();
    let rot = Complex64::from_polar(1.0, -cfg.lag);
    for (src, tgt, strength) in cfg.couplings_for(label)? {
        let s = (strength + cfg.subject_coupling_sd * normal(rng)).clamp(0.0, 1.0);
        let norm = ((1.0 - s).powi(2) + s * s).sqrt();
        let source = z[src].clone();
        for (t, v) in z[tgt].iter_mut().enumerate() {
            *v = ((1.0 - s) * *v + s * source[t] * rot) / norm;
        }
    }
    let mut samples = Array2::zeros((N_CHANNELS, n));
    for c in 0..N_CHANNELS {
        let noise = knee_pink_noise(rng, n, cfg.fs, cfg.noise_knee);
        for t in 0..n {
            samples[[c, t]] = gains[c] * (cfg.oscillation_amplitude * z[c][t].re + cfg.noise_sd * noise[t]);
        }
    }
    Recording::new(id, label, cfg.fs, samples)
}

pub fn synth_dataset(cfg: &SynthConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let mut epochs = Vec::new();
    for (id, label) in subject_ids(cfg) {
        let rec = synth_subject(cfg, &mut rng, &id, label)?;
        epochs.extend(epoch_recording(&rec, cfg.epoch_len_s, cfg.epochs_per_subject)?);
    }
    Dataset::new(
        epochs,
        Provenance::Synthetic {
            seed: cfg.seed,
            config_digest: config_digest(cfg)?,
        },
    )
}

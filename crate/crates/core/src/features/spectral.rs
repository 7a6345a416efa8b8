//! Periodogram-based nonlinear descriptors: spectral entropy and C0-complexity.

use crate::dsp::{fft_in_place, fft_real};
use crate::error::{Error, Result};

pub const MIN_SPECTRAL_LEN: usize = 64;

fn check_len(x: &[f64]) -> Result<()> {
    if x.len() < MIN_SPECTRAL_LEN {
        return Err(Error::SignalTooShort {
            len: x.len(),
            needed: MIN_SPECTRAL_LEN,
        });
    }
    Ok(())
}

/// Normalized Shannon entropy of the periodogram restricted to 1-40 Hz.
pub fn spectral_entropy(x: &[f64], fs: f64) -> Result<f64> {
    spectral_entropy_band(x, fs, 1.0, 40.0)
}

pub fn spectral_entropy_band(x: &[f64], fs: f64, lo: f64, hi: f64) -> Result<f64> {
    check_len(x)?;
    let n = x.len();
    let spec = fft_real(x);
    let power: Vec<f64> = (0..=n / 2)
        .filter(|&k| {
            let f = k as f64 * fs / n as f64;
            f >= lo && f <= hi
        })
        .map(|k| spec[k].norm_sqr())
        .collect();
    let bins = power.len();
    if bins < 2 {
        return Err(Error::DegenerateSignal(format!(
            "band {lo}-{hi} Hz holds {bins} periodogram bins"
        )));
    }
    let total: f64 = power.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateSignal("zero in-band spectral power".into()));
    }
    let h: f64 = power
        .iter()
        .map(|&p| p / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    Ok((h / (bins as f64).ln()).clamp(0.0, 1.0))
}

/// Fraction of signal energy left after removing the spectral components whose
/// power exceeds the mean spectral power.
pub fn c0_complexity(x: &[f64]) -> Result<f64> {
    check_len(x)?;
    let energy: f64 = x.iter().map(|v| v * v).sum();
    if energy <= 0.0 {
        return Err(Error::DegenerateSignal("C0-complexity of a zero-energy series".into()));
    }
    let mut spec = fft_real(x);
    let mean_power = spec.iter().map(|c| c.norm_sqr()).sum::<f64>() / spec.len() as f64;
    for c in spec.iter_mut() {
        if c.norm_sqr() <= mean_power {
            *c = 0.0.into();
        }
    }
    fft_in_place(&mut spec, true);
    let irregular: f64 = x
        .iter()
        .zip(&spec)
        .map(|(v, r)| {
            let d = v - r.re;
            d * d
        })
        .sum();
    Ok((irregular / energy).clamp(0.0, 1.0))
}

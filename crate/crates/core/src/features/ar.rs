//! Burg autoregressive fit and the AR power spectral density features.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_AR_ORDER: usize = 10;

/// AR(p) model `x[t] = -sum_k a[k] x[t-k] + e[t]`, i.e. A(z) = 1 + sum_k a[k] z^-k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArModel {
    /// a[1..=p]
    pub coefficients: Vec<f64>,
    pub reflection: Vec<f64>,
    /// Final forward prediction-error variance.
    pub noise_variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArPsdFeatures {
    pub max_psd: f64,
    pub peak_freq: f64,
    pub psd_integral: f64,
}

/// Frequencies from `lo` to `hi` inclusive in steps of `step`.
pub fn frequency_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

/// 1-40 Hz in 0.5 Hz steps.
pub fn default_grid() -> Vec<f64> {
    frequency_grid(1.0, 40.0, 0.5)
}

pub fn burg(x: &[f64], order: usize) -> Result<ArModel> {
    let n = x.len();
    if order < 2 {
        return Err(Error::Config(format!("AR order must be >= 2, got {order}")));
    }
    if n <= 2 * order {
        return Err(Error::SignalTooShort {
            len: n,
            needed: 2 * order + 1,
        });
    }
    let energy: f64 = x.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if energy == 0.0 {
        return Err(Error::DegenerateSignal("AR fit of an all-zero series".into()));
    }

    let mut fwd = x.to_vec();
    let mut bwd = x.to_vec();
    let mut a = vec![0.0; order + 1];
    a[0] = 1.0;
    let mut reflection = Vec::with_capacity(order);
    let mut err = energy;

    for m in 0..order {
        let mut num = 0.0;
        let mut den = 0.0;
        for t in (m + 1)..n {
            num += fwd[t] * bwd[t - 1];
            den += fwd[t] * fwd[t] + bwd[t - 1] * bwd[t - 1];
        }
        if den <= 0.0 {
            return Err(Error::NumericalInstability(format!(
                "zero prediction-error energy at Burg stage {}",
                m + 1
            )));
        }
        let k = -2.0 * num / den;
        if !(k.abs() < 1.0) {
            return Err(Error::NumericalInstability(format!(
                "Burg reflection coefficient {k} at stage {} left (-1, 1)",
                m + 1
            )));
        }
        reflection.push(k);

        // Levinson update of the polynomial.
        let prev = a.clone();
        for i in 1..=m + 1 {
            a[i] = prev[i] + k * prev[m + 1 - i];
        }

        // Descending t keeps bwd[t - 1] at its previous-stage value.
        for t in ((m + 1)..n).rev() {
            let f = fwd[t];
            fwd[t] = f + k * bwd[t - 1];
            bwd[t] = bwd[t - 1] + k * f;
        }
        err *= 1.0 - k * k;
    }

    Ok(ArModel {
        coefficients: a[1..].to_vec(),
        reflection,
        noise_variance: err,
    })
}

impl ArModel {
    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    /// One-sided PSD at `freq` Hz: 2 σ² / (fs |A(e^{iω})|²).
    pub fn psd(&self, freq: f64, fs: f64) -> f64 {
        let omega = 2.0 * PI * freq / fs;
        let mut resp = Complex64::new(1.0, 0.0);
        for (k, &ak) in self.coefficients.iter().enumerate() {
            resp += Complex64::from_polar(ak, -omega * (k + 1) as f64);
        }
        2.0 * self.noise_variance / (fs * resp.norm_sqr())
    }
}

pub fn ar_psd_features(x: &[f64], fs: f64, order: usize, grid: &[f64]) -> Result<ArPsdFeatures> {
    if grid.is_empty() {
        return Err(Error::Config("empty PSD frequency grid".into()));
    }
    let model = burg(x, order)?;
    let psd: Vec<f64> = grid.iter().map(|&f| model.psd(f, fs)).collect();
    let (peak_idx, max_psd) =
        psd.iter().copied().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |best, (i, v)| if v > best.1 { (i, v) } else { best },
        );
    let psd_integral = grid
        .windows(2)
        .zip(psd.windows(2))
        .map(|(f, p)| 0.5 * (p[0] + p[1]) * (f[1] - f[0]))
        .sum();
    Ok(ArPsdFeatures {
        max_psd,
        peak_freq: grid[peak_idx],
        psd_integral,
    })
}

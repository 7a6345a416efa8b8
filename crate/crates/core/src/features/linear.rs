//! Time-domain amplitude statistics and Hjorth descriptors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of sub-windows used for the mean peak-to-peak amplitude.
pub const P2P_WINDOWS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasicStats {
    pub variance: f64,
    pub mean_square: f64,
    pub mean_p2p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hjorth {
    pub activity: f64,
    /// radians per sample
    pub mobility: f64,
    pub complexity: f64,
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased (n - 1) sample variance.
pub(crate) fn sample_variance(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64
}

fn diff(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

pub fn basic_stats(x: &[f64]) -> Result<BasicStats> {
    let n = x.len();
    if n < P2P_WINDOWS {
        return Err(Error::SignalTooShort {
            len: n,
            needed: P2P_WINDOWS,
        });
    }
    let mean_square = x.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let p2p_sum: f64 = (0..P2P_WINDOWS)
        .map(|w| {
            let window = &x[w * n / P2P_WINDOWS..(w + 1) * n / P2P_WINDOWS];
            let hi = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = window.iter().copied().fold(f64::INFINITY, f64::min);
            hi - lo
        })
        .sum();
    Ok(BasicStats {
        variance: sample_variance(x),
        mean_square,
        mean_p2p: p2p_sum / P2P_WINDOWS as f64,
    })
}

pub fn hjorth(x: &[f64]) -> Result<Hjorth> {
    if x.len() < 3 {
        return Err(Error::SignalTooShort {
            len: x.len(),
            needed: 3,
        });
    }
    let dx = diff(x);
    let ddx = diff(&dx);
    let var_x = sample_variance(x);
    let var_dx = sample_variance(&dx);
    let var_ddx = sample_variance(&ddx);
    if var_x <= 0.0 || var_dx <= 0.0 {
        return Err(Error::DegenerateSignal(
            "Hjorth parameters need non-zero variance of the signal and its first difference".into(),
        ));
    }
    let mobility = (var_dx / var_x).sqrt();
    let mobility_dx = (var_ddx / var_dx).sqrt();
    Ok(Hjorth {
        activity: var_x,
        mobility,
        complexity: mobility_dx / mobility,
    })
}

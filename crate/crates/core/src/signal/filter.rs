//! Hamming-windowed sinc band-pass, applied forward and backward.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const DEFAULT_TAPS: usize = 251;

/// Band-pass kernel built as the difference of two unity-DC-gain low-pass
/// kernels, so the DC response is zero up to rounding.
pub fn bandpass_kernel(fs: f64, lo: f64, hi: f64, taps: usize) -> Result<Vec<f64>> {
    if !(fs > 0.0 && lo > 0.0 && lo < hi && hi < fs / 2.0) {
        return Err(Error::InvalidBand { lo, hi, fs });
    }
    if taps < 3 || taps.is_multiple_of(2) {
        return Err(Error::Config(format!("filter taps must be odd and >= 3, got {taps}")));
    }
    let low_hi = lowpass_kernel(hi / fs, taps);
    let low_lo = lowpass_kernel(lo / fs, taps);
    Ok(low_hi.iter().zip(&low_lo).map(|(a, b)| a - b).collect())
}

// `cutoff` is normalized to the sampling rate (cycles/sample).
fn lowpass_kernel(cutoff: f64, taps: usize) -> Vec<f64> {
    let m = (taps - 1) as f64;
    let mid = (taps / 2) as isize;
    let mut h: Vec<f64> = (0..taps)
        .map(|i| {
            let n = i as isize - mid;
            let sinc = if n == 0 {
                2.0 * cutoff
            } else {
                (2.0 * PI * cutoff * n as f64).sin() / (PI * n as f64)
            };
            let window = 0.54 - 0.46 * (2.0 * PI * i as f64 / m).cos();
            sinc * window
        })
        .collect();
    let sum: f64 = h.iter().sum();
    for v in &mut h {
        *v /= sum;
    }
    h
}

/// Zero-phase band-pass of `signal`.
///
/// The series is extended by odd reflection (`min(taps, len - 1)` samples per
/// side) before filtering so that slow trends do not ring at the edges.
pub fn bandpass_fir(signal: &[f64], fs: f64, lo: f64, hi: f64, taps: usize) -> Result<Vec<f64>> {
    let kernel = bandpass_kernel(fs, lo, hi, taps)?;
    if signal.len() <= taps {
        return Err(Error::SignalTooShort {
            len: signal.len(),
            needed: taps + 1,
        });
    }
    Ok(filtfilt(&kernel, signal))
}

/// Forward-backward application of an FIR kernel with odd-reflection padding.
pub fn filtfilt(kernel: &[f64], signal: &[f64]) -> Vec<f64> {
    let n = signal.len();
    let pad = kernel.len().min(n - 1);
    let first = signal[0];
    let last = signal[n - 1];

    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((1..=pad).rev().map(|i| 2.0 * first - signal[i]));
    ext.extend_from_slice(signal);
    ext.extend((1..=pad).map(|i| 2.0 * last - signal[n - 1 - i]));

    let forward = convolve_centered(kernel, &ext);
    let mut reversed: Vec<f64> = forward.into_iter().rev().collect();
    reversed = convolve_centered(kernel, &reversed);
    reversed.reverse();

    reversed[pad..pad + n].to_vec()
}

// Convolution advanced by the kernel's group delay, zero outside `x`.
fn convolve_centered(kernel: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let taps = kernel.len();
    let delay = (taps - 1) / 2;
    let mut out = vec![0.0; n];
    for (t, o) in out.iter_mut().enumerate() {
        // y[t] = sum_k h[k] x[t + delay - k]
        let center = t + delay;
        let k_lo = center.saturating_sub(n - 1);
        let k_hi = center.min(taps - 1);
        let mut acc = 0.0;
        for k in k_lo..=k_hi {
            acc += kernel[k] * x[center - k];
        }
        *o = acc;
    }
    out
}

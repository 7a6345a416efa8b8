//! Embedding and amplitude-distribution entropies.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const DEFAULT_SVD_DIM: usize = 20;
pub const DEFAULT_SVD_DELAY: usize = 1;
pub const DEFAULT_RENYI_ORDERS: [f64; 3] = [0.5, 2.0, 3.0];
pub const DEFAULT_RENYI_BINS: usize = 16;

/// Singular values of the delay-embedding trajectory matrix, largest first.
///
/// Computed from the eigenvalues of the m × m Gram matrix, which is much
/// cheaper than a full SVD of the (N - (m-1)τ) × m trajectory.
pub fn embedding_singular_values(x: &[f64], dim: usize, delay: usize) -> Result<Vec<f64>> {
    if dim < 2 || delay < 1 {
        return Err(Error::Config(format!(
            "embedding needs dim >= 2 and delay >= 1, got dim={dim}, delay={delay}"
        )));
    }
    let needed = dim * delay + 10;
    if x.len() < needed {
        return Err(Error::SignalTooShort { len: x.len(), needed });
    }
    let rows = x.len() - (dim - 1) * delay;
    let mut gram = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..dim {
        for l in j..dim {
            let (oj, ol) = (j * delay, l * delay);
            let s: f64 = (0..rows).map(|i| x[i + oj] * x[i + ol]).sum();
            gram[(j, l)] = s;
            gram[(l, j)] = s;
        }
    }
    let mut sv: Vec<f64> = gram
        .symmetric_eigenvalues()
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Shannon entropy of the normalized singular-value spectrum, divided by ln m.
pub fn svd_entropy(x: &[f64], dim: usize, delay: usize) -> Result<f64> {
    let sv = embedding_singular_values(x, dim, delay)?;
    normalized_sv_entropy(&sv, dim)
}

pub(crate) fn normalized_sv_entropy(sv: &[f64], dim: usize) -> Result<f64> {
    let total: f64 = sv.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateSignal("all singular values are zero".into()));
    }
    let h: f64 = sv
        .iter()
        .map(|s| s / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    Ok((h / (dim as f64).ln()).max(0.0))
}

/// Equal-width amplitude histogram over [min, max]; the maximum falls in the last bin.
pub fn amplitude_histogram(x: &[f64], bins: usize) -> Result<Vec<usize>> {
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(Error::DegenerateSignal(
            "amplitude histogram of a constant series".into(),
        ));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in x {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Ok(counts)
}

/// Rényi entropy (natural log) of order `q` for a probability vector.
pub fn renyi(p: &[f64], q: f64) -> f64 {
    let s: f64 = p.iter().filter(|&&v| v > 0.0).map(|v| v.powf(q)).sum();
    s.ln() / (1.0 - q)
}

pub fn renyi_entropies(x: &[f64], orders: &[f64], bins: usize) -> Result<Vec<f64>> {
    if x.len() < 64 {
        return Err(Error::SignalTooShort {
            len: x.len(),
            needed: 64,
        });
    }
    if bins < 4 {
        return Err(Error::Config(format!("Rényi histogram needs >= 4 bins, got {bins}")));
    }
    if let Some(q) = orders.iter().find(|&&q| !(q > 0.0) || q == 1.0) {
        return Err(Error::Config(format!("Rényi order must be > 0 and != 1, got {q}")));
    }
    let counts = amplitude_histogram(x, bins)?;
    let n = x.len() as f64;
    let p: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    Ok(orders.iter().map(|&q| renyi(&p, q).max(0.0)).collect())
}

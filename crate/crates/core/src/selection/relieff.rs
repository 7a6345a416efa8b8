//! ReliefF attribute weighting for two classes.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::{check_binary, rank, LabeledTable, SelectionResult, SelectorConfig, SelectorKind};
use crate::error::{Error, Result};
use crate::layout::Label;

pub const DEFAULT_K: usize = 10;

/// Feature values mapped to [0, 1] by the column range; constant columns become 0.
fn range_normalized(t: &LabeledTable) -> (Vec<f64>, usize) {
    let (n, d) = (t.n_rows(), t.n_features());
    let mut out = vec![0.0; n * d];
    for j in 0..d {
        let col = t.values.column(j);
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let range = hi - lo;
        if range > 0.0 {
            for i in 0..n {
                out[i * d + j] = (col[i] - lo) / range;
            }
        }
    }
    (out, d)
}

/// The `k` rows of class `class` nearest to row `r` (excluding `r`), ordered
/// by distance and then row index.
fn nearest(dist: &[f64], labels: &[Label], r: usize, class: Label, k: usize) -> Vec<usize> {
    let mut cand: Vec<usize> = (0..labels.len()).filter(|&i| i != r && labels[i] == class).collect();
    let cmp = |a: &usize, b: &usize| dist[*a].total_cmp(&dist[*b]).then(a.cmp(b));
    if cand.len() > k {
        cand.select_nth_unstable_by(k - 1, cmp);
        cand.truncate(k);
    }
    cand.sort_by(cmp);
    cand
}

/// Weights in column order. `m = None` visits every row once in row order;
/// otherwise `m` distinct rows are drawn with a seeded ChaCha20 stream.
pub fn relieff_weights(t: &LabeledTable, k: usize, m: Option<usize>, seed: u64) -> Result<Vec<f64>> {
    check_binary(t)?;
    if k < 1 {
        return Err(Error::Config("ReliefF needs k >= 1".into()));
    }
    let n = t.n_rows();
    for class in [Label::Mdd, Label::Nc] {
        let count = t.labels.iter().filter(|&&l| l == class).count();
        if count <= k {
            return Err(Error::TooFewInstances {
                class: class.to_string(),
                count,
                k,
            });
        }
    }
    let visits: Vec<usize> = match m {
        None => (0..n).collect(),
        Some(m) if m == 0 || m > n => return Err(Error::Config(format!("ReliefF m must be in 1..={n}, got {m}"))),
        Some(m) => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut v = sample(&mut rng, n, m).into_vec();
            v.sort_unstable();
            v
        }
    };

    let (x, d) = range_normalized(t);
    let prior = |c: Label| t.labels.iter().filter(|&&l| l == c).count() as f64 / n as f64;
    let mut w = vec![0.0; d];
    let mut dist = vec![0.0; n];
    let scale = 1.0 / (visits.len() as f64 * k as f64);
    for &r in &visits {
        let xr = &x[r * d..(r + 1) * d];
        for (i, slot) in dist.iter_mut().enumerate() {
            let xi = &x[i * d..(i + 1) * d];
            *slot = xr.iter().zip(xi).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        }
        let own = t.labels[r];
        let other = if own == Label::Mdd { Label::Nc } else { Label::Mdd };
        let miss_weight = prior(other) / (1.0 - prior(own));
        for h in nearest(&dist, t.labels, r, own, k) {
            let xh = &x[h * d..(h + 1) * d];
            for j in 0..d {
                w[j] -= (xr[j] - xh[j]).abs() * scale;
            }
        }
        for mi in nearest(&dist, t.labels, r, other, k) {
            let xm = &x[mi * d..(mi + 1) * d];
            for j in 0..d {
                w[j] += miss_weight * (xr[j] - xm[j]).abs() * scale;
            }
        }
    }
    Ok(w)
}

pub fn relieff_rank(t: &LabeledTable, cfg: &SelectorConfig) -> Result<SelectionResult> {
    let w = relieff_weights(t, cfg.relieff_k, cfg.relieff_m, cfg.seed)?;
    let cfg = SelectorConfig {
        method: SelectorKind::Relieff,
        ..cfg.clone()
    };
    Ok(SelectionResult::from_ranking(
        SelectorKind::Relieff,
        rank(t.names, &w),
        cfg.n,
        cfg,
    ))
}

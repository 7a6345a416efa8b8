//! Gaussian naive Bayes with class priors from training frequencies.

use ndarray::{ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::layout::Label;

pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Per-class parameters indexed by `Label::as_index` (0 = NC, 1 = MDD).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
}

impl NbModel {
    /// Maximum-likelihood means and variances; the caller guarantees both
    /// classes are present.
    pub fn fit(x: ArrayView2<f64>, y: &[Label]) -> Self {
        let n = y.len() as f64;
        let mut priors = [0.0; 2];
        let mut means: [Vec<f64>; 2] = Default::default();
        let mut variances: [Vec<f64>; 2] = Default::default();
        for c in 0..2 {
            let rows: Vec<usize> = (0..y.len()).filter(|&i| y[i].as_index() == c).collect();
            let sub = x.select(Axis(0), &rows);
            let nc = rows.len() as f64;
            priors[c] = nc / n;
            means[c] = sub.mean_axis(Axis(0)).expect("class has rows").to_vec();
            variances[c] = sub
                .axis_iter(Axis(1))
                .zip(&means[c])
                .map(|(col, m)| {
                    let v = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / nc;
                    v.max(VARIANCE_FLOOR)
                })
                .collect();
        }
        NbModel {
            priors,
            means,
            variances,
        }
    }

    pub fn n_features(&self) -> usize {
        self.means[0].len()
    }

    fn log_joint(&self, x: ArrayView1<f64>, c: usize) -> f64 {
        let ln_2pi = (2.0 * std::f64::consts::PI).ln();
        self.priors[c].ln()
            + x.iter()
                .zip(&self.means[c])
                .zip(&self.variances[c])
                .map(|((v, m), s2)| -0.5 * (ln_2pi + s2.ln()) - (v - m) * (v - m) / (2.0 * s2))
                .sum::<f64>()
    }

    /// Posterior `[P(NC|x), P(MDD|x)]`, computed from the log-odds.
    pub fn posteriors(&self, x: ArrayView1<f64>) -> [f64; 2] {
        let log_odds = self.log_joint(x, 1) - self.log_joint(x, 0);
        let p_mdd = if log_odds >= 0.0 {
            1.0 / (1.0 + (-log_odds).exp())
        } else {
            let e = log_odds.exp();
            e / (1.0 + e)
        };
        [1.0 - p_mdd, p_mdd]
    }
}

//! k-nearest neighbours with Euclidean distance.

use ndarray::{ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::Prediction;
use crate::error::{Error, Result};
use crate::layout::Label;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 3 }
    }
}

impl KnnParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("KNN needs k >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub n_features: usize,
    /// Training rows, row-major.
    pub rows: Vec<f64>,
    pub labels: Vec<Label>,
}

impl KnnModel {
    pub fn fit(x: ArrayView2<f64>, y: &[Label], p: &KnnParams) -> Self {
        KnnModel {
            k: p.k,
            n_features: x.ncols(),
            rows: x.iter().copied().collect(),
            labels: y.to_vec(),
        }
    }

    /// Indices of the k nearest training rows, by distance then row index.
    pub fn neighbours(&self, x: ArrayView1<f64>) -> Vec<usize> {
        let d = self.n_features;
        let dist: Vec<f64> = (0..self.labels.len())
            .map(|i| {
                let r = &self.rows[i * d..(i + 1) * d];
                r.iter().zip(x.iter()).map(|(a, b)| (a - b) * (a - b)).sum()
            })
            .collect();
        let mut idx: Vec<usize> = (0..self.labels.len()).collect();
        let cmp = |a: &usize, b: &usize| dist[*a].total_cmp(&dist[*b]).then(a.cmp(b));
        let k = self.k.min(idx.len());
        if k < idx.len() {
            idx.select_nth_unstable_by(k, cmp);
            idx.truncate(k);
        }
        idx.sort_by(cmp);
        idx
    }

    /// Majority vote; equal votes go to NC.
    pub fn predict(&self, x: ArrayView1<f64>) -> Prediction {
        let nb = self.neighbours(x);
        let mdd = nb.iter().filter(|&&i| self.labels[i] == Label::Mdd).count();
        let nc = nb.len() - mdd;
        Prediction {
            label: if mdd > nc { Label::Mdd } else { Label::Nc },
            score: mdd as f64 / nb.len() as f64,
        }
    }
}

//! Ridge-penalized logistic regression trained by full-batch gradient descent.
//!
//! Objective: mean negative log-likelihood + ridge·‖w‖², bias unpenalized.
//! Each iteration starts from a Barzilai-Borwein step length and backtracks
//! until the Armijo condition holds.

use ndarray::{Array1, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::check_training;
use crate::error::{Error, Result};
use crate::layout::Label;

const ARMIJO_C: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LrParams {
    pub ridge: f64,
    pub max_iter: usize,
    /// Stop once the gradient norm falls below this.
    pub grad_tol: f64,
}

impl Default for LrParams {
    fn default() -> Self {
        LrParams {
            ridge: 1e-8,
            max_iter: 1000,
            grad_tol: 1e-6,
        }
    }
}

impl LrParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::Config(format!("LR ridge must be >= 0, got {}", self.ridge)));
        }
        if self.max_iter == 0 || !(self.grad_tol > 0.0) {
            return Err(Error::Config("LR needs max_iter >= 1 and grad_tol > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub loss: f64,
    pub grad_norm: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Loss and gradient at `theta = [w..., b]` for 0/1 targets `y`.
pub fn objective(x: ArrayView2<f64>, y: &[f64], ridge: f64, theta: &[f64]) -> (f64, Vec<f64>) {
    let (n, d) = x.dim();
    let w = ArrayView1::from(&theta[..d]);
    let b = theta[d];
    let z = x.dot(&w) + b;
    let mut loss = 0.0;
    let mut resid = Array1::zeros(n);
    for i in 0..n {
        loss += softplus(z[i]) - y[i] * z[i];
        resid[i] = sigmoid(z[i]) - y[i];
    }
    let nf = n as f64;
    loss = loss / nf + ridge * w.dot(&w);
    let gw = x.t().dot(&resid) / nf + &w * (2.0 * ridge);
    let mut grad = gw.to_vec();
    grad.push(resid.sum() / nf);
    (loss, grad)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Trains from `init` (zeros when `None`).
pub fn fit(x: ArrayView2<f64>, y: &[Label], p: &LrParams, init: Option<&[f64]>) -> Result<LrModel> {
    p.validate()?;
    check_training(x, y, true)?;
    let d = x.ncols();
    let y01: Vec<f64> = y.iter().map(|l| l.as_index() as f64).collect();
    let mut theta = match init {
        Some(t) if t.len() != d + 1 => {
            return Err(Error::ArityMismatch {
                expected: d + 1,
                got: t.len(),
            })
        }
        Some(t) => t.to_vec(),
        None => vec![0.0; d + 1],
    };
    let (mut f, mut g) = objective(x, &y01, p.ridge, &theta);
    let mut step = 1.0;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut iterations = 0;

    while iterations < p.max_iter {
        let gg = dot(&g, &g);
        if gg.sqrt() < p.grad_tol {
            break;
        }
        if let Some((pt, pg)) = &prev {
            let s: Vec<f64> = theta.iter().zip(pt).map(|(a, b)| a - b).collect();
            let yv: Vec<f64> = g.iter().zip(pg).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &yv);
            if sy > 0.0 {
                step = (dot(&s, &s) / sy).clamp(1e-10, 1e10);
            }
        }
        let accepted = loop {
            let trial: Vec<f64> = theta.iter().zip(&g).map(|(t, gi)| t - step * gi).collect();
            let (ft, gt) = objective(x, &y01, p.ridge, &trial);
            if ft <= f - ARMIJO_C * step * gg {
                break Some((trial, ft, gt));
            }
            step *= 0.5;
            if step < MIN_STEP {
                break None;
            }
        };
        // A failed line search means no representable descent step remains.
        let Some((trial, ft, gt)) = accepted else { break };
        prev = Some((std::mem::replace(&mut theta, trial), std::mem::replace(&mut g, gt)));
        f = ft;
        iterations += 1;
    }

    if !f.is_finite() || theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalInstability("LR parameters diverged".into()));
    }
    let bias = theta.pop().unwrap();
    Ok(LrModel {
        weights: theta,
        bias,
        iterations,
        loss: f,
        grad_norm: dot(&g, &g).sqrt(),
    })
}

impl LrModel {
    pub fn score(&self, x: ArrayView1<f64>) -> f64 {
        sigmoid(ArrayView1::from(&self.weights[..]).dot(&x) + self.bias)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn overlapping(seed: u64, n: usize, d: usize) -> (Array2<f64>, Vec<Label>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<Label> = (0..n).map(|i| Label::from_index(i % 2)).collect();
        let x = Array2::from_shape_fn((n, d), |(i, j)| {
            let z: f64 = rng.sample(StandardNormal);
            z + if j == 0 { 0.8 * y[i].as_index() as f64 } else { 0.0 }
        });
        (x, y)
    }

    #[test]
    fn zero_parameters_score_one_half() {
        let m = LrModel {
            weights: vec![0.0; 3],
            bias: 0.0,
            iterations: 0,
            loss: 0.0,
            grad_norm: 0.0,
        };
        assert_eq!(m.score(array![5.0, -2.0, 1e9].view()), 0.5);
    }

    #[test]
    fn separable_toy_set_fits_exactly() {
        let x = array![[0.0, 0.0], [0.2, 0.5], [0.4, 0.1], [2.0, 2.0], [2.5, 1.8], [1.9, 2.6]];
        let y = [Label::Nc, Label::Nc, Label::Nc, Label::Mdd, Label::Mdd, Label::Mdd];
        let m = fit(x.view(), &y, &LrParams::default(), None).unwrap();
        for (row, &l) in x.rows().into_iter().zip(&y) {
            assert_eq!(m.score(row) > 0.5, l == Label::Mdd);
        }
    }

    #[test]
    fn two_initializations_reach_the_same_loss() {
        let (x, y) = overlapping(3, 200, 5);
        let p = LrParams::default();
        let a = fit(x.view(), &y, &p, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let init: Vec<f64> = (0..6).map(|_| rng.random_range(-3.0..3.0)).collect();
        let b = fit(x.view(), &y, &p, Some(&init)).unwrap();
        assert!(a.grad_norm < 1e-6 && b.grad_norm < 1e-6);
        assert!((a.loss - b.loss).abs() < 1e-6, "{} vs {}", a.loss, b.loss);
    }

    #[test]
    fn iteration_cap_is_honoured() {
        let (x, y) = overlapping(4, 60, 3);
        let p = LrParams {
            max_iter: 3,
            ..LrParams::default()
        };
        assert_eq!(fit(x.view(), &y, &p, None).unwrap().iterations, 3);
    }

    proptest! {
        // Oracle: central finite differences of the objective.
        #[test]
        fn gradient_matches_finite_differences(seed in 0u64..200, ridge in 0.0f64..0.5) {
            let (x, y) = overlapping(seed, 30, 4);
            let y01: Vec<f64> = y.iter().map(|l| l.as_index() as f64).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
            let theta: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
            let (_, g) = objective(x.view(), &y01, ridge, &theta);
            let h = 1e-6;
            for k in 0..5 {
                let mut up = theta.clone();
                let mut dn = theta.clone();
                up[k] += h;
                dn[k] -= h;
                let fd = (objective(x.view(), &y01, ridge, &up).0
                    - objective(x.view(), &y01, ridge, &dn).0) / (2.0 * h);
                let rel = (fd - g[k]).abs() / g[k].abs().max(1e-3);
                prop_assert!(rel < 1e-5, "component {k}: fd {fd} vs {}", g[k]);
            }
        }
    }
}

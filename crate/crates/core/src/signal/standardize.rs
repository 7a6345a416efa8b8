//! Per-column feature scaling, fitted on training rows only.

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::FeatureMatrix;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingMode {
    /// (x - mean) / sample std
    #[default]
    ZScore,
    /// Linear map of the training range onto [-1, 1].
    MinMax,
}

/// In `MinMax` mode `mean` holds the range midpoint and `std` the half-range,
/// so both modes apply as `(x - mean) / std`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub mode: ScalingMode,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub fn standardize_fit(train: &FeatureMatrix, mode: ScalingMode) -> Result<StandardizationParams> {
    fit_values(&train.values, mode)
}

pub(crate) fn fit_values(values: &Array2<f64>, mode: ScalingMode) -> Result<StandardizationParams> {
    let n = values.nrows();
    if n == 0 {
        return Err(Error::Schema("cannot fit scaling on an empty matrix".into()));
    }
    let mut mean = Vec::with_capacity(values.ncols());
    let mut std = Vec::with_capacity(values.ncols());
    for col in values.axis_iter(Axis(1)) {
        match mode {
            ScalingMode::ZScore => {
                let m = col.sum() / n as f64;
                let ss: f64 = col.iter().map(|v| (v - m) * (v - m)).sum();
                let constant = col.iter().all(|&v| v == col[0]);
                let sd = if n > 1 && !constant {
                    (ss / (n - 1) as f64).sqrt()
                } else {
                    0.0
                };
                mean.push(m);
                std.push(sd);
            }
            ScalingMode::MinMax => {
                let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                mean.push(0.5 * (lo + hi));
                std.push(0.5 * (hi - lo));
            }
        }
    }
    Ok(StandardizationParams { mode, mean, std })
}

pub fn standardize_apply(params: &StandardizationParams, m: &FeatureMatrix) -> Result<FeatureMatrix> {
    let values = apply_values(params, &m.values)?;
    Ok(FeatureMatrix { values, ..m.clone() })
}

pub(crate) fn apply_values(params: &StandardizationParams, values: &Array2<f64>) -> Result<Array2<f64>> {
    if values.ncols() != params.mean.len() {
        return Err(Error::ArityMismatch {
            expected: params.mean.len(),
            got: values.ncols(),
        });
    }
    let mut out = values.clone();
    for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
        let (m, sd) = (params.mean[j], params.std[j]);
        if sd > 0.0 {
            col.mapv_inplace(|v| (v - m) / sd);
        } else {
            col.fill(0.0);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::Label;
    use ndarray::array;

    fn matrix(values: Array2<f64>) -> FeatureMatrix {
        let n = values.nrows();
        let names = (0..values.ncols()).map(|j| format!("f{j}")).collect();
        FeatureMatrix::new(names, values, vec!["s".into(); n], vec![Label::Nc; n], (0..n).collect()).unwrap()
    }

    #[test]
    fn fit_mean_and_sample_std() {
        let p = standardize_fit(&matrix(array![[1.0], [2.0], [3.0]]), ScalingMode::ZScore).unwrap();
        assert_eq!(p.mean, vec![2.0]);
        assert_eq!(p.std, vec![1.0]);
        let out = standardize_apply(&p, &matrix(array![[2.0]])).unwrap();
        assert_eq!(out.values[[0, 0]], 0.0);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let p = standardize_fit(&matrix(array![[5.0], [5.0], [5.0]]), ScalingMode::ZScore).unwrap();
        assert_eq!(p.std, vec![0.0]);
        let out = standardize_apply(&p, &matrix(array![[9.0]])).unwrap();
        assert_eq!(out.values[[0, 0]], 0.0);
    }

    #[test]
    fn arity_mismatch() {
        let p = standardize_fit(&matrix(array![[1.0, 2.0], [3.0, 4.0]]), ScalingMode::ZScore).unwrap();
        assert!(matches!(
            standardize_apply(&p, &matrix(array![[1.0]])),
            Err(Error::ArityMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn minmax_maps_training_range_to_unit_interval() {
        let train = matrix(array![[0.0, 7.0], [10.0, 7.0], [5.0, 7.0]]);
        let p = standardize_fit(&train, ScalingMode::MinMax).unwrap();
        let out = standardize_apply(&p, &train).unwrap();
        assert_eq!(out.values.column(0).to_vec(), vec![-1.0, 1.0, 0.0]);
        assert_eq!(out.values.column(1).to_vec(), vec![0.0, 0.0, 0.0]);
    }

    // Oracle: recompute moments of the transformed matrix directly.
    #[test]
    fn fitted_matrix_has_zero_mean_unit_std() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut values = Array2::from_shape_fn((50, 6), |_| rng.random_range(-100.0..300.0));
        values.column_mut(3).fill(4.2);
        let m = matrix(values);
        let p = standardize_fit(&m, ScalingMode::ZScore).unwrap();
        let z = standardize_apply(&p, &m).unwrap();
        for (j, col) in z.values.axis_iter(Axis(1)).enumerate() {
            let n = col.len() as f64;
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            assert!(mean.abs() < 1e-9);
            if j == 3 {
                assert_eq!(var, 0.0);
            } else {
                assert!((var.sqrt() - 1.0).abs() < 1e-9);
            }
        }
        // Re-fitting the standardized matrix yields identity parameters.
        let p2 = standardize_fit(&z, ScalingMode::ZScore).unwrap();
        for j in 0..6 {
            assert!(p2.mean[j].abs() < 1e-9);
            if j != 3 {
                assert!((p2.std[j] - 1.0).abs() < 1e-9);
            }
        }
    }
}

//! Leave-one-subject-out cross-validation.

use std::collections::HashMap;

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use super::featureset::{FeatureSetSpec, FeatureSetTag};
use super::metrics::{metrics, Confusion, Metrics};
use crate::classify::{train, ModelSpec};
use crate::digest::config_digest;
use crate::error::{Error, Result, ResultExt};
use crate::layout::Label;
use crate::parallel::par_map;
use crate::selection::{select, LabeledTable, SelectionScope, SelectorConfig, SelectorKind};
use crate::signal::standardize::{apply_values, fit_values, ScalingMode, StandardizationParams};
use crate::signal::FeatureMatrix;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvOptions {
    pub scaling: ScalingMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochPrediction {
    pub epoch_index: usize,
    pub truth: Label,
    pub predicted: Label,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub subject: String,
    pub label: Label,
    pub n_train: usize,
    pub selected: Vec<String>,
    pub predictions: Vec<EpochPrediction>,
}

impl FoldResult {
    /// Majority of the epoch predictions; an even split goes to NC.
    pub fn subject_vote(&self) -> Label {
        let mdd = self.predictions.iter().filter(|p| p.predicted == Label::Mdd).count();
        if 2 * mdd > self.predictions.len() {
            Label::Mdd
        } else {
            Label::Nc
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub featureset: FeatureSetTag,
    pub n_columns: usize,
    pub selector: SelectorConfig,
    pub model: ModelSpec,
    pub options: CvOptions,
    pub folds: Vec<FoldResult>,
    /// Epoch-level, pooled over folds.
    pub confusion: Confusion,
    pub metrics: Metrics,
    /// One majority-vote prediction per subject.
    pub subject_confusion: Confusion,
    pub subject_metrics: Metrics,
    pub mean_selected: f64,
    pub config_digest: String,
}

/// Rows held out for one subject and the rows it trains on.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldPlan {
    pub subject: String,
    pub label: Label,
    pub test_rows: Vec<usize>,
    pub train_rows: Vec<usize>,
}

pub fn plan_folds(m: &FeatureMatrix) -> Result<Vec<FoldPlan>> {
    let groups = m.subject_groups();
    for class in [Label::Mdd, Label::Nc] {
        let n = groups.iter().filter(|g| g.1 == class).count();
        if n < 2 {
            return Err(Error::TooFewSubjects(format!(
                "leave-one-subject-out needs 2 {class} subjects, found {n}"
            )));
        }
    }
    Ok(groups
        .into_iter()
        .map(|(subject, label, test_rows)| {
            let train_rows = (0..m.n_rows()).filter(|r| m.subjects[*r] != subject).collect();
            FoldPlan {
                subject,
                label,
                test_rows,
                train_rows,
            }
        })
        .collect())
}

/// Training-fold parameters: scaling and the selected column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldFit {
    pub scaler: StandardizationParams,
    pub selected: Vec<usize>,
}

/// Indices into `names` of the features a selector keeps on this table.
fn run_selector(x: &Array2<f64>, labels: &[Label], names: &[String], sel: &SelectorConfig) -> Result<Vec<usize>> {
    if sel.method == SelectorKind::None {
        return Ok((0..names.len()).collect());
    }
    let t = LabeledTable::new(x.view(), labels, names)?;
    let result = select(&t, sel)?;
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    Ok(result.selected.iter().map(|n| index[n.as_str()]).collect())
}

/// Fits scaling on the training rows and, unless `fixed` supplies a
/// selection made elsewhere, runs the selector on the scaled training rows.
pub fn fit_fold(
    x: &Array2<f64>,
    labels: &[Label],
    names: &[String],
    train_rows: &[usize],
    sel: &SelectorConfig,
    opts: &CvOptions,
    fixed: Option<&[usize]>,
) -> Result<FoldFit> {
    let train = x.select(Axis(0), train_rows);
    let scaler = fit_values(&train, opts.scaling)?;
    let selected = match fixed {
        Some(s) => s.to_vec(),
        None => {
            let scaled = apply_values(&scaler, &train)?;
            let y: Vec<Label> = train_rows.iter().map(|&r| labels[r]).collect();
            run_selector(&scaled, &y, names, sel).context(format!("select ({})", sel.method))?
        }
    };
    Ok(FoldFit { scaler, selected })
}

type FoldOutcome = (Vec<String>, usize, Vec<Result<Vec<EpochPrediction>>>);

#[allow(clippy::too_many_arguments)]
fn run_fold(
    x: &Array2<f64>,
    m: &FeatureMatrix,
    names: &[String],
    plan: &FoldPlan,
    sel: &SelectorConfig,
    models: &[ModelSpec],
    opts: &CvOptions,
    fixed: Option<&[usize]>,
) -> Result<FoldOutcome> {
    let fit = fit_fold(x, &m.labels, names, &plan.train_rows, sel, opts, fixed)?;
    let scale_pick = |rows: &[usize]| -> Result<Array2<f64>> {
        Ok(apply_values(&fit.scaler, &x.select(Axis(0), rows))?.select(Axis(1), &fit.selected))
    };
    let xtr = scale_pick(&plan.train_rows)?;
    let xte = scale_pick(&plan.test_rows)?;
    let ytr: Vec<Label> = plan.train_rows.iter().map(|&r| m.labels[r]).collect();
    let per_model = models
        .iter()
        .map(|spec| {
            let model = train(spec, xtr.view(), &ytr).context(format!("train ({})", spec.kind()))?;
            let preds = model.predict_rows(xte.view())?;
            Ok(plan
                .test_rows
                .iter()
                .zip(preds)
                .map(|(&r, p)| EpochPrediction {
                    epoch_index: m.epoch_index[r],
                    truth: m.labels[r],
                    predicted: p.label,
                    score: p.score,
                })
                .collect())
        })
        .collect();
    let selected = fit.selected.iter().map(|&i| names[i].clone()).collect();
    Ok((selected, plan.train_rows.len(), per_model))
}

/// Cross-validates several models over one feature set and selector,
/// sharing each fold's scaling and selection between the models. The outer
/// error covers fold planning and selection; each model has its own result.
pub fn loso_cv_models(
    m: &FeatureMatrix,
    fs: &FeatureSetSpec,
    sel: &SelectorConfig,
    models: &[ModelSpec],
    opts: &CvOptions,
    workers: usize,
) -> Result<Vec<Result<CvReport>>> {
    for spec in models {
        spec.validate()?;
    }
    let plans = plan_folds(m)?;
    let cols: Vec<usize> = fs
        .columns
        .iter()
        .map(|n| {
            m.column_index(n)
                .ok_or_else(|| Error::Schema(format!("unknown feature {n}")))
        })
        .collect::<Result<_>>()?;
    let x = m.values.select(Axis(1), &cols);
    let names = &fs.columns;

    let global = if sel.scope == SelectionScope::Global && sel.method != SelectorKind::None {
        let all: Vec<usize> = (0..m.n_rows()).collect();
        Some(
            fit_fold(&x, &m.labels, names, &all, sel, opts, None)
                .context("global selection")?
                .selected,
        )
    } else {
        None
    };

    let outcomes = par_map(&plans, workers, |plan| {
        run_fold(&x, m, names, plan, sel, models, opts, global.as_deref())
            .with_context(|| format!("fold {}", plan.subject))
    });
    let outcomes: Vec<FoldOutcome> = outcomes.into_iter().collect::<Result<_>>()?;

    let mut by_model: Vec<Vec<Result<Vec<EpochPrediction>>>> = models.iter().map(|_| Vec::new()).collect();
    let mut meta = Vec::with_capacity(plans.len());
    for (selected, n_train, per_model) in outcomes {
        meta.push((selected, n_train));
        for (k, r) in per_model.into_iter().enumerate() {
            by_model[k].push(r);
        }
    }
    let reports = models
        .iter()
        .zip(by_model)
        .map(|(spec, results)| {
            let mut folds = Vec::with_capacity(plans.len());
            for ((plan, (selected, n_train)), r) in plans.iter().zip(&meta).zip(results) {
                folds.push(FoldResult {
                    subject: plan.subject.clone(),
                    label: plan.label,
                    n_train: *n_train,
                    selected: selected.clone(),
                    predictions: r.with_context(|| format!("fold {}", plan.subject))?,
                });
            }
            assemble(fs, sel, spec, opts, folds)
        })
        .collect();
    Ok(reports)
}

pub fn loso_cv(
    m: &FeatureMatrix,
    fs: &FeatureSetSpec,
    sel: &SelectorConfig,
    model: &ModelSpec,
    opts: &CvOptions,
    workers: usize,
) -> Result<CvReport> {
    loso_cv_models(m, fs, sel, std::slice::from_ref(model), opts, workers)?
        .pop()
        .expect("one model in, one report out")
}

fn assemble(
    fs: &FeatureSetSpec,
    sel: &SelectorConfig,
    spec: &ModelSpec,
    opts: &CvOptions,
    folds: Vec<FoldResult>,
) -> Result<CvReport> {
    let confusion = Confusion::from_pairs(
        folds
            .iter()
            .flat_map(|f| f.predictions.iter().map(|p| (p.truth, p.predicted))),
    );
    let subject_confusion = Confusion::from_pairs(folds.iter().map(|f| (f.label, f.subject_vote())));
    let mean_selected = folds.iter().map(|f| f.selected.len() as f64).sum::<f64>() / folds.len() as f64;
    let digest = config_digest(&serde_json::json!({
        "featureset": fs.tag,
        "columns": fs.columns,
        "selector": sel,
        "model": spec,
        "options": opts,
    }))?;
    Ok(CvReport {
        featureset: fs.tag,
        n_columns: fs.columns.len(),
        selector: sel.clone(),
        model: spec.clone(),
        options: opts.clone(),
        metrics: metrics(&confusion)?,
        subject_metrics: metrics(&subject_confusion)?,
        confusion,
        subject_confusion,
        folds,
        mean_selected,
        config_digest: digest,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::classify::{KnnParams, LrParams, ModelKind};
    use crate::selection::SelectorKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// `per_class` subjects per class, MDD first; column 0 shifts with the
    /// label by `signal`, the others are noise.
    pub(crate) fn toy(per_class: usize, epochs: usize, names: &[&str], signal: f64, seed: u64) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 * per_class * epochs;
        let labels: Vec<Label> = (0..n)
            .map(|r| if r / epochs < per_class { Label::Mdd } else { Label::Nc })
            .collect();
        let values = Array2::from_shape_fn((n, names.len()), |(r, j)| {
            let shift = if j == 0 {
                signal * labels[r].as_index() as f64
            } else {
                0.0
            };
            shift + rng.random_range(-1.0..1.0)
        });
        let subjects = (0..n).map(|r| format!("s{:02}", r / epochs)).collect();
        let idx = (0..n).map(|r| r % epochs).collect();
        FeatureMatrix::new(
            names.iter().map(|s| s.to_string()).collect(),
            values,
            subjects,
            labels,
            idx,
        )
        .unwrap()
    }

    fn all_columns(m: &FeatureMatrix) -> FeatureSetSpec {
        FeatureSetSpec {
            tag: FeatureSetTag::All,
            columns: m.names.clone(),
        }
    }

    fn none() -> SelectorConfig {
        SelectorConfig {
            method: SelectorKind::None,
            ..SelectorConfig::default()
        }
    }

    #[test]
    fn four_subjects_three_epochs() {
        let m = toy(2, 3, &["a", "b"], 3.0, 1);
        let r = loso_cv(
            &m,
            &all_columns(&m),
            &none(),
            &ModelSpec::Knn(KnnParams { k: 1 }),
            &CvOptions::default(),
            1,
        )
        .unwrap();
        assert_eq!(r.folds.len(), 4);
        assert!(r.folds.iter().all(|f| f.n_train == 9 && f.predictions.len() == 3));
        assert_eq!(r.confusion.total(), 12);
        assert_eq!(r.subject_confusion.total(), 4);
        assert!(r.folds.iter().all(|f| f.selected == m.names));
        assert_eq!(r.mean_selected, 2.0);
    }

    #[test]
    fn folds_partition_the_rows() {
        let m = toy(3, 4, &["a"], 1.0, 2);
        let plans = plan_folds(&m).unwrap();
        let mut seen = vec![0; m.n_rows()];
        for p in &plans {
            for &r in &p.test_rows {
                seen[r] += 1;
                assert_eq!(m.subjects[r], p.subject);
            }
            assert!(p.train_rows.iter().all(|&r| m.subjects[r] != p.subject));
            assert_eq!(p.train_rows.len() + p.test_rows.len(), m.n_rows());
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn too_few_subjects() {
        let m = toy(1, 3, &["a"], 1.0, 3);
        assert!(matches!(plan_folds(&m), Err(Error::TooFewSubjects(_))));
    }

    // Fold parameters must not move when the held-out subject's data does.
    #[test]
    fn held_out_subject_cannot_leak() {
        let names = ["a", "b", "c", "d"];
        let m = toy(6, 5, &names, 2.0, 4);
        let sel = SelectorConfig {
            method: SelectorKind::Relieff,
            n: 2,
            relieff_k: 3,
            ..SelectorConfig::default()
        };
        let cols: Vec<String> = m.names.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for plan in plan_folds(&m).unwrap() {
            let base = fit_fold(
                &m.values,
                &m.labels,
                &cols,
                &plan.train_rows,
                &sel,
                &CvOptions::default(),
                None,
            )
            .unwrap();
            let mut mutated = m.values.clone();
            for &r in &plan.test_rows {
                for v in mutated.row_mut(r) {
                    *v = rng.random_range(-1e3..1e3);
                }
            }
            let again = fit_fold(
                &mutated,
                &m.labels,
                &cols,
                &plan.train_rows,
                &sel,
                &CvOptions::default(),
                None,
            )
            .unwrap();
            assert_eq!(base, again);
        }
    }

    #[test]
    fn worker_count_does_not_change_reports() {
        let m = toy(3, 4, &["a", "b", "c"], 1.5, 6);
        let sel = SelectorConfig {
            method: SelectorKind::InfoGain,
            n: 2,
            ..SelectorConfig::default()
        };
        let models: Vec<ModelSpec> = ModelKind::ALL.iter().map(|k| k.default_spec()).collect();
        let fs = all_columns(&m);
        let a: Vec<CvReport> = loso_cv_models(&m, &fs, &sel, &models, &CvOptions::default(), 1)
            .unwrap()
            .into_iter()
            .map(|r| r.unwrap())
            .collect();
        let b: Vec<CvReport> = loso_cv_models(&m, &fs, &sel, &models, &CvOptions::default(), 3)
            .unwrap()
            .into_iter()
            .map(|r| r.unwrap())
            .collect();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn global_scope_selects_once() {
        let m = toy(4, 5, &["a", "b", "c", "d"], 2.0, 7);
        let sel = SelectorConfig {
            method: SelectorKind::Relieff,
            n: 2,
            relieff_k: 3,
            scope: SelectionScope::Global,
            ..SelectorConfig::default()
        };
        let r = loso_cv(
            &m,
            &all_columns(&m),
            &sel,
            &ModelSpec::Lr(LrParams::default()),
            &CvOptions::default(),
            1,
        )
        .unwrap();
        assert!(r.folds.windows(2).all(|w| w[0].selected == w[1].selected));
        assert!(r.folds[0].selected.contains(&"a".to_string()));
        assert!(r.metrics.accuracy > 0.8);
    }

    #[test]
    fn model_failure_is_reported_per_model() {
        let m = toy(2, 3, &["a"], 1.0, 8);
        let bad = ModelSpec::Knn(KnnParams { k: 0 });
        assert!(matches!(
            loso_cv(&m, &all_columns(&m), &none(), &bad, &CvOptions::default(), 1),
            Err(Error::Config(_))
        ));
    }
}

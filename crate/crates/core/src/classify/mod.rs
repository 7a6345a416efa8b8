//! Logistic regression, k-nearest neighbours, Gaussian naive Bayes and a
//! reduced-error-pruned decision tree behind one train/predict contract.

pub mod knn;
pub mod lr;
pub mod nb;
pub mod tree;

pub use knn::{KnnModel, KnnParams};
pub use lr::{LrModel, LrParams};
pub use nb::NbModel;
pub use tree::{DtParams, TreeModel};

use ndarray::{ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::Label;

pub const MODEL_SCHEMA: &str = "eegdep.model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "KNN")]
    Knn,
    #[serde(rename = "NB")]
    Nb,
    #[serde(rename = "DT")]
    Dt,
    #[serde(rename = "LR")]
    Lr,
}

impl ModelKind {
    /// Column order of the classifier comparison.
    pub const ALL: [ModelKind; 4] = [ModelKind::Knn, ModelKind::Nb, ModelKind::Dt, ModelKind::Lr];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Knn => "KNN",
            ModelKind::Nb => "NB",
            ModelKind::Dt => "DT",
            ModelKind::Lr => "LR",
        }
    }

    pub fn default_spec(self) -> ModelSpec {
        match self {
            ModelKind::Knn => ModelSpec::Knn(KnnParams::default()),
            ModelKind::Nb => ModelSpec::Nb,
            ModelKind::Dt => ModelSpec::Dt(DtParams::default()),
            ModelKind::Lr => ModelSpec::Lr(LrParams::default()),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A classifier kind with its hyperparameters, e.g. `{"kind": "KNN", "k": 3}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ModelSpec {
    #[serde(rename = "LR")]
    Lr(LrParams),
    #[serde(rename = "KNN")]
    Knn(KnnParams),
    #[serde(rename = "DT")]
    Dt(DtParams),
    #[serde(rename = "NB")]
    Nb,
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Lr(_) => ModelKind::Lr,
            ModelSpec::Knn(_) => ModelKind::Knn,
            ModelSpec::Dt(_) => ModelKind::Dt,
            ModelSpec::Nb => ModelKind::Nb,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::Lr(p) => p.validate(),
            ModelSpec::Knn(p) => p.validate(),
            ModelSpec::Dt(p) => p.validate(),
            ModelSpec::Nb => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TrainedModel {
    #[serde(rename = "LR")]
    Lr(LrModel),
    #[serde(rename = "KNN")]
    Knn(KnnModel),
    #[serde(rename = "DT")]
    Dt(TreeModel),
    #[serde(rename = "NB")]
    Nb(NbModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    /// Class-1 (MDD) probability, or the MDD vote fraction for KNN.
    pub score: f64,
}

impl Prediction {
    /// Scores above one half go to MDD; exact ties go to NC.
    pub(crate) fn from_score(score: f64) -> Self {
        let label = if score > 0.5 { Label::Mdd } else { Label::Nc };
        Prediction { label, score }
    }
}

/// Audit document wrapping a trained model with the spec that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub schema: String,
    pub version: u32,
    pub spec: ModelSpec,
    pub model: TrainedModel,
}

impl ModelDocument {
    pub fn new(spec: ModelSpec, model: TrainedModel) -> Self {
        ModelDocument {
            schema: MODEL_SCHEMA.into(),
            version: MODEL_VERSION,
            spec,
            model,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model documents always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(s).map_err(|e| Error::Schema(format!("model document: {e}")))?;
        if doc.schema != MODEL_SCHEMA || doc.version != MODEL_VERSION {
            return Err(Error::Schema(format!(
                "expected {MODEL_SCHEMA} v{MODEL_VERSION}, found {} v{}",
                doc.schema, doc.version
            )));
        }
        Ok(doc)
    }
}

fn check_training(x: ArrayView2<f64>, y: &[Label], need_both: bool) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.nrows(),
            right: y.len(),
        });
    }
    if let Some(((row, column), _)) = x.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFiniteFeature { row, column });
    }
    let needed = if need_both { 2 } else { 1 };
    if x.nrows() < needed {
        return Err(Error::InsufficientData {
            available: x.nrows(),
            needed,
        });
    }
    if need_both && y.iter().all(|&l| l == y[0]) {
        return Err(Error::SingleClassTraining);
    }
    Ok(())
}

pub fn train(spec: &ModelSpec, x: ArrayView2<f64>, y: &[Label]) -> Result<TrainedModel> {
    spec.validate()?;
    check_training(x, y, spec.kind() != ModelKind::Knn)?;
    Ok(match spec {
        ModelSpec::Lr(p) => TrainedModel::Lr(lr::fit(x, y, p, None)?),
        ModelSpec::Knn(p) => TrainedModel::Knn(KnnModel::fit(x, y, p)),
        ModelSpec::Dt(p) => TrainedModel::Dt(TreeModel::fit(x, y, p)),
        ModelSpec::Nb => TrainedModel::Nb(NbModel::fit(x, y)),
    })
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            TrainedModel::Lr(_) => ModelKind::Lr,
            TrainedModel::Knn(_) => ModelKind::Knn,
            TrainedModel::Dt(_) => ModelKind::Dt,
            TrainedModel::Nb(_) => ModelKind::Nb,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::Lr(m) => m.weights.len(),
            TrainedModel::Knn(m) => m.n_features,
            TrainedModel::Dt(m) => m.n_features,
            TrainedModel::Nb(m) => m.n_features(),
        }
    }

    pub fn predict(&self, x: ArrayView1<f64>) -> Result<Prediction> {
        if x.len() != self.n_features() {
            return Err(Error::ArityMismatch {
                expected: self.n_features(),
                got: x.len(),
            });
        }
        Ok(match self {
            TrainedModel::Lr(m) => Prediction::from_score(m.score(x)),
            TrainedModel::Knn(m) => m.predict(x),
            TrainedModel::Dt(m) => m.predict(x),
            TrainedModel::Nb(m) => Prediction::from_score(m.posteriors(x)[1]),
        })
    }

    pub fn predict_rows(&self, x: ArrayView2<f64>) -> Result<Vec<Prediction>> {
        x.rows().into_iter().map(|r| self.predict(r)).collect()
    }
}

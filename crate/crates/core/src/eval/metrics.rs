//! Confusion counts and the derived rates, with MDD as the positive class.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::Label;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub fp: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fn_ + self.tn + self.fp
    }

    pub fn record(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::Mdd, Label::Mdd) => self.tp += 1,
            (Label::Mdd, Label::Nc) => self.fn_ += 1,
            (Label::Nc, Label::Nc) => self.tn += 1,
            (Label::Nc, Label::Mdd) => self.fp += 1,
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Label, Label)>) -> Self {
        let mut c = Confusion::default();
        for (t, p) in pairs {
            c.record(t, p);
        }
        c
    }
}

/// A rate with an empty denominator is `None` (serialized as `null`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn metrics(c: &Confusion) -> Result<Metrics> {
    let total = c.total();
    if total == 0 {
        return Err(Error::EmptyConfusion);
    }
    Ok(Metrics {
        accuracy: (c.tp + c.tn) as f64 / total as f64,
        sensitivity: ratio(c.tp, c.tp + c.fn_),
        specificity: ratio(c.tn, c.tn + c.fp),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_examples() {
        let m = metrics(&Confusion {
            tp: 78,
            fn_: 22,
            tn: 90,
            fp: 10,
        })
        .unwrap();
        assert!((m.accuracy - 0.84).abs() < 1e-15);
        assert!((m.sensitivity.unwrap() - 0.78).abs() < 1e-15);
        assert!((m.specificity.unwrap() - 0.90).abs() < 1e-15);

        let perfect = metrics(&Confusion {
            tp: 3,
            fn_: 0,
            tn: 4,
            fp: 0,
        })
        .unwrap();
        assert_eq!(
            (perfect.accuracy, perfect.sensitivity, perfect.specificity),
            (1.0, Some(1.0), Some(1.0))
        );

        let no_pos = metrics(&Confusion {
            tp: 0,
            fn_: 0,
            tn: 4,
            fp: 1,
        })
        .unwrap();
        assert_eq!(no_pos.sensitivity, None);
        assert!(serde_json::to_string(&no_pos).unwrap().contains("\"sensitivity\":null"));
        assert!(matches!(metrics(&Confusion::default()), Err(Error::EmptyConfusion)));
    }

    #[test]
    fn recording_fills_the_right_cells() {
        let c = Confusion::from_pairs([
            (Label::Mdd, Label::Mdd),
            (Label::Mdd, Label::Nc),
            (Label::Nc, Label::Nc),
            (Label::Nc, Label::Nc),
            (Label::Nc, Label::Mdd),
        ]);
        assert_eq!(
            c,
            Confusion {
                tp: 1,
                fn_: 1,
                tn: 2,
                fp: 1
            }
        );
    }

    proptest! {
        #[test]
        fn accuracy_is_prevalence_weighted_rates(tp in 0usize..50, fn_ in 0usize..50, tn in 0usize..50, fp in 0usize..50) {
            prop_assume!(tp + fn_ > 0 && tn + fp > 0);
            let c = Confusion { tp, fn_, tn, fp };
            let m = metrics(&c).unwrap();
            let (p, n) = ((tp + fn_) as f64, (tn + fp) as f64);
            let mixed = (m.sensitivity.unwrap() * p + m.specificity.unwrap() * n) / (p + n);
            prop_assert!((m.accuracy - mixed).abs() < 1e-12);
        }
    }
}

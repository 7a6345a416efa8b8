//! Information-gain ranking over MDL-discretized features.

use super::discretize::{apply_cuts, mdl_discretize};
use super::info::Contingency;
use super::{check_binary, rank, LabeledTable, SelectionResult, SelectorConfig, SelectorKind};
use crate::error::Result;

/// IG(C, A) = H(C) − H(C|A) for every column, in column order.
pub fn info_gain_scores(t: &LabeledTable) -> Result<Vec<f64>> {
    check_binary(t)?;
    let classes = t.class_codes();
    (0..t.n_features())
        .map(|j| {
            let col = t.column(j);
            let codes = apply_cuts(&mdl_discretize(&col, &classes), &col);
            let table = Contingency::new(&codes, &classes)?;
            Ok((table.h_y() - table.h_y_given_x()).max(0.0))
        })
        .collect()
}

pub fn info_gain_rank(t: &LabeledTable, cfg: &SelectorConfig) -> Result<SelectionResult> {
    let scores = info_gain_scores(t)?;
    let ranked = rank(t.names, &scores);
    let cfg = SelectorConfig {
        method: SelectorKind::InfoGain,
        ..cfg.clone()
    };
    Ok(SelectionResult::from_ranking(
        SelectorKind::InfoGain,
        ranked,
        cfg.n,
        cfg,
    ))
}

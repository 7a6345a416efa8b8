//! Leave-one-subject-out evaluation, the feature-set grid, group statistics
//! and the hemisphere census of connectivity edges.

pub mod census;
pub mod cv;
pub mod featureset;
pub mod grid;
pub mod metrics;
pub mod stats;

pub use census::{edge_census, pli_edges, CensusCounts, EdgeCategory, EdgeCensus};
pub use cv::{
    fit_fold, loso_cv, loso_cv_models, plan_folds, CvOptions, CvReport, EpochPrediction, FoldFit, FoldResult,
};
pub use featureset::{block_of, Block, FeatureSetSpec, FeatureSetTag};
pub use grid::{grid_evaluate, GridCell, GridConfig, GridReport, MeanSd};
pub use metrics::{metrics, Confusion, Metrics};
pub use stats::{group_ttest, group_ttest_at, welch, GroupStats, StatsLevel, DEFAULT_ALPHA};

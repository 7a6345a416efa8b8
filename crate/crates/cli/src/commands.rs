//! One function per pipeline stage. Each reads its inputs, delegates to the
//! library and writes self-describing outputs into the output directory.

use std::path::{Path, PathBuf};

use eegdep::data::{load_epochs_csv, load_feature_csv, save_dataset, save_feature_csv, synth_dataset, CsvMeta};
use eegdep::error::ErrorClass;
use eegdep::eval::{edge_census, grid_evaluate, group_ttest_at, loso_cv_models, pli_edges, GridConfig};
use eegdep::extract::extract_features;
use eegdep::selection::{select, LabeledTable, RankedFeature, SelectionResult, SelectorKind};
use eegdep::signal::FeatureMatrix;
use eegdep::Error;
use serde::Serialize;

use crate::config::{DatasetSource, EvalMode, PipelineConfig};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const FORMAT_VERSION: u32 = 1;

pub const DATASET_FILE: &str = "dataset.csv";
pub const FEATURES_FILE: &str = "features.csv";
pub const SELECTION_FILE: &str = "selection.json";
pub const EVAL_FILE: &str = "eval.json";
pub const GRID_CSV: &str = "grid.csv";
pub const GRID_JSON: &str = "grid.json";
pub const STATS_CSV: &str = "stats.csv";
pub const CENSUS_JSON: &str = "census.json";

/// A library error tagged with the operation that raised it.
#[derive(Debug)]
pub struct CliError {
    pub operation: String,
    pub error: Error,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self.error.class() {
            ErrorClass::Config => 2,
            ErrorClass::Data => 3,
            ErrorClass::Numeric => 4,
        }
    }

    pub fn report(&self, command: &str) -> serde_json::Value {
        let class = match self.error.class() {
            ErrorClass::Config => "config",
            ErrorClass::Data => "data",
            ErrorClass::Numeric => "numeric",
        };
        serde_json::json!({
            "error": {
                "command": command,
                "operation": self.operation,
                "class": class,
                "kind": self.error.kind(),
                "message": self.error.to_string(),
                "exit_code": self.exit_code(),
            }
        })
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

trait Op<T> {
    fn op(self, operation: &str) -> CliResult<T>;
}

impl<T> Op<T> for eegdep::Result<T> {
    fn op(self, operation: &str) -> CliResult<T> {
        self.map_err(|error| CliError {
            operation: operation.to_string(),
            error,
        })
    }
}

/// Resolved configuration plus run-time settings that do not affect results.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: PipelineConfig,
    pub digest: String,
    pub out: PathBuf,
    pub workers: usize,
}

impl Context {
    pub fn new(config: PipelineConfig, workers: usize) -> CliResult<Self> {
        let config = config.resolved().op("cli::resolve_config")?;
        let digest = config.digest().op("cli::config_digest")?;
        Ok(Context {
            out: config.out_dir.clone(),
            config,
            digest,
            workers: workers.max(1),
        })
    }

    fn path(&self, file: &str) -> PathBuf {
        self.out.join(file)
    }

    fn meta(&self, schema: &str) -> CsvMeta {
        let mut m = CsvMeta::new();
        m.insert("schema".into(), schema.into());
        m.insert("version".into(), FORMAT_VERSION.to_string());
        m.insert("tool_version".into(), TOOL_VERSION.into());
        m.insert("config_digest".into(), self.digest.clone());
        m
    }

    fn comment_header(&self, schema: &str) -> String {
        self.meta(schema).iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
    }

    fn prepare_out(&self) -> CliResult<()> {
        std::fs::create_dir_all(&self.out)
            .map_err(Error::from)
            .op("cli::create_out_dir")
    }

    fn write_text(&self, file: &str, text: &str) -> CliResult<PathBuf> {
        self.prepare_out()?;
        let p = self.path(file);
        std::fs::write(&p, text).map_err(Error::from).op("cli::write_output")?;
        Ok(p)
    }

    fn write_json<T: Serialize>(&self, file: &str, schema: &str, result: &T) -> CliResult<PathBuf> {
        let doc = serde_json::json!({
            "schema": schema,
            "version": FORMAT_VERSION,
            "tool_version": TOOL_VERSION,
            "config_digest": self.digest,
            "result": result,
        });
        let mut text = serde_json::to_string_pretty(&doc)
            .map_err(|e| Error::Schema(e.to_string()))
            .op("cli::write_output")?;
        text.push('\n');
        self.write_text(file, &text)
    }
}

fn require_file(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::Config(format!("input file {} does not exist", path.display()))).op("cli::resolve_input")
    }
}

pub fn synth(ctx: &Context) -> CliResult<PathBuf> {
    let DatasetSource::Synth(cfg) = &ctx.config.dataset else {
        return Err(Error::Config(
            "dataset source is a file; there is nothing to synthesize".into(),
        ))
        .op("cli::synth");
    };
    let ds = synth_dataset(cfg).op("data-io::synth_dataset")?;
    ctx.prepare_out()?;
    let p = ctx.path(DATASET_FILE);
    save_dataset(&p, &ds, &ctx.meta("eegdep.epochs")).op("data-io::save_dataset")?;
    Ok(p)
}

/// The epoch file `extract` reads when none is given explicitly.
pub fn default_dataset_path(ctx: &Context) -> PathBuf {
    match &ctx.config.dataset {
        DatasetSource::File { path } => path.clone(),
        DatasetSource::Synth(_) => ctx.path(DATASET_FILE),
    }
}

pub fn extract(ctx: &Context, input: Option<&Path>) -> CliResult<(PathBuf, FeatureMatrix)> {
    let input = input
        .map(Path::to_path_buf)
        .unwrap_or_else(|| default_dataset_path(ctx));
    require_file(&input)?;
    let ds = load_epochs_csv(&input).op("data-io::load_epochs_csv")?;
    let fm = extract_features(&ds, &ctx.config.extract, ctx.workers).op("features::extract_features")?;
    ctx.prepare_out()?;
    let p = ctx.path(FEATURES_FILE);
    save_feature_csv(&p, &fm, &ctx.meta("eegdep.features")).op("data-io::save_feature_csv")?;
    Ok((p, fm))
}

pub fn load_features(ctx: &Context, input: Option<&Path>) -> CliResult<FeatureMatrix> {
    let input = input.map(Path::to_path_buf).unwrap_or_else(|| ctx.path(FEATURES_FILE));
    require_file(&input)?;
    let (fm, _) = load_feature_csv(&input).op("data-io::load_feature_csv")?;
    Ok(fm)
}

fn featureset_matrix(ctx: &Context, fm: &FeatureMatrix) -> CliResult<FeatureMatrix> {
    let spec = ctx
        .config
        .eval
        .featureset
        .resolve(&fm.names)
        .op("evaluation::resolve_featureset")?;
    fm.select_named(&spec.columns).op("evaluation::resolve_featureset")
}

/// Runs the configured selector once over every row of the configured feature set.
pub fn select_features(ctx: &Context, fm: &FeatureMatrix) -> CliResult<(PathBuf, SelectionResult)> {
    let m = featureset_matrix(ctx, fm)?;
    let cfg = &ctx.config.selector;
    let result = if cfg.method == SelectorKind::None {
        SelectionResult {
            method: SelectorKind::None,
            n_selected: m.n_cols(),
            ranked: Vec::<RankedFeature>::new(),
            selected: m.names.clone(),
            config: cfg.clone(),
        }
    } else {
        select(&LabeledTable::from_matrix(&m), cfg).op("feature-selection::select")?
    };
    let p = ctx.write_json(SELECTION_FILE, "eegdep.selection", &result)?;
    Ok((p, result))
}

pub fn eval(ctx: &Context, fm: &FeatureMatrix) -> CliResult<(PathBuf, Vec<eegdep::eval::CvReport>)> {
    let e = &ctx.config.eval;
    let spec = e.featureset.resolve(&fm.names).op("evaluation::resolve_featureset")?;
    let results = loso_cv_models(
        fm,
        &spec,
        &ctx.config.selector,
        &ctx.config.models,
        &e.options,
        ctx.workers,
    )
    .op("evaluation::loso_cv")?;
    let reports = results
        .into_iter()
        .collect::<eegdep::Result<Vec<_>>>()
        .op("evaluation::loso_cv")?;
    let p = ctx.write_json(EVAL_FILE, "eegdep.cv_reports", &reports)?;
    Ok((p, reports))
}

pub fn grid(ctx: &Context, fm: &FeatureMatrix) -> CliResult<(Vec<PathBuf>, eegdep::eval::GridReport)> {
    let e = &ctx.config.eval;
    let cfg = GridConfig {
        featuresets: e.grid.featuresets.clone(),
        selectors: e.grid.selectors.clone(),
        models: ctx.config.models.clone(),
        selector: ctx.config.selector.clone(),
        options: e.options.clone(),
    };
    let report = grid_evaluate(fm, &cfg, ctx.workers).op("evaluation::grid_evaluate")?;
    let csv = ctx.comment_header("eegdep.grid_table") + &report.table_csv();
    let a = ctx.write_text(GRID_CSV, &csv)?;
    let b = ctx.write_json(GRID_JSON, "eegdep.grid", &report)?;
    Ok((vec![a, b], report))
}

#[derive(Debug, Clone, Serialize)]
pub struct StatsCensus {
    pub alpha: f64,
    pub divisor: usize,
    pub threshold: f64,
    /// Census of the PLI edges that pass the corrected threshold.
    pub significant_edges: eegdep::eval::EdgeCensus,
}

pub fn stats(ctx: &Context, fm: &FeatureMatrix) -> CliResult<(Vec<PathBuf>, eegdep::eval::GroupStats)> {
    let e = &ctx.config.eval;
    let gs = group_ttest_at(fm, e.stats_level, e.alpha, e.bonferroni_divisor).op("evaluation::group_ttest")?;
    let census = edge_census(&pli_edges(&gs.significant_names())).op("evaluation::edge_census")?;
    let csv = ctx.comment_header("eegdep.group_stats") + &gs.to_csv();
    let a = ctx.write_text(STATS_CSV, &csv)?;
    let b = ctx.write_json(
        CENSUS_JSON,
        "eegdep.edge_census",
        &StatsCensus {
            alpha: gs.alpha,
            divisor: gs.divisor,
            threshold: gs.threshold,
            significant_edges: census,
        },
    )?;
    Ok((vec![a, b], gs))
}

/// Every stage in order: synthesize (for synthetic sources), extract, select,
/// then the configured evaluation mode.
pub fn run(ctx: &Context) -> CliResult<Vec<PathBuf>> {
    let mut written = Vec::new();
    if matches!(ctx.config.dataset, DatasetSource::Synth(_)) {
        written.push(synth(ctx)?);
    }
    let (p, fm) = extract(ctx, None)?;
    written.push(p);
    written.push(select_features(ctx, &fm)?.0);
    match ctx.config.eval.mode {
        EvalMode::Single => written.push(eval(ctx, &fm)?.0),
        EvalMode::Grid => written.extend(grid(ctx, &fm)?.0),
        EvalMode::Stats => written.extend(stats(ctx, &fm)?.0),
    }
    Ok(written)
}

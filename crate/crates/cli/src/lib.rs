//! Configuration and stage commands behind the `eegdep` binary.

pub mod commands;
pub mod config;

pub use commands::{CliError, Context};
pub use config::{DatasetSource, EvalMode, PipelineConfig};

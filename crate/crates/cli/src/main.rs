use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eegdep::Error;
use eegdep_cli::commands::{self, CliError, Context};
use eegdep_cli::PipelineConfig;

#[derive(Parser)]
#[command(name = "eegdep", version, about = "EEG depression-recognition pipeline")]
struct Cli {
    /// Pipeline configuration (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic epoch dataset.
    Synth,
    /// Extract the feature matrix from an epoch CSV.
    Extract {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Rank and select features over every row.
    Select {
        #[arg(long)]
        features: Option<PathBuf>,
    },
    /// Leave-one-subject-out evaluation of each configured model.
    Eval {
        #[arg(long)]
        features: Option<PathBuf>,
    },
    /// Feature set x selector x classifier grid.
    Grid {
        #[arg(long)]
        features: Option<PathBuf>,
    },
    /// Per-feature group t-tests and the census of significant edges.
    Stats {
        #[arg(long)]
        features: Option<PathBuf>,
    },
    /// All stages in order, ending with the configured evaluation mode.
    Run,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Synth => "synth",
            Command::Extract { .. } => "extract",
            Command::Select { .. } => "select",
            Command::Eval { .. } => "eval",
            Command::Grid { .. } => "grid",
            Command::Stats { .. } => "stats",
            Command::Run => "run",
        }
    }
}

fn context(cli: &Cli) -> Result<Context, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p).map_err(|error| CliError {
            operation: "cli::load_config".into(),
            error,
        })?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    if cli.workers == 0 {
        return Err(CliError {
            operation: "cli::parse_args".into(),
            error: Error::Config("--workers must be at least 1".into()),
        });
    }
    Context::new(cfg, cli.workers)
}

fn execute(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let ctx = context(cli)?;
    Ok(match &cli.command {
        Command::Synth => vec![commands::synth(&ctx)?],
        Command::Extract { input } => vec![commands::extract(&ctx, input.as_deref())?.0],
        Command::Select { features } => {
            let fm = commands::load_features(&ctx, features.as_deref())?;
            vec![commands::select_features(&ctx, &fm)?.0]
        }
        Command::Eval { features } => {
            let fm = commands::load_features(&ctx, features.as_deref())?;
            let (p, reports) = commands::eval(&ctx, &fm)?;
            for r in &reports {
                println!(
                    "{} {}+{}: epoch accuracy {:.4}, subject accuracy {:.4}",
                    r.model.kind().as_str(),
                    r.featureset.as_str(),
                    r.selector.method,
                    r.metrics.accuracy,
                    r.subject_metrics.accuracy
                );
            }
            vec![p]
        }
        Command::Grid { features } => {
            let fm = commands::load_features(&ctx, features.as_deref())?;
            let (ps, report) = commands::grid(&ctx, &fm)?;
            print!("{}", report.table_csv());
            ps
        }
        Command::Stats { features } => {
            let fm = commands::load_features(&ctx, features.as_deref())?;
            let (ps, gs) = commands::stats(&ctx, &fm)?;
            println!(
                "{} of {} features significant at p < {:e}",
                gs.significant_names().len(),
                gs.features.len(),
                gs.threshold
            );
            ps
        }
        Command::Run => commands::run(&ctx)?,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.report(cli.command.name()));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

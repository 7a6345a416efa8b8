use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by the command-line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Data,
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid band: lo={lo} Hz, hi={hi} Hz, fs={fs} Hz (need 0 < lo < hi < fs/2)")]
    InvalidBand { lo: f64, hi: f64, fs: f64 },

    #[error("signal too short: {len} samples, need {needed}")]
    SignalTooShort { len: usize, needed: usize },

    #[error("insufficient data: recording has {available} samples per channel, need {needed}")]
    InsufficientData { available: usize, needed: usize },

    #[error("arity mismatch: expected {expected} columns, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse { row: u64, column: String, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("too few instances: class {class} has {count}, need more than {k}")]
    TooFewInstances { class: String, count: usize, k: usize },

    #[error("missing correlation for feature pair ({0}, {1})")]
    MissingCorrelation(usize, usize),

    #[error("training data holds a single class")]
    SingleClassTraining,

    #[error("non-finite feature value at row {row}, column {column}")]
    NonFiniteFeature { row: usize, column: usize },

    #[error("empty confusion table")]
    EmptyConfusion,

    #[error("too few subjects: {0}")]
    TooFewSubjects(String),

    #[error("unknown channel: {0}")]
    UnknownChannel(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Innermost error, skipping context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self.root() {
            Error::Config(_) | Error::InvalidBand { .. } => ErrorClass::Config,
            Error::DegenerateSignal(_)
            | Error::NumericalInstability(_)
            | Error::InvalidDistribution(_)
            | Error::MissingCorrelation(..)
            | Error::NonFiniteFeature { .. } => ErrorClass::Numeric,
            _ => ErrorClass::Data,
        }
    }

    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self.root() {
            Error::InvalidBand { .. } => "InvalidBand",
            Error::SignalTooShort { .. } => "SignalTooShort",
            Error::InsufficientData { .. } => "InsufficientData",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::DegenerateSignal(_) => "DegenerateSignal",
            Error::NumericalInstability(_) => "NumericalInstability",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::Parse { .. } => "ParseError",
            Error::Schema(_) => "SchemaError",
            Error::Config(_) => "ConfigError",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::TooFewInstances { .. } => "TooFewInstances",
            Error::MissingCorrelation(..) => "MissingCorrelation",
            Error::SingleClassTraining => "SingleClassTraining",
            Error::NonFiniteFeature { .. } => "NonFiniteFeature",
            Error::EmptyConfusion => "EmptyConfusion",
            Error::TooFewSubjects(_) => "TooFewSubjects",
            Error::UnknownChannel(_) => "UnknownChannel",
            Error::Io(_) => "Io",
            Error::Context { .. } => unreachable!("root() strips context"),
        }
    }
}

pub trait ResultExt<T> {
    fn context<C: Into<String>>(self, context: C) -> Result<T>;
    fn with_context<C: Into<String>, F: FnOnce() -> C>(self, f: F) -> Result<T>;
}

impl<T> ResultExt<T> for Result<T> {
    fn context<C: Into<String>>(self, context: C) -> Result<T> {
        self.map_err(|e| Error::Context {
            context: context.into(),
            source: Box::new(e),
        })
    }

    fn with_context<C: Into<String>, F: FnOnce() -> C>(self, f: F) -> Result<T> {
        self.map_err(|e| Error::Context {
            context: f().into(),
            source: Box::new(e),
        })
    }
}

//! EEG depression-recognition pipeline: linear, nonlinear and phase-lag-index
//! features, three feature selectors, four classifiers, leave-one-subject-out
//! evaluation and group statistics.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod connectivity;
pub mod data;
pub mod digest;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod extract;
pub mod features;
pub mod layout;
pub mod parallel;
pub mod selection;
pub mod signal;

pub use error::{Error, Result};
pub use layout::{ChannelLayout, Hemisphere, Label};

//! The 16-electrode montage and diagnostic labels.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const N_CHANNELS: usize = 16;

/// Canonical channel order. Feature indices depend on it.
pub const CHANNELS: [&str; N_CHANNELS] = [
    "Fp1", "Fp2", "F3", "F4", "C3", "C4", "P3", "P4", "O1", "O2", "F7", "F8", "T3", "T4", "T5", "T6",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Hemisphere {
    Left,
    Right,
}

/// Diagnostic class. `Mdd` is the positive class throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "MDD")]
    Mdd,
    #[serde(rename = "NC")]
    Nc,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Mdd
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Mdd => "MDD",
            Label::Nc => "NC",
        }
    }

    /// 1 for MDD, 0 for NC.
    pub fn as_index(self) -> usize {
        match self {
            Label::Mdd => 1,
            Label::Nc => 0,
        }
    }

    pub fn from_index(i: usize) -> Label {
        if i == 1 {
            Label::Mdd
        } else {
            Label::Nc
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "MDD" => Ok(Label::Mdd),
            "NC" => Ok(Label::Nc),
            other => Err(Error::Schema(format!("label must be MDD or NC, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelLayout {
    names: Vec<String>,
    hemispheres: Vec<Hemisphere>,
}

impl Default for ChannelLayout {
    fn default() -> Self {
        Self::canonical()
    }
}

impl ChannelLayout {
    pub fn canonical() -> Self {
        let names: Vec<String> = CHANNELS.iter().map(|s| s.to_string()).collect();
        let hemispheres = CHANNELS.iter().map(|n| hemisphere_of(n)).collect();
        ChannelLayout { names, hemispheres }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn hemisphere(&self, idx: usize) -> Hemisphere {
        self.hemispheres[idx]
    }

    /// Case-insensitive lookup (`FP1` and `Fp1` both resolve).
    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n.eq_ignore_ascii_case(name.trim()))
            .ok_or_else(|| Error::UnknownChannel(name.to_string()))
    }

    pub fn channels_in(&self, hemisphere: Hemisphere) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.hemispheres[i] == hemisphere).collect()
    }
}

// Odd electrode suffix = left, even = right.
fn hemisphere_of(name: &str) -> Hemisphere {
    let digit = name
        .chars()
        .rev()
        .find_map(|c| c.to_digit(10))
        .expect("canonical channel names end in a digit");
    if digit % 2 == 1 {
        Hemisphere::Left
    } else {
        Hemisphere::Right
    }
}

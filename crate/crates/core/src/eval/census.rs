//! Hemisphere census of connectivity edges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{ChannelLayout, Hemisphere};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeCategory {
    IntraLeft,
    IntraRight,
    Inter,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusCounts {
    pub intra_left: usize,
    pub intra_right: usize,
    pub inter: usize,
}

impl CensusCounts {
    pub fn intra(&self) -> usize {
        self.intra_left + self.intra_right
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeCensus {
    pub intra_left: Vec<String>,
    pub intra_right: Vec<String>,
    pub inter: Vec<String>,
    pub counts: CensusCounts,
}

/// Endpoints of `A-B`, optionally prefixed `pli:`; channel case is ignored.
fn endpoints(edge: &str, layout: &ChannelLayout) -> Result<(usize, usize)> {
    let body = edge.trim().strip_prefix("pli:").unwrap_or(edge.trim());
    let (a, b) = body
        .split_once('-')
        .ok_or_else(|| Error::UnknownChannel(format!("edge {edge:?} is not of the form A-B")))?;
    Ok((layout.index_of(a)?, layout.index_of(b)?))
}

pub fn categorize(edge: &str, layout: &ChannelLayout) -> Result<EdgeCategory> {
    let (a, b) = endpoints(edge, layout)?;
    Ok(match (layout.hemisphere(a), layout.hemisphere(b)) {
        (Hemisphere::Left, Hemisphere::Left) => EdgeCategory::IntraLeft,
        (Hemisphere::Right, Hemisphere::Right) => EdgeCategory::IntraRight,
        _ => EdgeCategory::Inter,
    })
}

pub fn edge_census<S: AsRef<str>>(edges: &[S]) -> Result<EdgeCensus> {
    let layout = ChannelLayout::canonical();
    let mut out = EdgeCensus {
        intra_left: Vec::new(),
        intra_right: Vec::new(),
        inter: Vec::new(),
        counts: CensusCounts::default(),
    };
    for e in edges {
        let e = e.as_ref();
        let list = match categorize(e, &layout)? {
            EdgeCategory::IntraLeft => &mut out.intra_left,
            EdgeCategory::IntraRight => &mut out.intra_right,
            EdgeCategory::Inter => &mut out.inter,
        };
        list.push(e.to_string());
    }
    out.counts = CensusCounts {
        intra_left: out.intra_left.len(),
        intra_right: out.intra_right.len(),
        inter: out.inter.len(),
    };
    Ok(out)
}

/// The `pli:` names among `names`.
pub fn pli_edges<S: AsRef<str>>(names: &[S]) -> Vec<String> {
    names
        .iter()
        .map(|n| n.as_ref())
        .filter(|n| n.starts_with("pli:"))
        .map(str::to_string)
        .collect()
}

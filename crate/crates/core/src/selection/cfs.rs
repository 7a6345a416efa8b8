//! Correlation-based feature selection with a greedy forward search.
//!
//! Correlations are symmetrical uncertainties between MDL-discretized
//! features and the class, or between two discretized features.

use std::collections::HashMap;

use super::discretize::{apply_cuts, mdl_discretize};
use super::info::symmetrical_uncertainty;
use super::{check_binary, rank, LabeledTable, SelectionResult, SelectorConfig, SelectorKind};
use crate::error::{Error, Result};

/// Lazily filled SU values. In `MissingCorrelation` errors the index equal to
/// the feature count stands for the class.
#[derive(Debug, Clone)]
pub struct SuCache {
    codes: Vec<Vec<usize>>,
    class: Vec<usize>,
    class_su: Vec<Option<f64>>,
    pair_su: HashMap<(usize, usize), f64>,
}

fn key(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

impl SuCache {
    /// Discretizes every column against the class.
    pub fn new(t: &LabeledTable) -> Result<Self> {
        check_binary(t)?;
        let class = t.class_codes();
        let codes = (0..t.n_features())
            .map(|j| {
                let col = t.column(j);
                apply_cuts(&mdl_discretize(&col, &class), &col)
            })
            .collect();
        Ok(SuCache::from_codes(codes, class))
    }

    pub fn from_codes(codes: Vec<Vec<usize>>, class: Vec<usize>) -> Self {
        let d = codes.len();
        SuCache {
            codes,
            class,
            class_su: vec![None; d],
            pair_su: HashMap::new(),
        }
    }

    /// A cache with no data behind it; values must be inserted by hand.
    pub fn empty(n_features: usize) -> Self {
        SuCache::from_codes(vec![Vec::new(); n_features], Vec::new())
    }

    pub fn n_features(&self) -> usize {
        self.class_su.len()
    }

    pub fn insert_class(&mut self, i: usize, su: f64) {
        self.class_su[i] = Some(su);
    }

    pub fn insert_pair(&mut self, i: usize, j: usize, su: f64) {
        self.pair_su.insert(key(i, j), su);
    }

    pub fn get_class(&self, i: usize) -> Option<f64> {
        self.class_su.get(i).copied().flatten()
    }

    pub fn get_pair(&self, i: usize, j: usize) -> Option<f64> {
        self.pair_su.get(&key(i, j)).copied()
    }

    fn has_data(&self, i: usize) -> bool {
        !self.codes[i].is_empty() && self.codes[i].len() == self.class.len()
    }

    pub fn class_su(&mut self, i: usize) -> Result<f64> {
        if let Some(v) = self.get_class(i) {
            return Ok(v);
        }
        if !self.has_data(i) {
            return Err(Error::MissingCorrelation(i, self.n_features()));
        }
        let v = symmetrical_uncertainty(&self.codes[i], &self.class)?;
        self.class_su[i] = Some(v);
        Ok(v)
    }

    pub fn pair_su(&mut self, i: usize, j: usize) -> Result<f64> {
        if let Some(v) = self.get_pair(i, j) {
            return Ok(v);
        }
        if !self.has_data(i) || !self.has_data(j) {
            return Err(Error::MissingCorrelation(i, j));
        }
        let (a, b) = key(i, j);
        let v = symmetrical_uncertainty(&self.codes[a], &self.codes[b])?;
        self.pair_su.insert((a, b), v);
        Ok(v)
    }
}

/// k·r̄_cf / sqrt(k + k(k−1)·r̄_ff), reading only values already in the cache.
pub fn cfs_merit(subset: &[usize], cache: &SuCache) -> Result<f64> {
    let k = subset.len();
    if k == 0 {
        return Err(Error::Config("CFS merit of an empty subset".into()));
    }
    let mut cf = 0.0;
    for &i in subset {
        cf += cache
            .get_class(i)
            .ok_or(Error::MissingCorrelation(i, cache.n_features()))?;
    }
    let mut ff = 0.0;
    for (a, &i) in subset.iter().enumerate() {
        for &j in &subset[a + 1..] {
            ff += cache.get_pair(i, j).ok_or(Error::MissingCorrelation(i, j))?;
        }
    }
    let kf = k as f64;
    let r_cf = cf / kf;
    let r_ff = if k > 1 { ff / (kf * (kf - 1.0) / 2.0) } else { 0.0 };
    Ok(kf * r_cf / (kf + kf * (kf - 1.0) * r_ff).sqrt())
}

/// Features in order of addition with the merit reached at each step. Stops
/// when no remaining feature strictly improves the merit.
pub fn cfs_greedy_trace(cache: &mut SuCache, names: &[String]) -> Result<Vec<(usize, f64)>> {
    let d = cache.n_features();
    if names.len() != d {
        return Err(Error::ArityMismatch {
            expected: d,
            got: names.len(),
        });
    }
    let mut in_set = vec![false; d];
    // Running sums: Σ SU(f, class) over the subset, Σ pairwise SU inside the
    // subset, and per candidate Σ SU(candidate, member).
    let (mut sum_cf, mut sum_ff) = (0.0, 0.0);
    let mut ff_with = vec![0.0; d];
    let mut current = 0.0;
    let mut trace = Vec::new();

    loop {
        let k = (trace.len() + 1) as f64;
        let mut best: Option<(f64, usize)> = None;
        for f in (0..d).filter(|&f| !in_set[f]) {
            let cf = cache.class_su(f)?;
            let merit = (sum_cf + cf) / (k + 2.0 * (sum_ff + ff_with[f])).sqrt();
            let better = match best {
                None => true,
                Some((m, b)) => merit > m || (merit == m && names[f] < names[b]),
            };
            if better {
                best = Some((merit, f));
            }
        }
        let Some((merit, f)) = best else { break };
        if merit <= current {
            break;
        }
        in_set[f] = true;
        sum_cf += cache.class_su(f)?;
        sum_ff += ff_with[f];
        for g in (0..d).filter(|&g| !in_set[g]) {
            ff_with[g] += cache.pair_su(g, f)?;
        }
        current = merit;
        trace.push((f, merit));
    }
    Ok(trace)
}

pub fn cfs_greedy_stepwise(t: &LabeledTable, cfg: &SelectorConfig) -> Result<SelectionResult> {
    let mut cache = SuCache::new(t)?;
    let trace = cfs_greedy_trace(&mut cache, t.names)?;
    let names: Vec<String> = trace.iter().map(|&(f, _)| t.names[f].clone()).collect();
    let scores: Vec<f64> = trace.iter().map(|&(_, m)| m).collect();
    let ranked = rank(&names, &scores);
    let take = ranked.len();
    let cfg = SelectorConfig {
        method: SelectorKind::Cfs,
        ..cfg.clone()
    };
    Ok(SelectionResult::from_ranking(SelectorKind::Cfs, ranked, take, cfg))
}

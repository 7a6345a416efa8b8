//! Binary decision tree with information-gain splits and reduced-error pruning.
//!
//! One stratified fold in `prune_folds` is held out (seeded), the tree is
//! grown on the rest, and subtrees are collapsed bottom-up whenever a leaf
//! makes no more holdout errors than the subtree it replaces.

use ndarray::{ArrayView1, ArrayView2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::Prediction;
use crate::error::{Error, Result};
use crate::layout::Label;
use crate::selection::info::entropy_counts;

const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DtParams {
    pub min_leaf: usize,
    /// The pruning holdout is one stratified fold in this many; below 2
    /// disables pruning.
    pub prune_folds: usize,
    pub seed: u64,
}

impl Default for DtParams {
    fn default() -> Self {
        DtParams {
            min_leaf: 2,
            prune_folds: 5,
            seed: 1,
        }
    }
}

impl DtParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_leaf == 0 {
            return Err(Error::Config("DT needs min_leaf >= 1".into()));
        }
        Ok(())
    }
}

/// `counts` are growing-set class counts indexed by `Label::as_index`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        counts: [usize; 2],
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        counts: [usize; 2],
    },
}

impl Node {
    fn counts(&self) -> [usize; 2] {
        match self {
            Node::Leaf { counts } | Node::Split { counts, .. } => *counts,
        }
    }
}

fn majority(counts: [usize; 2]) -> usize {
    usize::from(counts[1] > counts[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub n_features: usize,
    /// Root at index 0, children after their parent.
    pub nodes: Vec<Node>,
    pub holdout_size: usize,
    pub holdout_errors_before: usize,
    pub holdout_errors_after: usize,
}

struct Grower<'a> {
    x: ArrayView2<'a, f64>,
    y: Vec<usize>,
    min_leaf: usize,
    goes_left: Vec<bool>,
    nodes: Vec<Node>,
}

impl Grower<'_> {
    fn counts(&self, rows: &[usize]) -> [usize; 2] {
        let mdd = rows.iter().filter(|&&r| self.y[r] == 1).count();
        [rows.len() - mdd, mdd]
    }

    /// Best (gain, feature, threshold) over every feature, scanning each
    /// presorted order; ties keep the lowest feature and threshold.
    fn best_split(&self, orders: &[Vec<usize>], counts: [usize; 2]) -> Option<(f64, usize, f64)> {
        let m = counts[0] + counts[1];
        let parent = entropy_counts(&counts, m);
        let mut best: Option<(f64, usize, f64)> = None;
        for (j, ord) in orders.iter().enumerate() {
            let mut left = [0usize; 2];
            for p in 0..m - 1 {
                left[self.y[ord[p]]] += 1;
                let nl = p + 1;
                if nl < self.min_leaf || m - nl < self.min_leaf {
                    continue;
                }
                let (a, b) = (self.x[[ord[p], j]], self.x[[ord[p + 1], j]]);
                if a >= b {
                    continue;
                }
                let right = [counts[0] - left[0], counts[1] - left[1]];
                let gain = parent
                    - (nl as f64 / m as f64) * entropy_counts(&left, nl)
                    - ((m - nl) as f64 / m as f64) * entropy_counts(&right, m - nl);
                if best.is_none_or(|(g, _, _)| gain > g) {
                    let mid = a + (b - a) / 2.0;
                    best = Some((gain, j, if mid < b { mid } else { a }));
                }
            }
        }
        best.filter(|&(g, _, _)| g > MIN_GAIN)
    }

    fn grow(&mut self, orders: Vec<Vec<usize>>, rows: Vec<usize>) -> usize {
        let counts = self.counts(&rows);
        let idx = self.nodes.len();
        self.nodes.push(Node::Leaf { counts });
        if counts[0] == 0 || counts[1] == 0 || rows.len() < 2 * self.min_leaf || orders.is_empty() {
            return idx;
        }
        let Some((_, feature, threshold)) = self.best_split(&orders, counts) else {
            return idx;
        };
        for &r in &rows {
            self.goes_left[r] = self.x[[r, feature]] <= threshold;
        }
        let (mut lo, mut ro) = (Vec::with_capacity(orders.len()), Vec::with_capacity(orders.len()));
        for ord in orders {
            let (l, r): (Vec<usize>, Vec<usize>) = ord.into_iter().partition(|&i| self.goes_left[i]);
            lo.push(l);
            ro.push(r);
        }
        let (lrows, rrows): (Vec<usize>, Vec<usize>) = rows.into_iter().partition(|&i| self.goes_left[i]);
        let left = self.grow(lo, lrows);
        let right = self.grow(ro, rrows);
        self.nodes[idx] = Node::Split {
            feature,
            threshold,
            left,
            right,
            counts,
        };
        idx
    }
}

/// Seeded stratified split into (growing rows, holdout rows), both sorted.
fn holdout_split(y: &[Label], folds: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    if folds < 2 {
        return ((0..y.len()).collect(), Vec::new());
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (mut grow, mut hold) = (Vec::new(), Vec::new());
    for c in 0..2 {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i].as_index() == c).collect();
        idx.shuffle(&mut rng);
        let h = idx.len() / folds;
        hold.extend_from_slice(&idx[..h]);
        grow.extend_from_slice(&idx[h..]);
    }
    grow.sort_unstable();
    hold.sort_unstable();
    (grow, hold)
}

impl TreeModel {
    /// The caller guarantees both classes are present.
    pub fn fit(x: ArrayView2<f64>, y: &[Label], p: &DtParams) -> Self {
        let (grow_rows, hold_rows) = holdout_split(y, p.prune_folds, p.seed);
        let orders: Vec<Vec<usize>> = (0..x.ncols())
            .map(|j| {
                let mut o = grow_rows.clone();
                o.sort_by(|&a, &b| x[[a, j]].total_cmp(&x[[b, j]]).then(a.cmp(&b)));
                o
            })
            .collect();
        let mut g = Grower {
            x,
            y: y.iter().map(|l| l.as_index()).collect(),
            min_leaf: p.min_leaf,
            goes_left: vec![false; y.len()],
            nodes: Vec::new(),
        };
        g.grow(orders, grow_rows);
        let mut model = TreeModel {
            n_features: x.ncols(),
            nodes: g.nodes,
            holdout_size: hold_rows.len(),
            holdout_errors_before: 0,
            holdout_errors_after: 0,
        };
        if !hold_rows.is_empty() {
            let ycodes = g.y;
            model.holdout_errors_before = model.errors(x, &ycodes, &hold_rows);
            model.prune(0, x, &ycodes, hold_rows.clone());
            model.compact();
            model.holdout_errors_after = model.errors(x, &ycodes, &hold_rows);
            assert!(
                model.holdout_errors_after <= model.holdout_errors_before,
                "reduced-error pruning raised holdout error"
            );
        }
        model
    }

    fn leaf_of(&self, x: ArrayView1<f64>) -> [usize; 2] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { counts } => return *counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    fn errors(&self, x: ArrayView2<f64>, y: &[usize], rows: &[usize]) -> usize {
        rows.iter()
            .filter(|&&r| majority(self.leaf_of(x.row(r))) != y[r])
            .count()
    }

    /// Prunes the subtree at `idx` against the holdout rows reaching it and
    /// returns its holdout errors afterwards.
    fn prune(&mut self, idx: usize, x: ArrayView2<f64>, y: &[usize], rows: Vec<usize>) -> usize {
        let counts = self.nodes[idx].counts();
        let as_leaf = rows.iter().filter(|&&r| y[r] != majority(counts)).count();
        let Node::Split {
            feature,
            threshold,
            left,
            right,
            ..
        } = self.nodes[idx]
        else {
            return as_leaf;
        };
        let (lr, rr): (Vec<usize>, Vec<usize>) = rows.into_iter().partition(|&r| x[[r, feature]] <= threshold);
        let subtree = self.prune(left, x, y, lr) + self.prune(right, x, y, rr);
        if as_leaf <= subtree {
            self.nodes[idx] = Node::Leaf { counts };
            as_leaf
        } else {
            subtree
        }
    }

    /// Drops nodes orphaned by pruning, renumbering in preorder.
    fn compact(&mut self) {
        fn walk(old: &[Node], i: usize, out: &mut Vec<Node>) -> usize {
            let idx = out.len();
            out.push(old[i].clone());
            if let Node::Split { left, right, .. } = old[i] {
                let l = walk(old, left, out);
                let r = walk(old, right, out);
                if let Node::Split { left, right, .. } = &mut out[idx] {
                    *left = l;
                    *right = r;
                }
            }
            idx
        }
        let mut out = Vec::with_capacity(self.nodes.len());
        walk(&self.nodes, 0, &mut out);
        self.nodes = out;
    }

    pub fn n_internal(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Split { .. })).count()
    }

    /// Leaf majority (ties to NC) with a Laplace-smoothed MDD score.
    pub fn predict(&self, x: ArrayView1<f64>) -> Prediction {
        let c = self.leaf_of(x);
        Prediction::from_score((c[1] as f64 + 1.0) / ((c[0] + c[1]) as f64 + 2.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use proptest::prelude::*;
    use rand::Rng;

    // XOR layout with one oversized cluster, so the boundary at 0.5 carries
    // positive gain on its own and the greedy search can find it.
    fn xor_clusters(seed: u64, per: usize) -> (Array2<f64>, Vec<Label>) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let centres = [
            (0.0, 0.0, Label::Nc, 2 * per),
            (1.0, 1.0, Label::Nc, per),
            (0.0, 1.0, Label::Mdd, per),
            (1.0, 0.0, Label::Mdd, per),
        ];
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for &(cx, cy, l, n) in &centres {
            for _ in 0..n {
                rows.push(cx + rng.random_range(-0.1..0.1));
                rows.push(cy + rng.random_range(-0.1..0.1));
                y.push(l);
            }
        }
        (Array2::from_shape_vec((y.len(), 2), rows).unwrap(), y)
    }

    fn accuracy(m: &TreeModel, x: &Array2<f64>, y: &[Label]) -> f64 {
        let ok = x
            .rows()
            .into_iter()
            .zip(y)
            .filter(|(r, &l)| m.predict(*r).label == l)
            .count();
        ok as f64 / y.len() as f64
    }

    #[test]
    fn xor_needs_several_splits() {
        let (x, y) = xor_clusters(7, 40);
        let m = TreeModel::fit(x.view(), &y, &DtParams::default());
        assert!(m.n_internal() >= 2, "{:?}", m.nodes);
        assert!(accuracy(&m, &x, &y) > 0.9);
    }

    #[test]
    fn pure_or_tiny_data_gives_one_leaf() {
        let x = array![[0.0], [1.0], [2.0]];
        let y = [Label::Mdd, Label::Nc, Label::Mdd];
        let m = TreeModel::fit(
            x.view(),
            &y,
            &DtParams {
                prune_folds: 0,
                ..DtParams::default()
            },
        );
        assert_eq!(m.nodes.len(), 1);
        let p = m.predict(array![0.5].view());
        assert_eq!(p.label, Label::Mdd);
        assert!((p.score - 3.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn stratified_holdout_takes_a_fifth_of_each_class() {
        let y: Vec<Label> = (0..33).map(|i| Label::from_index(usize::from(i < 13))).collect();
        let (grow, hold) = holdout_split(&y, 5, 1);
        assert_eq!(hold.len(), 13 / 5 + 20 / 5);
        assert_eq!(hold.iter().filter(|&&i| i < 13).count(), 2);
        assert_eq!(grow.len() + hold.len(), 33);
        assert_eq!(holdout_split(&y, 5, 1), (grow, hold));
    }

    #[test]
    fn serialization_is_deterministic() {
        let (x, y) = xor_clusters(8, 10);
        let a = serde_json::to_string(&TreeModel::fit(x.view(), &y, &DtParams::default())).unwrap();
        let b = serde_json::to_string(&TreeModel::fit(x.view(), &y, &DtParams::default())).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn leaves_respect_min_leaf_before_pruning(seed in 0u64..200, min_leaf in 1usize..5) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let x = Array2::from_shape_fn((40, 3), |_| rng.random_range(0.0..1.0));
            let y: Vec<Label> = (0..40).map(|i| Label::from_index(usize::from(x[[i, 0]] + rng.random_range(-0.3..0.3) > 0.5))).collect();
            prop_assume!(y.iter().any(|&l| l != y[0]));
            let m = TreeModel::fit(x.view(), &y, &DtParams { min_leaf, prune_folds: 0, seed: 1 });
            for n in &m.nodes {
                if let Node::Leaf { counts } = n {
                    prop_assert!(counts[0] + counts[1] >= min_leaf.min(40));
                }
            }
        }

        #[test]
        fn pruning_never_increases_holdout_error(seed in 0u64..200) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let x = Array2::from_shape_fn((60, 4), |_| rng.random_range(0.0..1.0));
            let y: Vec<Label> = (0..60).map(|i| Label::from_index(usize::from(x[[i, 1]] + rng.random_range(-0.5..0.5) > 0.5))).collect();
            prop_assume!(y.iter().any(|&l| l != y[0]));
            let m = TreeModel::fit(x.view(), &y, &DtParams { seed, ..DtParams::default() });
            prop_assert!(m.holdout_size > 0);
            prop_assert!(m.holdout_errors_after <= m.holdout_errors_before);
        }
    }
}

//! Supervised entropy/MDL discretization (Fayyad and Irani).

/// Class labels are small integer codes in `0..n_classes`.
fn counts_of(labels: &[usize], order: &[usize], n_classes: usize) -> Vec<usize> {
    let mut c = vec![0; n_classes];
    for &i in order {
        c[labels[i]] += 1;
    }
    c
}

fn entropy_of(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn distinct_classes(counts: &[usize]) -> usize {
    counts.iter().filter(|&&c| c > 0).count()
}

/// Cut points (midpoints between adjacent distinct values) accepted by the
/// MDL stopping rule, ascending. An empty list means a single bin.
pub fn mdl_discretize(column: &[f64], labels: &[usize]) -> Vec<f64> {
    assert_eq!(column.len(), labels.len(), "column and labels differ in length");
    if column.len() < 2 {
        return Vec::new();
    }
    let n_classes = labels.iter().copied().max().unwrap_or(0) + 1;
    let mut order: Vec<usize> = (0..column.len()).collect();
    order.sort_by(|&a, &b| column[a].total_cmp(&column[b]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| column[i]).collect();
    let sorted_labels: Vec<usize> = order.iter().map(|&i| labels[i]).collect();
    let mut cuts = Vec::new();
    split(&sorted, &sorted_labels, n_classes, 0, sorted.len(), &mut cuts);
    cuts.sort_by(f64::total_cmp);
    cuts
}

fn split(values: &[f64], labels: &[usize], n_classes: usize, lo: usize, hi: usize, cuts: &mut Vec<f64>) {
    let n = hi - lo;
    if n < 2 {
        return;
    }
    let idx: Vec<usize> = (lo..hi).collect();
    let total = counts_of(labels, &idx, n_classes);
    let ent = entropy_of(&total, n);
    if ent == 0.0 {
        return;
    }

    // Scan every boundary between distinct values, keeping running left counts.
    let mut left = vec![0usize; n_classes];
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    for pos in lo + 1..hi {
        left[labels[pos - 1]] += 1;
        if values[pos] == values[pos - 1] {
            continue;
        }
        let nl = pos - lo;
        let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
        let e = (nl as f64 * entropy_of(&left, nl) + (n - nl) as f64 * entropy_of(&right, n - nl)) / n as f64;
        if best.as_ref().map(|b| e < b.0).unwrap_or(true) {
            best = Some((e, pos, left.clone()));
        }
    }
    let Some((e_split, pos, left)) = best else {
        return;
    };
    let nl = pos - lo;
    let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
    let (e1, e2) = (entropy_of(&left, nl), entropy_of(&right, n - nl));
    let (k, k1, k2) = (
        distinct_classes(&total) as f64,
        distinct_classes(&left) as f64,
        distinct_classes(&right) as f64,
    );
    let gain = ent - e_split;
    let delta = (3f64.powf(k) - 2.0).log2() - (k * ent - k1 * e1 - k2 * e2);
    let threshold = ((n - 1) as f64).log2() / n as f64 + delta / n as f64;
    if gain <= threshold {
        return;
    }
    cuts.push(0.5 * (values[pos - 1] + values[pos]));
    split(values, labels, n_classes, lo, pos, cuts);
    split(values, labels, n_classes, pos, hi, cuts);
}

/// Bin index of `v`: the number of cut points strictly below it.
pub fn bin_of(cuts: &[f64], v: f64) -> usize {
    cuts.partition_point(|&c| c < v)
}

pub fn apply_cuts(cuts: &[f64], column: &[f64]) -> Vec<usize> {
    column.iter().map(|&v| bin_of(cuts, v)).collect()
}

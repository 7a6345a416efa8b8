//! Entropy, conditional entropy, information gain and symmetrical uncertainty (bits).

use crate::error::{Error, Result};

const PROB_TOL: f64 = 1e-9;

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

fn check_distribution(p: impl Iterator<Item = f64>) -> Result<()> {
    let mut sum = 0.0;
    for v in p {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidDistribution(format!("probability {v}")));
        }
        sum += v;
    }
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidDistribution(format!("probabilities sum to {sum}")));
    }
    Ok(())
}

pub fn entropy(p: &[f64]) -> Result<f64> {
    check_distribution(p.iter().copied())?;
    Ok(p.iter().map(|&v| plogp(v)).sum())
}

/// H(Y|X) for a joint table indexed `joint[x][y]`.
pub fn cond_entropy(joint: &[Vec<f64>]) -> Result<f64> {
    check_distribution(joint.iter().flatten().copied())?;
    let mut h = 0.0;
    for row in joint {
        let px: f64 = row.iter().sum();
        if px > 0.0 {
            h += px * row.iter().map(|&pxy| plogp(pxy / px)).sum::<f64>();
        }
    }
    Ok(h)
}

pub(crate) fn entropy_counts(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts.iter().map(|&c| plogp(c as f64 / n)).sum()
}

/// Contingency counts of two code columns, `table[x * ny + y]`.
pub(crate) struct Contingency {
    pub table: Vec<usize>,
    pub nx: usize,
    pub ny: usize,
    pub total: usize,
}

impl Contingency {
    pub fn new(x: &[usize], y: &[usize]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        let nx = x.iter().copied().max().map_or(0, |m| m + 1);
        let ny = y.iter().copied().max().map_or(0, |m| m + 1);
        let mut table = vec![0usize; nx * ny];
        for (&a, &b) in x.iter().zip(y) {
            table[a * ny + b] += 1;
        }
        Ok(Contingency {
            table,
            nx,
            ny,
            total: x.len(),
        })
    }

    fn row_counts(&self) -> Vec<usize> {
        (0..self.nx)
            .map(|a| self.table[a * self.ny..(a + 1) * self.ny].iter().sum())
            .collect()
    }

    fn col_counts(&self) -> Vec<usize> {
        (0..self.ny)
            .map(|b| (0..self.nx).map(|a| self.table[a * self.ny + b]).sum())
            .collect()
    }

    pub fn h_x(&self) -> f64 {
        entropy_counts(&self.row_counts(), self.total)
    }

    pub fn h_y(&self) -> f64 {
        entropy_counts(&self.col_counts(), self.total)
    }

    /// Joint entropy summed over cell counts in ascending order, so the
    /// result does not depend on which variable indexes the rows.
    pub fn h_xy(&self) -> f64 {
        let mut cells: Vec<usize> = self.table.iter().copied().filter(|&c| c > 0).collect();
        cells.sort_unstable();
        entropy_counts(&cells, self.total)
    }

    /// H(Y|X) = Σ_x p(x) H(Y | X = x).
    pub fn h_y_given_x(&self) -> f64 {
        let n = self.total as f64;
        self.row_counts()
            .iter()
            .enumerate()
            .filter(|(_, &nx)| nx > 0)
            .map(|(a, &nx)| {
                let row = &self.table[a * self.ny..(a + 1) * self.ny];
                nx as f64 / n * entropy_counts(row, nx)
            })
            .sum()
    }
}

/// H(Y) − H(Y|X), clamped at 0 against rounding.
pub fn info_gain(y: &[usize], x: &[usize]) -> Result<f64> {
    let t = Contingency::new(x, y)?;
    Ok((t.h_y() - t.h_y_given_x()).max(0.0))
}

/// 2·gain / (H(X) + H(Y)), 0 when both entropies vanish.
pub fn symmetrical_uncertainty(x: &[usize], y: &[usize]) -> Result<f64> {
    let t = Contingency::new(x, y)?;
    let (hx, hy) = (t.h_x(), t.h_y());
    if hx + hy <= 0.0 {
        return Ok(0.0);
    }
    // H(X) + H(Y) − H(X,Y) equals H(Y) − H(Y|X) but is exactly symmetric.
    let gain = (hx + hy) - t.h_xy();
    Ok((2.0 * gain / (hx + hy)).clamp(0.0, 1.0))
}

//! Welch two-sample t-tests on subject means with a Bonferroni threshold.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::layout::Label;
use crate::signal::FeatureMatrix;

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Unit of observation for the group tests.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatsLevel {
    /// One row per subject, the mean of its epochs.
    #[default]
    Subject,
    /// Every epoch counts as an observation.
    Epoch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchTest {
    /// Positive when the MDD mean is larger.
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTest {
    pub name: String,
    pub mean_mdd: f64,
    pub mean_nc: f64,
    pub t: f64,
    pub df: f64,
    pub p: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub alpha: f64,
    pub divisor: usize,
    /// alpha / divisor; a feature is significant when p is below it.
    pub threshold: f64,
    pub n_mdd: usize,
    pub n_nc: usize,
    pub features: Vec<FeatureTest>,
}

// Sorting first makes the sums independent of input order.
fn sorted_mean_var(values: &[f64]) -> (f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let mut dev: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
    dev.sort_by(f64::total_cmp);
    (mean, dev.iter().sum::<f64>() / (n - 1.0))
}

/// Two-sided p from Student's t via the regularized incomplete beta function.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

/// Welch's test of `a` against `b` (each needs at least two values).
pub fn welch(a: &[f64], b: &[f64]) -> WelchTest {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, va) = sorted_mean_var(a);
    let (mb, vb) = sorted_mean_var(b);
    let (sa, sb) = (va / na, vb / nb);
    let se2 = sa + sb;
    if se2 == 0.0 {
        // Both groups constant: equal means carry no evidence, unequal ones all of it.
        let df = na + nb - 2.0;
        return if ma == mb {
            WelchTest { t: 0.0, df, p: 1.0 }
        } else {
            WelchTest {
                t: (ma - mb).signum() * f64::INFINITY,
                df,
                p: 0.0,
            }
        };
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    WelchTest {
        t,
        df,
        p: t_two_sided_p(t, df),
    }
}

/// One row per subject (first-appearance order) holding the mean of its epochs.
pub fn subject_means(m: &FeatureMatrix) -> (Vec<(String, Label)>, Vec<Vec<f64>>) {
    let groups = m.subject_groups();
    let mut ids = Vec::with_capacity(groups.len());
    let mut rows = Vec::with_capacity(groups.len());
    for (s, l, idx) in groups {
        let row = (0..m.n_cols())
            .map(|j| {
                let mut v: Vec<f64> = idx.iter().map(|&r| m.values[[r, j]]).collect();
                v.sort_by(f64::total_cmp);
                v.iter().sum::<f64>() / v.len() as f64
            })
            .collect();
        ids.push((s, l));
        rows.push(row);
    }
    (ids, rows)
}

/// Per-feature MDD-vs-NC test on subject means; `divisor` defaults to the
/// number of features.
pub fn group_ttest(m: &FeatureMatrix, alpha: f64, divisor: Option<usize>) -> Result<GroupStats> {
    group_ttest_at(m, StatsLevel::Subject, alpha, divisor)
}

pub fn group_ttest_at(m: &FeatureMatrix, level: StatsLevel, alpha: f64, divisor: Option<usize>) -> Result<GroupStats> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let divisor = divisor.unwrap_or(m.n_cols());
    if divisor == 0 {
        return Err(Error::Config("Bonferroni divisor must be at least 1".into()));
    }
    m.check_finite()?;
    let (labels, rows): (Vec<Label>, Vec<Vec<f64>>) = match level {
        StatsLevel::Subject => {
            let (ids, rows) = subject_means(m);
            (ids.into_iter().map(|(_, l)| l).collect(), rows)
        }
        StatsLevel::Epoch => (
            m.labels.clone(),
            m.values.rows().into_iter().map(|r| r.to_vec()).collect(),
        ),
    };
    let mdd: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == Label::Mdd).collect();
    let nc: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == Label::Nc).collect();
    if mdd.len() < 2 || nc.len() < 2 {
        return Err(Error::TooFewSubjects(format!(
            "t-test needs 2 observations per group, found {} MDD and {} NC",
            mdd.len(),
            nc.len()
        )));
    }
    let threshold = alpha / divisor as f64;
    let features = m
        .names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let a: Vec<f64> = mdd.iter().map(|&i| rows[i][j]).collect();
            let b: Vec<f64> = nc.iter().map(|&i| rows[i][j]).collect();
            let w = welch(&a, &b);
            FeatureTest {
                name: name.clone(),
                mean_mdd: sorted_mean_var(&a).0,
                mean_nc: sorted_mean_var(&b).0,
                t: w.t,
                df: w.df,
                p: w.p,
                significant: w.p < threshold,
            }
        })
        .collect();
    Ok(GroupStats {
        alpha,
        divisor,
        threshold,
        n_mdd: mdd.len(),
        n_nc: nc.len(),
        features,
    })
}

impl GroupStats {
    pub fn significant_names(&self) -> Vec<String> {
        self.features
            .iter()
            .filter(|f| f.significant)
            .map(|f| f.name.clone())
            .collect()
    }

    /// `feature,t,p,significant` rows in table order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("feature,t,p,significant\n");
        for f in &self.features {
            out.push_str(&format!("{},{},{},{}\n", f.name, f.t, f.p, f.significant));
        }
        out
    }

    /// Same tests judged against a different divisor.
    pub fn with_divisor(&self, divisor: usize) -> GroupStats {
        let threshold = self.alpha / divisor as f64;
        GroupStats {
            divisor,
            threshold,
            features: self
                .features
                .iter()
                .map(|f| FeatureTest {
                    significant: f.p < threshold,
                    ..f.clone()
                })
                .collect(),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    /// Subjects `s0..` with `epochs` rows each; MDD subjects first.
    fn matrix(mdd: &[Vec<f64>], nc: &[Vec<f64>], epochs: usize) -> FeatureMatrix {
        let d = mdd[0].len();
        let mut rows = Vec::new();
        let (mut subjects, mut labels, mut idx) = (Vec::new(), Vec::new(), Vec::new());
        for (s, (means, l)) in mdd
            .iter()
            .map(|m| (m, Label::Mdd))
            .chain(nc.iter().map(|m| (m, Label::Nc)))
            .enumerate()
        {
            for e in 0..epochs {
                rows.extend(means.iter().copied());
                subjects.push(format!("s{s:02}"));
                labels.push(l);
                idx.push(e);
            }
        }
        let names = (0..d).map(|j| format!("f{j}")).collect();
        FeatureMatrix::new(
            names,
            Array2::from_shape_vec((subjects.len(), d), rows).unwrap(),
            subjects,
            labels,
            idx,
        )
        .unwrap()
    }

    #[test]
    fn identical_groups_give_t_zero_p_one() {
        let g = vec![vec![1.0], vec![2.0], vec![3.0]];
        let s = group_ttest(&matrix(&g, &g, 2), DEFAULT_ALPHA, None).unwrap();
        assert_eq!(s.features[0].t, 0.0);
        assert_eq!(s.features[0].p, 1.0);
        assert!(!s.features[0].significant);
    }

    // Oracle: tabulated two-sided critical values of Student's t.
    #[test]
    fn p_values_match_t_tables() {
        for (t, df, p) in [
            (2.228, 10.0, 0.05),
            (2.086, 20.0, 0.05),
            (3.169, 10.0, 0.01),
            (1.96, 1e6, 0.05),
        ] {
            assert!((t_two_sided_p(t, df) - p).abs() < 5e-4, "t={t} df={df}");
        }
        assert_eq!(t_two_sided_p(0.0, 7.0), 1.0);
    }

    #[test]
    fn well_separated_groups_are_significant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut draw = |mu: f64| -> Vec<Vec<f64>> {
            (0..12)
                .map(|_| vec![mu + 0.1 * rng.sample::<f64, _>(StandardNormal)])
                .collect()
        };
        let (a, b) = (draw(0.0), draw(5.0));
        let s = group_ttest(&matrix(&a, &b, 3), DEFAULT_ALPHA, Some(344)).unwrap();
        assert!(s.features[0].p < 1e-10);
        assert!(s.features[0].significant);
        assert!(s.features[0].t < 0.0);
    }

    // Oracle: two-sided permutation test of the Welch statistic.
    #[test]
    fn parametric_p_agrees_with_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a: Vec<f64> = (0..15).map(|_| 0.6 + rng.sample::<f64, _>(StandardNormal)).collect();
        let b: Vec<f64> = (0..15).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let observed = welch(&a, &b);
        let mut pool: Vec<f64> = a.iter().chain(&b).copied().collect();
        let shuffles = 10_000;
        let mut extreme = 0;
        for _ in 0..shuffles {
            pool.shuffle(&mut rng);
            if welch(&pool[..15], &pool[15..]).t.abs() >= observed.t.abs() {
                extreme += 1;
            }
        }
        let perm = extreme as f64 / shuffles as f64;
        assert!(
            observed.p > 0.005 && observed.p < 0.2,
            "moderate effect expected, p={}",
            observed.p
        );
        assert!((perm - observed.p).abs() < 0.01, "perm {perm} vs {}", observed.p);
    }

    // Epoch level treats repeated identical rows as separate observations,
    // which matches a direct Welch test on the expanded samples.
    #[test]
    fn epoch_level_uses_every_row() {
        let a = vec![vec![1.0], vec![2.0], vec![4.0]];
        let b = vec![vec![0.0], vec![1.5], vec![0.5]];
        let m = matrix(&a, &b, 3);
        let s = group_ttest_at(&m, StatsLevel::Epoch, DEFAULT_ALPHA, None).unwrap();
        let rep = |g: &[Vec<f64>]| g.iter().flat_map(|v| [v[0]; 3]).collect::<Vec<f64>>();
        let direct = welch(&rep(&a), &rep(&b));
        assert_eq!((s.n_mdd, s.n_nc), (9, 9));
        assert_eq!(s.features[0].t, direct.t);
        assert_eq!(s.features[0].p, direct.p);
        let subj = group_ttest(&m, DEFAULT_ALPHA, None).unwrap();
        assert!(subj.features[0].p > s.features[0].p);
        // A single subject per class is still testable at epoch level.
        let one = vec![vec![1.0]];
        let other = vec![vec![2.0]];
        assert!(group_ttest_at(&matrix(&one, &other, 3), StatsLevel::Epoch, 0.05, None).is_ok());
    }

    #[test]
    fn too_few_subjects_and_bad_config() {
        let one = vec![vec![1.0]];
        let two = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            group_ttest(&matrix(&one, &two, 2), 0.05, None),
            Err(Error::TooFewSubjects(_))
        ));
        assert!(matches!(
            group_ttest(&matrix(&two, &two, 2), 1.5, None),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            group_ttest(&matrix(&two, &two, 2), 0.05, Some(0)),
            Err(Error::Config(_))
        ));
    }

    proptest! {
        #[test]
        fn invariant_to_epoch_and_subject_order(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (n_sub, epochs, d) = (8, 3, 4);
            let n = n_sub * epochs;
            let values = Array2::from_shape_fn((n, d), |(r, j)| rng.random_range(-1.0..1.0) + (r / epochs < 4) as u8 as f64 * j as f64 * 0.3);
            let subjects: Vec<String> = (0..n).map(|r| format!("s{}", r / epochs)).collect();
            let labels: Vec<Label> = (0..n).map(|r| if r / epochs < 4 { Label::Mdd } else { Label::Nc }).collect();
            let idx: Vec<usize> = (0..n).map(|r| r % epochs).collect();
            let names: Vec<String> = (0..d).map(|j| format!("f{j}")).collect();
            let base = FeatureMatrix::new(names, values, subjects, labels, idx).unwrap();

            // Shuffle subjects within each group and epochs within each subject.
            let mut order: Vec<usize> = Vec::new();
            let mut mdd: Vec<usize> = (0..4).collect();
            let mut nc: Vec<usize> = (4..8).collect();
            mdd.shuffle(&mut rng);
            nc.shuffle(&mut rng);
            for s in mdd.into_iter().chain(nc) {
                let mut ep: Vec<usize> = (0..epochs).map(|e| s * epochs + e).collect();
                ep.shuffle(&mut rng);
                order.extend(ep);
            }
            let a = group_ttest(&base, 0.05, None).unwrap();
            let b = group_ttest(&base.select_rows(&order), 0.05, None).unwrap();
            for (x, y) in a.features.iter().zip(&b.features) {
                prop_assert_eq!(x.t, y.t);
                prop_assert_eq!(x.p, y.p);
            }
        }

        #[test]
        fn bonferroni_is_monotone(seed in 0u64..100, f_small in 1usize..50, extra in 0usize..300) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = |rng: &mut ChaCha8Rng, mu: f64| -> Vec<Vec<f64>> {
                (0..6).map(|_| (0..10).map(|j| mu * j as f64 / 10.0 + rng.sample::<f64, _>(StandardNormal)).collect()).collect()
            };
            let (a, b) = (g(&mut rng, 3.0), g(&mut rng, 0.0));
            let s = group_ttest(&matrix(&a, &b, 1), 0.05, Some(f_small + extra)).unwrap();
            let loose = s.with_divisor(f_small);
            for (strict, l) in s.features.iter().zip(&loose.features) {
                prop_assert!(!strict.significant || l.significant);
                prop_assert!((0.0..=1.0).contains(&strict.p));
            }
        }
    }
}

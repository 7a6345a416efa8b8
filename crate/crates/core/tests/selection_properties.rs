use eegdep::selection::cfs::cfs_greedy_stepwise;
use eegdep::selection::infogain::info_gain_scores;
use eegdep::selection::relieff::relieff_weights;
use eegdep::selection::{LabeledTable, SelectorConfig};
use eegdep::Label;
use ndarray::Array2;
use proptest::prelude::*;

fn names(d: usize) -> Vec<String> {
    (0..d).map(|j| format!("f{j}")).collect()
}

fn table_strategy() -> impl Strategy<Value = (Array2<f64>, Vec<Label>)> {
    (12usize..30, 2usize..6).prop_flat_map(|(per_class, d)| {
        let n = 2 * per_class;
        (prop::collection::vec(-5.0f64..5.0, n * d), Just(n), Just(d)).prop_map(move |(v, n, d)| {
            let labels = (0..n).map(|i| if i < n / 2 { Label::Mdd } else { Label::Nc }).collect();
            (Array2::from_shape_vec((n, d), v).unwrap(), labels)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn relieff_weights_bounded_and_row_order_free((x, y) in table_strategy(), shift in 1usize..7) {
        let nm = names(x.ncols());
        let w = relieff_weights(&LabeledTable::new(x.view(), &y, &nm).unwrap(), 10, None, 0).unwrap();
        prop_assert!(w.iter().all(|v| (-1.0..=1.0).contains(v)));

        let n = x.nrows();
        let order: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let xp = x.select(ndarray::Axis(0), &order);
        let yp: Vec<Label> = order.iter().map(|&i| y[i]).collect();
        let wp = relieff_weights(&LabeledTable::new(xp.view(), &yp, &nm).unwrap(), 10, None, 0).unwrap();
        for (a, b) in w.iter().zip(&wp) {
            prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
        }
    }

    #[test]
    fn selectors_ignore_positive_affine_rescaling((x, y) in table_strategy(), scale in 0.01f64..100.0, offset in -50.0f64..50.0) {
        let nm = names(x.ncols());
        let z = x.mapv(|v| v * scale + offset);
        let t = LabeledTable::new(x.view(), &y, &nm).unwrap();
        let tz = LabeledTable::new(z.view(), &y, &nm).unwrap();
        prop_assert_eq!(info_gain_scores(&t).unwrap(), info_gain_scores(&tz).unwrap());
        let cfg = SelectorConfig::default();
        prop_assert_eq!(cfs_greedy_stepwise(&t, &cfg).unwrap().selected, cfs_greedy_stepwise(&tz, &cfg).unwrap().selected);
        let w = relieff_weights(&t, 10, None, 0).unwrap();
        let wz = relieff_weights(&tz, 10, None, 0).unwrap();
        for (a, b) in w.iter().zip(&wz) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}

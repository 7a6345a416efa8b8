use eegdep::connectivity::edge_names;
use eegdep::eval::census::categorize;
use eegdep::eval::{edge_census, pli_edges, EdgeCategory};
use eegdep::ChannelLayout;

const SELECTED: [&str; 15] = [
    "C3-T3", "T3-P3", "F3-F7", "P3-T5", "F7-T3", "F7-C3", "T3-T5", "C3-P3", "P4-T6", "O2-P4", "O2-T6", "T6-T4",
    "P4-T4", "F8-F4", "C4-F8",
];

const SIGNIFICANT: [&str; 27] = [
    "Fp1-C3", "FP1-T3", "FP1-P3", "F3-F7", "F3-C3", "F3-T3", "F3-P3", "F7-C3", "F7-T3", "F7-P3", "F7-T5", "C3-P3",
    "T3-T5", "P3-T5", "P3-O1", "FP2-P4", "O2-P4", "O2-T6", "O2-T4", "P4-T4", "C4-F8", "C4-F4", "FP1-T4", "T3-P4",
    "P3-P4", "T5-P4", "O1-T4",
];

fn triple<S: AsRef<str>>(edges: &[S]) -> (usize, usize, usize) {
    let c = edge_census(edges).unwrap().counts;
    (c.intra_left, c.intra_right, c.inter)
}

#[test]
fn published_edge_lists() {
    assert_eq!(triple(&SELECTED), (8, 7, 0));
    assert_eq!(triple(&SIGNIFICANT), (15, 7, 5));
}

#[test]
fn all_edges() {
    assert_eq!(triple(&edge_names()), (28, 28, 64));
}

#[test]
fn edge_direction_does_not_matter() {
    let layout = ChannelLayout::canonical();
    for e in edge_names() {
        let body = e.strip_prefix("pli:").unwrap();
        let (a, b) = body.split_once('-').unwrap();
        let flipped = format!("{b}-{a}");
        assert_eq!(
            categorize(body, &layout).unwrap(),
            categorize(&flipped, &layout).unwrap()
        );
    }
    assert_eq!(categorize("O1-T4", &layout).unwrap(), EdgeCategory::Inter);
}

#[test]
fn census_of_mixed_feature_names_uses_only_edges() {
    let names = ["variance@C3", "pli:C3-P3", "c0@O1", "pli:C4-F8", "pli:Fp1-T4"];
    assert_eq!(triple(&pli_edges(&names)), (1, 1, 1));
}

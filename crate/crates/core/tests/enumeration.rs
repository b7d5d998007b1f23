use std::collections::{BTreeMap, BTreeSet};

use colored_spaces::enumerate::{
    enumerate_all_colorings, enumerate_from, enumerate_spaces, Budget, EnumerationConstraints,
    EnumerationError,
};
use colored_spaces::isometry::a3_count;
use colored_spaces::{isomorphism_key, IsomorphismKey};

// Frozen from an independent brute-force dedup of every coloring of K_5.
const CLASSES_AT_5: usize = 1299;
const CLASSES_AT_5_BY_COLORS: [usize; 10] = [1, 17, 124, 371, 443, 249, 76, 15, 2, 1];

fn keys(c: &EnumerationConstraints) -> Vec<IsomorphismKey> {
    let mut out = Vec::new();
    enumerate_spaces(c, Budget::unlimited(), |k, _| out.push(k.clone())).unwrap();
    out
}

#[test]
fn five_point_classes_match_brute_force_dedup() {
    let mut by_colors: BTreeMap<usize, BTreeSet<IsomorphismKey>> = BTreeMap::new();
    enumerate_all_colorings(5, |s| {
        by_colors
            .entry(s.color_count())
            .or_default()
            .insert(isomorphism_key(s));
    })
    .unwrap();
    let counts: Vec<usize> = by_colors.values().map(BTreeSet::len).collect();
    assert_eq!(counts, CLASSES_AT_5_BY_COLORS);

    let engine = keys(&EnumerationConstraints::new(5));
    assert_eq!(engine.len(), CLASSES_AT_5);
    let all: BTreeSet<IsomorphismKey> = by_colors.into_values().flatten().collect();
    assert_eq!(engine.into_iter().collect::<BTreeSet<_>>(), all);
}

#[test]
fn color_cap_matches_filtered_universe() {
    let capped = keys(&EnumerationConstraints::new(5).max_colors(4));
    assert_eq!(
        capped.len(),
        CLASSES_AT_5_BY_COLORS[..4].iter().sum::<usize>()
    );
}

#[test]
fn exact_color_pruning_is_sound() {
    for n in [6, 7] {
        let pruned = keys(
            &EnumerationConstraints::new(n)
                .max_colors(4)
                .max_a3(4)
                .exact_colors(4),
        );
        let mut unpruned = Vec::new();
        enumerate_spaces(
            &EnumerationConstraints::new(n).max_colors(4).max_a3(4),
            Budget::unlimited(),
            |k, s| {
                if s.color_count() == 4 {
                    unpruned.push(k.clone());
                }
            },
        )
        .unwrap();
        assert_eq!(pruned, unpruned, "n = {n}");
    }
}

#[test]
fn a3_cap_is_respected() {
    enumerate_spaces(
        &EnumerationConstraints::new(7).max_a3(3),
        Budget::unlimited(),
        |_, s| {
            assert!(a3_count(s) <= 3);
        },
    )
    .unwrap();
}

#[test]
fn resumed_run_matches_uninterrupted_run() {
    let c = EnumerationConstraints::new(6).max_colors(3);
    let straight = keys(&c);
    let budget = Budget {
        max_nodes: Some(50),
        max_time: None,
    };
    let checkpoint = match enumerate_spaces(&c, budget, |_, _| {}) {
        Err(EnumerationError::BudgetExceeded { checkpoint, .. }) => checkpoint,
        other => panic!("expected the budget to run out, got {other:?}"),
    };
    let restored = colored_spaces::enumerate::Checkpoint::from_json(&checkpoint.to_json()).unwrap();
    let mut resumed = Vec::new();
    enumerate_from(&c, Budget::unlimited(), Some(&restored), |k, _| {
        resumed.push(k.clone())
    })
    .unwrap();
    assert_eq!(resumed, straight);
}

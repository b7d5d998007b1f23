use colored_spaces::examples::{
    bipartite_matchings_8, four_two_split_6, triangles_cross_matchings_6, triangles_single_edge_6,
};
use colored_spaces::isometry::{a3_set_of, subsets};
use colored_spaces::{a3_set, Color, ColoredSpace, TriangleType, TriangleTypeSet};

fn types(list: &[[u8; 3]]) -> TriangleTypeSet {
    list.iter()
        .map(|&[a, b, c]| TriangleType::new(Color(a), Color(b), Color(c)))
        .collect()
}

/// Subsets with at least `min_size` points passing `keep` whose triangle types differ
/// from `expected`.
fn exceptions(
    space: &ColoredSpace,
    min_size: usize,
    keep: impl Fn(&[usize]) -> bool,
    expected: &TriangleTypeSet,
) -> (usize, Vec<Vec<usize>>) {
    let mut checked = 0;
    let mut out = Vec::new();
    for k in min_size..=space.n() {
        for w in subsets(space.n(), k).filter(|w| keep(w)) {
            checked += 1;
            if a3_set_of(space, &w).unwrap() != *expected {
                out.push(w);
            }
        }
    }
    (checked, out)
}

fn on_y(w: &[usize], y: usize) -> usize {
    w.iter().filter(|&&p| p < y).count()
}

#[test]
fn four_two_split_types_on_every_large_subset_containing_z() {
    let expected = types(&[[0, 0, 1], [0, 0, 2], [1, 1, 2], [0, 0, 3]]);
    let (checked, bad) = exceptions(
        &four_two_split_6(),
        5,
        |w| w.contains(&4) && w.contains(&5),
        &expected,
    );
    assert_eq!((checked, bad.len()), (5, 0));
}

#[test]
fn triangles_cross_matchings_types_away_from_two_on_y() {
    let expected = types(&[[0, 0, 0], [0, 1, 2], [0, 2, 3], [0, 1, 3]]);
    let (checked, bad) = exceptions(
        &triangles_cross_matchings_6(),
        4,
        |w| on_y(w, 3) != 2,
        &expected,
    );
    assert_eq!((checked, bad.len()), (10, 0));
}

#[test]
fn bipartite_matchings_types_fail_only_inside_one_side() {
    let s = bipartite_matchings_8();
    let expected = types(&[[0, 0, 1], [0, 0, 2], [0, 0, 3], [1, 2, 3]]);
    assert_eq!(a3_set(&s).unwrap(), expected);
    let (checked, bad) = exceptions(&s, 4, |w| on_y(w, 4) != 2, &expected);
    assert_eq!(checked, 97);
    // a side alone has only the three inner matchings
    assert_eq!(bad, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
    let inner = a3_set_of(&s, &[0, 1, 2, 3]).unwrap();
    assert_eq!(inner, types(&[[1, 2, 3]]));
    let (_, bad) = exceptions(
        &s,
        4,
        |w| on_y(w, 4) != 2 && on_y(w, 4) != 0 && on_y(w, 4) != w.len(),
        &expected,
    );
    assert!(bad.is_empty());
}

#[test]
fn triangles_single_edge_types_need_five_points() {
    let s = triangles_single_edge_6();
    let expected = types(&[[0, 0, 1], [0, 0, 2], [1, 1, 2], [0, 1, 3]]);
    assert_eq!(a3_set(&s).unwrap(), expected);
    let keep = |w: &[usize]| w.contains(&0) && w.contains(&3) && on_y(w, 3) != 2;
    let (checked, bad) = exceptions(&s, 4, keep, &expected);
    assert_eq!(checked, 5);
    assert_eq!(bad, vec![vec![0, 1, 2, 3], vec![0, 3, 4, 5]]);
    let (checked, bad) = exceptions(&s, 5, keep, &expected);
    assert_eq!((checked, bad.len()), (3, 0));
}

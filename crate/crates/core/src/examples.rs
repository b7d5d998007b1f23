//! Named colored spaces and the three pattern families.
//!
//! In the four-color constructions the roles are numbered `α=0, β=1, γ=2, δ=3`.

use thiserror::Error;

use crate::space::{pair_count, ColoredSpace, SpaceError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExampleError {
    #[error("matching {index} shares point {point} with another edge")]
    NotAMatching { index: usize, point: usize },
    #[error("pair {{{0},{1}}} appears in more than one matching")]
    Overlap(usize, usize),
    #[error("matching {0} is empty")]
    EmptyMatching(usize),
    #[error("pair {{{0},{1}}} does not join the two cliques")]
    NotCrossing(usize, usize),
    #[error("the matchings use every pair, leaving no remainder class")]
    EmptyRemainder,
    #[error("clique sizes must both be at least 2, got ({0},{1})")]
    CliqueTooSmall(usize, usize),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Regular octahedron: sides get color 0, the three antipodal pairs `{i, i+3}` color 1.
pub fn octahedron() -> ColoredSpace {
    ColoredSpace::from_fn(6, |i, j| u8::from(j == i + 3)).expect("valid construction")
}

/// Regular hexagon: sides 0, short diagonals 1, long diagonals 2.
pub fn hexagon() -> ColoredSpace {
    ColoredSpace::from_fn(6, |i, j| {
        let d = (j - i).min(6 + i - j);
        (d - 1) as u8
    })
    .expect("valid construction")
}

/// Every pair gets its own color, numbered in pair order.
pub fn rainbow(n: usize) -> ColoredSpace {
    let mut next = 0u8;
    ColoredSpace::from_fn(n, |_, _| {
        next += 1;
        next - 1
    })
    .expect("valid construction")
}

pub fn monochromatic(n: usize) -> ColoredSpace {
    ColoredSpace::from_fn(n, |_, _| 0).expect("valid construction")
}

/// Eight points, `Y = {0..3}`, `Z = {4..7}`. `α` joins `Y` to `Z`; inside each side
/// the three perfect matchings of `K_4` get `β = {01,23}`, `γ = {02,13}`, `δ = {03,12}`
/// (shifted by 4 on `Z`).
pub fn bipartite_matchings_8() -> ColoredSpace {
    fn inner(a: usize, b: usize) -> u8 {
        match (a, b) {
            (0, 1) | (2, 3) => 1,
            (0, 2) | (1, 3) => 2,
            _ => 3,
        }
    }
    ColoredSpace::from_fn(8, |i, j| match (i < 4, j < 4) {
        (true, true) => inner(i, j),
        (false, false) => inner(i - 4, j - 4),
        _ => 0,
    })
    .expect("valid construction")
}

/// Six points, `Y = {0..3}`, `Z = {4,5}`. `α` joins `Y` to `Z`, `γ = {01,23}` is a
/// perfect matching on `Y`, `β` the rest of `Y`, and `δ = {45}`.
pub fn four_two_split_6() -> ColoredSpace {
    ColoredSpace::from_fn(6, |i, j| match (i < 4, j < 4) {
        (true, true) if (i, j) == (0, 1) || (i, j) == (2, 3) => 2,
        (true, true) => 1,
        (false, false) => 3,
        _ => 0,
    })
    .expect("valid construction")
}

/// Six points, `Y = {0,1,2}`, `Z = {3,4,5}`, `(y0, z0) = (0, 3)`. `δ = {03}`, `α` the
/// other `Y`–`Z` pairs, `γ = {12, 45}`, and `β` the remaining pairs `{01,02,34,35}`.
pub fn triangles_single_edge_6() -> ColoredSpace {
    ColoredSpace::from_fn(6, |i, j| match (i < 3, j < 3) {
        (true, false) if (i, j) == (0, 3) => 3,
        (true, false) => 0,
        _ if (i, j) == (1, 2) || (i, j) == (4, 5) => 2,
        _ => 1,
    })
    .expect("valid construction")
}

/// Six points, `Y = {0,1,2}`, `Z = {3,4,5}`. `α` is both triangles; `β`, `γ`, `δ` are
/// the perfect matchings `i ↔ 3 + (i + s) mod 3` for shifts `s = 0, 1, 2`.
pub fn triangles_cross_matchings_6() -> ColoredSpace {
    ColoredSpace::from_fn(6, |i, j| match (i < 3, j < 3) {
        (true, false) => 1 + ((j - 3 + 3 - i) % 3) as u8,
        _ => 0,
    })
    .expect("valid construction")
}

fn check_matchings(n: usize, matchings: &[Vec<(usize, usize)>]) -> Result<(), ExampleError> {
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut seen = std::collections::HashSet::new();
    for (index, m) in matchings.iter().enumerate() {
        if m.is_empty() {
            return Err(ExampleError::EmptyMatching(index));
        }
        for &(a, b) in m {
            for p in [a, b] {
                if p >= n {
                    return Err(SpaceError::PointOutOfRange { point: p, n }.into());
                }
            }
            if a == b {
                return Err(SpaceError::SamePoint(a).into());
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(ExampleError::Overlap(key.0, key.1));
            }
            for p in [a, b] {
                if owner[p].is_some() {
                    return Err(ExampleError::NotAMatching { index, point: p });
                }
                owner[p] = Some(index);
            }
        }
    }
    Ok(())
}

fn matching_color(matchings: &[Vec<(usize, usize)>], i: usize, j: usize) -> Option<usize> {
    matchings
        .iter()
        .position(|m| m.iter().any(|&(a, b)| (a.min(b), a.max(b)) == (i, j)))
}

/// Matchings get colors `1, 2, …` in the given order; every other pair gets color 0.
pub fn family_matchings(
    n: usize,
    matchings: &[Vec<(usize, usize)>],
) -> Result<ColoredSpace, ExampleError> {
    if n < 2 {
        return Err(SpaceError::TooFewPoints(n).into());
    }
    check_matchings(n, matchings)?;
    let used: usize = matchings.iter().map(Vec::len).sum();
    if used == pair_count(n) {
        return Err(ExampleError::EmptyRemainder);
    }
    Ok(ColoredSpace::from_fn(n, |i, j| {
        matching_color(matchings, i, j).map_or(0, |k| k as u8 + 1)
    })?)
}

/// Cliques on `Y = {0..p-1}` and `Z = {p..p+q-1}` get color 0; the matchings (which
/// must join `Y` to `Z`) get colors `2, 3, …`; the remaining cross pairs get color 1.
pub fn family_two_cliques(
    (p, q): (usize, usize),
    matchings: &[Vec<(usize, usize)>],
) -> Result<ColoredSpace, ExampleError> {
    if p < 2 || q < 2 {
        return Err(ExampleError::CliqueTooSmall(p, q));
    }
    let n = p + q;
    check_matchings(n, matchings)?;
    for m in matchings {
        for &(a, b) in m {
            if (a < p) == (b < p) {
                return Err(ExampleError::NotCrossing(a.min(b), a.max(b)));
            }
        }
    }
    let used: usize = matchings.iter().map(Vec::len).sum();
    if used == p * q {
        return Err(ExampleError::EmptyRemainder);
    }
    Ok(ColoredSpace::from_fn(n, |i, j| {
        if (i < p) == (j < p) {
            0
        } else {
            matching_color(matchings, i, j).map_or(1, |k| k as u8 + 2)
        }
    })?)
}

/// The edge `{0, 1}` gets `δ = 3`; pairs `{0, u}` get `γ = 2`, pairs `{1, u}` get
/// `β = 1`, and pairs inside `{2..n-1}` get `α = 0`.
pub fn family_edge_apex(n: usize) -> ColoredSpace {
    assert!(n >= 4, "edge-apex spaces need at least 4 points");
    ColoredSpace::from_fn(n, |i, j| match (i, j) {
        (0, 1) => 3,
        (0, _) => 2,
        (1, _) => 1,
        _ => 0,
    })
    .expect("valid construction")
}

/// The fixed-size named spaces by their command-line names.
pub fn named(name: &str) -> Option<ColoredSpace> {
    Some(match name {
        "octahedron" => octahedron(),
        "hexagon" => hexagon(),
        "bipartite-matchings-8" => bipartite_matchings_8(),
        "four-two-split-6" => four_two_split_6(),
        "triangles-single-edge-6" => triangles_single_edge_6(),
        "triangles-cross-matchings-6" => triangles_cross_matchings_6(),
        _ => return None,
    })
}

pub const NAMED: [&str; 6] = [
    "octahedron",
    "hexagon",
    "bipartite-matchings-8",
    "four-two-split-6",
    "triangles-single-edge-6",
    "triangles-cross-matchings-6",
];

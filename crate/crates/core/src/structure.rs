//! Closed color sets, lemma checkers evaluated on concrete spaces, and the
//! classifier for the three partition patterns of spaces with `a_2 = a_3 ≥ 4`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::isometry::{a3_count, a3_set, TriangleType, TriangleTypeSet};
use crate::space::{pairs, Color, ColorSet, ColoredSpace, SpaceError};

/// Outcome of evaluating one lemma on one space. `holds` is only meaningful when
/// `applicable` is true; a non-applicable report always has `holds = true`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub applicable: bool,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl LemmaReport {
    fn not_applicable(lemma: &str) -> Self {
        LemmaReport {
            lemma: lemma.to_string(),
            applicable: false,
            holds: true,
            witness: None,
        }
    }

    fn verdict(lemma: &str, holds: bool, witness: Value) -> Self {
        LemmaReport {
            lemma: lemma.to_string(),
            applicable: true,
            holds,
            witness: Some(witness),
        }
    }

    /// Applicable and false.
    pub fn is_violation(&self) -> bool {
        self.applicable && !self.holds
    }
}

pub mod lemma_ids {
    pub const CLOSED_SETS_ARE_CLIQUE_UNIONS: &str = "closed_sets_are_clique_unions";
    pub const BOUNDED_DEGREE_POINT_COUNT: &str = "bounded_degree_point_count";
    pub const ALL_COLORS_NON_MATCHING: &str = "all_colors_non_matching";
    pub const UNIQUE_DELTA_TYPE: &str = "unique_delta_type";
    pub const CLOSED_TRIPLE_DELTA_TYPES: &str = "closed_triple_delta_types";
    pub const CLOSED_PAIR_AAB: &str = "closed_pair_aab";
    pub const NO_MONOCHROMATIC_TRIANGLE_SHAPES: &str = "no_monochromatic_triangle_shapes";
    pub const CLOSED_MONOCHROMATIC_SHAPES: &str = "closed_monochromatic_shapes";
    pub const OPEN_MONOCHROMATIC_SHAPE: &str = "open_monochromatic_shape";
}

use lemma_ids::*;

/// Closedness from the triangle definition: whenever two sides of a triangle have
/// colors in `gamma`, so does the third.
pub fn is_closed(space: &ColoredSpace, gamma: ColorSet) -> Result<bool, SpaceError> {
    space.check_colors(gamma)?;
    if space.n() < 3 {
        return Ok(true);
    }
    let types = a3_set(space)?;
    let closed = types.iter().all(|t| closed_under(t, gamma));
    Ok(closed)
}

fn closed_under(t: TriangleType, gamma: ColorSet) -> bool {
    let c = t.colors();
    (0..3).all(|skip| {
        let others = [c[(skip + 1) % 3], c[(skip + 2) % 3]];
        !(gamma.contains(others[0]) && gamma.contains(others[1])) || gamma.contains(c[skip])
    })
}

/// Closedness from graph structure: every component of the union graph is a clique.
pub fn is_closed_via_cliques(space: &ColoredSpace, gamma: ColorSet) -> Result<bool, SpaceError> {
    let graph = space.color_graph(gamma)?;
    Ok(graph
        .components()
        .iter()
        .all(|comp| comp.iter().all(|&x| graph.degree(x) == comp.len() - 1)))
}

pub fn connected_components(
    space: &ColoredSpace,
    gamma: ColorSet,
) -> Result<Vec<Vec<usize>>, SpaceError> {
    Ok(space.color_graph(gamma)?.components())
}

/// Per-space tables for evaluating closedness of many color sets, both from the
/// triangle types and from the union graphs.
pub struct ClosednessTables {
    n: usize,
    colors: usize,
    types: Vec<[u8; 3]>,
    // adjacency[c * n + x]: neighbours of x in color c
    adjacency: Vec<u32>,
}

impl ClosednessTables {
    pub fn new(space: &ColoredSpace) -> Self {
        let n = space.n();
        let mut types: Vec<[u8; 3]> = crate::isometry::triangles(space)
            .map(|mut t| {
                t.sort_unstable();
                t
            })
            .collect();
        types.sort_unstable();
        types.dedup();
        let mut adjacency = vec![0u32; space.color_count() * n];
        for (i, j) in pairs(n) {
            let c = space.color(i, j) as usize;
            adjacency[c * n + i] |= 1 << j;
            adjacency[c * n + j] |= 1 << i;
        }
        ClosednessTables {
            n,
            colors: space.color_count(),
            types,
            adjacency,
        }
    }

    pub fn by_types(&self, gamma: ColorSet) -> bool {
        self.types.iter().all(|&[a, b, c]| {
            let t = TriangleType::new(Color(a), Color(b), Color(c));
            closed_under(t, gamma)
        })
    }

    /// Every edge `xy` of the union graph has `N[x] = N[y]`.
    pub fn by_cliques(&self, gamma: ColorSet) -> bool {
        let n = self.n;
        let mut closed_nbhd = vec![0u32; n];
        for x in 0..n {
            let mut adj = 0u32;
            for c in gamma.iter() {
                adj |= self.adjacency[c.index() * n + x];
            }
            closed_nbhd[x] = adj | 1 << x;
        }
        (0..n).all(|x| {
            let mut rest = closed_nbhd[x] & !(1 << x);
            while rest != 0 {
                let y = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if closed_nbhd[y] != closed_nbhd[x] {
                    return false;
                }
            }
            true
        })
    }

    /// The first non-empty color set (by bitmask) on which the two tests disagree.
    pub fn first_disagreement(&self) -> Option<ColorSet> {
        let c = self.colors.min(20);
        (1u128..1 << c)
            .map(ColorSet::from_bits)
            .find(|&g| self.by_types(g) != self.by_cliques(g))
    }
}

/// `1 ≤ a_3 ≤ C(a_2 + 2, 3)`; spaces with fewer than three points have `a_3 = 0`
/// and are outside the bound's scope, so they pass.
pub fn check_a3_bound(space: &ColoredSpace) -> bool {
    if space.n() < 3 {
        return true;
    }
    let a2 = space.color_count();
    let a3 = a3_count(space);
    1 <= a3 && a3 <= (a2 + 2) * (a2 + 1) * a2 / 6
}

/// If no color has a vertex of degree `k + 1`, then `n ≤ 1 + k·a_2`, strictly when
/// `k` is odd and `a_2` is even.
pub fn check_lemma_m0(space: &ColoredSpace, k: usize) -> Result<LemmaReport, SpaceError> {
    let n = space.n();
    if k == 0 || k >= n {
        return Err(SpaceError::BadK { k, n });
    }
    let (m_next, _) = space.m_stats(k + 1)?;
    if !m_next.is_empty() {
        return Ok(LemmaReport::not_applicable(BOUNDED_DEGREE_POINT_COUNT));
    }
    let a2 = space.color_count();
    let bound = 1 + k * a2;
    let strict = k % 2 == 1 && a2.is_multiple_of(2);
    let holds = if strict { n < bound } else { n <= bound };
    Ok(LemmaReport::verdict(
        BOUNDED_DEGREE_POINT_COUNT,
        holds,
        json!({"k": k, "n": n, "a2": a2, "bound": bound, "strict": strict}),
    ))
}

/// `a_2 = a_3 = m_2` forces `a_2 ≤ 2`.
pub fn check_lemma_m2(space: &ColoredSpace) -> LemmaReport {
    if space.n() < 3 {
        return LemmaReport::not_applicable(ALL_COLORS_NON_MATCHING);
    }
    let a2 = space.color_count();
    let a3 = a3_count(space);
    let m2 = space.m2();
    if !(a2 == a3 && a3 == m2) {
        return LemmaReport::not_applicable(ALL_COLORS_NON_MATCHING);
    }
    LemmaReport::verdict(
        ALL_COLORS_NON_MATCHING,
        a2 <= 2,
        json!({"a2": a2, "a3": a3, "m2": m2}),
    )
}

/// If `βγδ` is the only triangle type in which `δ` occurs and `α ∉ {β,γ,δ}`, then
/// `αβγ ∈ A_3` or both `ββα, γγα ∈ A_3`; for `n ≥ 5` also `β, γ ∈ M_2`.
pub fn check_lemma_delta(space: &ColoredSpace) -> LemmaReport {
    if space.n() < 3 {
        return LemmaReport::not_applicable(UNIQUE_DELTA_TYPE);
    }
    let types = a3_set(space).expect("n >= 3");
    let (m2, _) = space.m_stats(2).expect("n >= 3");
    let mut applicable = false;
    let mut failures = Vec::new();
    for delta in space.colors().iter() {
        let mut containing = types.containing(delta);
        let (Some(t), None) = (containing.next(), containing.next()) else {
            continue;
        };
        let mut rest: Vec<Color> = t.colors().to_vec();
        let pos = rest
            .iter()
            .position(|&c| c == delta)
            .expect("type contains delta");
        rest.remove(pos);
        let (beta, gamma) = (rest[0], rest[1]);
        for alpha in space.colors().iter() {
            if alpha == beta || alpha == gamma || alpha == delta {
                continue;
            }
            applicable = true;
            let types_ok = types.has(alpha, beta, gamma)
                || (types.has(beta, beta, alpha) && types.has(gamma, gamma, alpha));
            let m2_ok = space.n() < 5 || (m2.contains(beta) && m2.contains(gamma));
            if !(types_ok && m2_ok) {
                failures.push(json!({
                    "alpha": alpha, "beta": beta, "gamma": gamma, "delta": delta,
                    "types_ok": types_ok, "m2_ok": m2_ok,
                }));
            }
        }
    }
    if !applicable {
        return LemmaReport::not_applicable(UNIQUE_DELTA_TYPE);
    }
    LemmaReport::verdict(
        UNIQUE_DELTA_TYPE,
        failures.is_empty(),
        json!({ "failures": failures }),
    )
}

/// With four colors, a closed 3-set `{α,β,γ}` forces `αδδ, βδδ, γδδ ∈ A_3` for the
/// fourth color `δ`.
pub fn check_lemma_closed_triple(space: &ColoredSpace) -> LemmaReport {
    if space.color_count() != 4 || space.n() < 3 {
        return LemmaReport::not_applicable(CLOSED_TRIPLE_DELTA_TYPES);
    }
    let types = a3_set(space).expect("n >= 3");
    let mut applicable = false;
    let mut failures = Vec::new();
    for d in 0..4u8 {
        let delta = Color(d);
        let mut triple = space.colors();
        triple.remove(delta);
        if !is_closed(space, triple).expect("valid colors") {
            continue;
        }
        applicable = true;
        for c in triple.iter() {
            if !types.has(c, delta, delta) {
                failures
                    .push(json!({"closed": triple, "delta": delta, "missing": [c, delta, delta]}));
            }
        }
    }
    if !applicable {
        return LemmaReport::not_applicable(CLOSED_TRIPLE_DELTA_TYPES);
    }
    LemmaReport::verdict(
        CLOSED_TRIPLE_DELTA_TYPES,
        failures.is_empty(),
        json!({ "failures": failures }),
    )
}

/// Under `a_2 = a_3 = 4`: if `{α,β}` is closed, `ααβ ∈ A_3`, and another type uses only
/// `α` and `β`, then every outside point `x` of a component `Y` of `E_α ∪ E_β` that
/// contains an `ααβ` triangle `x0,x1,x2` satisfies `r(x1,x) = r(x2,x) ≠ r(x0,x) ∉ M_2`,
/// `X∖Y` is a single point, and `A_3 = {βββ, ααβ, γγβ, αγδ}`.
pub fn check_lemma_closed_pair(space: &ColoredSpace) -> LemmaReport {
    let n = space.n();
    if n < 3 || space.color_count() != 4 || a3_count(space) != 4 {
        return LemmaReport::not_applicable(CLOSED_PAIR_AAB);
    }
    let types = a3_set(space).expect("n >= 3");
    let (m2, _) = space.m_stats(2).expect("n >= 3");
    let mut applicable = false;
    let mut failures = Vec::new();
    for alpha in space.colors().iter() {
        for beta in space.colors().iter() {
            if alpha == beta || !types.has(alpha, alpha, beta) {
                continue;
            }
            let pair: ColorSet = [alpha, beta].into_iter().collect();
            if !is_closed(space, pair).expect("valid colors") {
                continue;
            }
            let aab = TriangleType::new(alpha, alpha, beta);
            let other_in_pair = types
                .iter()
                .any(|t| t != aab && t.colors().iter().all(|c| pair.contains(*c)));
            if !other_in_pair {
                continue;
            }
            applicable = true;
            let components = connected_components(space, pair).expect("valid colors");
            for comp in &components {
                for &x0 in comp {
                    for &x1 in comp {
                        for &x2 in comp {
                            if x1 >= x2 || x0 == x1 || x0 == x2 {
                                continue;
                            }
                            if space.color(x0, x1) != alpha.0
                                || space.color(x0, x2) != alpha.0
                                || space.color(x1, x2) != beta.0
                            {
                                continue;
                            }
                            let outside: Vec<usize> =
                                (0..n).filter(|p| !comp.contains(p)).collect();
                            if outside.len() != 1 {
                                failures.push(json!({"alpha": alpha, "beta": beta, "component": comp,
                                    "reason": "complement of the component is not a single point"}));
                            }
                            for &x in &outside {
                                let g = space.color(x1, x);
                                let d = space.color(x0, x);
                                let ok =
                                    g == space.color(x2, x) && g != d && !m2.contains(Color(d));
                                if !ok {
                                    failures.push(json!({"alpha": alpha, "beta": beta,
                                        "x0": x0, "x1": x1, "x2": x2, "x": x}));
                                }
                                let (gamma, delta) = (Color(g), Color(d));
                                let expected: TriangleTypeSet = [
                                    TriangleType::new(beta, beta, beta),
                                    aab,
                                    TriangleType::new(gamma, gamma, beta),
                                    TriangleType::new(alpha, gamma, delta),
                                ]
                                .into_iter()
                                .collect();
                                if expected != types {
                                    failures.push(json!({"alpha": alpha, "beta": beta,
                                        "gamma": gamma, "delta": delta, "reason": "A_3 differs"}));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    if !applicable {
        return LemmaReport::not_applicable(CLOSED_PAIR_AAB);
    }
    failures.dedup();
    LemmaReport::verdict(
        CLOSED_PAIR_AAB,
        failures.is_empty(),
        json!({ "failures": failures }),
    )
}

/// A four-color triangle-type template over roles `α=0, β=1, γ=2, δ=3`, with the
/// largest point count at which it can occur (if bounded).
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub name: &'static str,
    pub types: [[u8; 3]; 4],
    pub max_points: Option<usize>,
}

pub const SHAPE_AAB_AAG_AAD_BGD: Shape = Shape {
    name: "aab,aag,aad,bgd",
    types: [[0, 0, 1], [0, 0, 2], [0, 0, 3], [1, 2, 3]],
    max_points: Some(8),
};
pub const SHAPE_AAB_AAG_BBG_AAD: Shape = Shape {
    name: "aab,aag,bbg,aad",
    types: [[0, 0, 1], [0, 0, 2], [1, 1, 2], [0, 0, 3]],
    max_points: Some(6),
};
pub const SHAPE_AAB_AAG_BBG_ABD: Shape = Shape {
    name: "aab,aag,bbg,abd",
    types: [[0, 0, 1], [0, 0, 2], [1, 1, 2], [0, 1, 3]],
    max_points: Some(6),
};
pub const SHAPE_AAA_ABG_AGD_ABD: Shape = Shape {
    name: "aaa,abg,agd,abd",
    types: [[0, 0, 0], [0, 1, 2], [0, 2, 3], [0, 1, 3]],
    max_points: Some(6),
};
pub const SHAPE_AAA_ABB_AGG_BGD: Shape = Shape {
    name: "aaa,abb,agg,bgd",
    types: [[0, 0, 0], [0, 1, 1], [0, 2, 2], [1, 2, 3]],
    max_points: None,
};
pub const SHAPE_AAA_ABB_ABG_ABD: Shape = Shape {
    name: "aaa,abb,abg,abd",
    types: [[0, 0, 0], [0, 1, 1], [0, 1, 2], [0, 1, 3]],
    max_points: None,
};
pub const SHAPE_AAA_AAB_AAG_AAD: Shape = Shape {
    name: "aaa,aab,aag,aad",
    types: [[0, 0, 0], [0, 0, 1], [0, 0, 2], [0, 0, 3]],
    max_points: None,
};

const NO_MONOCHROMATIC_SHAPE_LIST: [Shape; 3] = [
    SHAPE_AAB_AAG_AAD_BGD,
    SHAPE_AAB_AAG_BBG_AAD,
    SHAPE_AAB_AAG_BBG_ABD,
];
const CLOSED_MONOCHROMATIC_SHAPE_LIST: [Shape; 3] = [
    SHAPE_AAA_ABG_AGD_ABD,
    SHAPE_AAA_ABB_AGG_BGD,
    SHAPE_AAA_ABB_ABG_ABD,
];

fn permutations4() -> Vec<[u8; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4u8 {
        for b in (0..4u8).filter(|&b| b != a) {
            for c in (0..4u8).filter(|&c| c != a && c != b) {
                out.push([a, b, c, 6 - a - b - c]);
            }
        }
    }
    out
}

/// The role assignment `role → color` under which `types` equals `shape`, if any.
pub fn match_shape(types: &TriangleTypeSet, shape: &Shape) -> Option<[Color; 4]> {
    if types.len() != 4 {
        return None;
    }
    permutations4().into_iter().find_map(|p| {
        let image: TriangleTypeSet = shape
            .types
            .iter()
            .map(|t| {
                TriangleType::new(
                    Color(p[t[0] as usize]),
                    Color(p[t[1] as usize]),
                    Color(p[t[2] as usize]),
                )
            })
            .collect();
        (image == *types).then(|| p.map(Color))
    })
}

fn shape_report(
    lemma: &str,
    space: &ColoredSpace,
    types: &TriangleTypeSet,
    shapes: &[Shape],
) -> LemmaReport {
    let n = space.n();
    let matched = shapes
        .iter()
        .find_map(|s| match_shape(types, s).map(|roles| (s, roles)));
    match matched {
        Some((shape, roles)) => {
            let within = shape.max_points.is_none_or(|m| n <= m);
            LemmaReport::verdict(
                lemma,
                within,
                json!({"shape": shape.name, "roles": roles, "n": n, "max_points": shape.max_points}),
            )
        }
        None => LemmaReport::verdict(
            lemma,
            false,
            json!({"a3": types, "reason": "no listed shape"}),
        ),
    }
}

fn has_monochromatic(types: &TriangleTypeSet) -> Option<Color> {
    types.iter().find_map(|t| {
        let [a, b, c] = t.colors();
        (a == b && b == c).then_some(a)
    })
}

/// Under `a_2 = a_3 = 4`, `m_3 > 0` and no monochromatic triangle: `A_3` is one of
/// three listed shapes, with point bounds 8, 6, 6.
pub fn check_lemma_no_monochromatic(space: &ColoredSpace) -> LemmaReport {
    let Some(types) = four_four(space) else {
        return LemmaReport::not_applicable(NO_MONOCHROMATIC_TRIANGLE_SHAPES);
    };
    let m3 = space.m_stats(3).map(|(_, m)| m).unwrap_or(0);
    if m3 == 0 || has_monochromatic(&types).is_some() {
        return LemmaReport::not_applicable(NO_MONOCHROMATIC_TRIANGLE_SHAPES);
    }
    shape_report(
        NO_MONOCHROMATIC_TRIANGLE_SHAPES,
        space,
        &types,
        &NO_MONOCHROMATIC_SHAPE_LIST,
    )
}

/// Under `a_2 = a_3 = 4`, a color `α` with `ααα ∈ A_3` and `{α}` closed: `A_3` is one
/// of three listed shapes, the first only for `n ≤ 6`.
pub fn check_lemma_closed_monochromatic(space: &ColoredSpace) -> LemmaReport {
    check_monochromatic(space, true)
}

/// Under `a_2 = a_3 = 4`, a color `α` with `ααα ∈ A_3` and `{α}` not closed:
/// `A_3 = {ααα, ααβ, ααγ, ααδ}`.
pub fn check_lemma_open_monochromatic(space: &ColoredSpace) -> LemmaReport {
    check_monochromatic(space, false)
}

fn check_monochromatic(space: &ColoredSpace, closed: bool) -> LemmaReport {
    let (lemma, shapes): (&str, &[Shape]) = if closed {
        (
            CLOSED_MONOCHROMATIC_SHAPES,
            &CLOSED_MONOCHROMATIC_SHAPE_LIST,
        )
    } else {
        (OPEN_MONOCHROMATIC_SHAPE, &[SHAPE_AAA_AAB_AAG_AAD])
    };
    let Some(types) = four_four(space) else {
        return LemmaReport::not_applicable(lemma);
    };
    let fires = space.colors().iter().any(|a| {
        types.has(a, a, a)
            && is_closed(space, ColorSet::singleton(a)).expect("valid color") == closed
    });
    if !fires {
        return LemmaReport::not_applicable(lemma);
    }
    shape_report(lemma, space, &types, shapes)
}

/// `A_3` when `a_2 = a_3 = 4`.
fn four_four(space: &ColoredSpace) -> Option<TriangleTypeSet> {
    if space.n() < 3 || space.color_count() != 4 {
        return None;
    }
    let types = a3_set(space).ok()?;
    (types.len() == 4).then_some(types)
}

/// Every lemma checker that takes only the space.
pub fn all_lemma_reports(space: &ColoredSpace) -> Vec<LemmaReport> {
    let mut out = Vec::new();
    for k in 1..space.n() {
        out.push(check_lemma_m0(space, k).expect("1 <= k < n"));
    }
    out.push(check_lemma_m2(space));
    out.push(check_lemma_delta(space));
    out.push(check_lemma_closed_triple(space));
    out.push(check_lemma_closed_pair(space));
    out.push(check_lemma_no_monochromatic(space));
    out.push(check_lemma_closed_monochromatic(space));
    out.push(check_lemma_open_monochromatic(space));
    out
}

/// A witness that a space realises one of the three partition patterns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum PatternMatch {
    /// Every color but `remainder_color` is a matching, and these matchings are
    /// pairwise vertex-disjoint.
    MatchingsPlusRemainder {
        matching_colors: ColorSet,
        remainder_color: Color,
    },
    /// `clique_color` is exactly the pairs inside `Y` and inside `Z`; the other colors
    /// cross, all but `remainder_color` being vertex-disjoint matchings.
    TwoCliquesCrossMatchings {
        parts: (Vec<usize>, Vec<usize>),
        clique_color: Color,
        matching_colors: ColorSet,
        remainder_color: Color,
    },
    /// `delta` is the single edge `{y, z}`; `gamma` joins `y`, `beta` joins `z` to every
    /// other point; `alpha` is every pair avoiding `y` and `z`.
    EdgeApex {
        edge: (usize, usize),
        delta: Color,
        gamma: Color,
        beta: Color,
        alpha: Color,
    },
}

impl PatternMatch {
    pub fn label(&self) -> &'static str {
        match self {
            PatternMatch::MatchingsPlusRemainder { .. } => "matchings-plus-remainder",
            PatternMatch::TwoCliquesCrossMatchings { .. } => "two-cliques-cross-matchings",
            PatternMatch::EdgeApex { .. } => "edge-apex",
        }
    }
}

fn union_is_matching(space: &ColoredSpace, colors: ColorSet) -> bool {
    colors.is_empty() || space.is_matching(colors).expect("known colors")
}

/// All instantiations of the three patterns that the space realises.
pub fn classify_patterns(space: &ColoredSpace) -> Vec<PatternMatch> {
    let mut out = Vec::new();
    let all = space.colors();
    let c = space.color_count();

    for remainder in all.iter() {
        let mut matchings = all;
        matchings.remove(remainder);
        if (matchings.is_empty() && c == 1)
            || (!matchings.is_empty() && union_is_matching(space, matchings))
        {
            out.push(PatternMatch::MatchingsPlusRemainder {
                matching_colors: matchings,
                remainder_color: remainder,
            });
        }
    }

    for clique in all.iter() {
        let comps = connected_components(space, ColorSet::singleton(clique)).expect("known color");
        if comps.len() != 2 || comps.iter().any(|p| p.len() < 2) {
            continue;
        }
        if !is_closed_via_cliques(space, ColorSet::singleton(clique)).expect("known color") {
            continue;
        }
        let mut cross = all;
        cross.remove(clique);
        for remainder in cross.iter() {
            let mut matchings = cross;
            matchings.remove(remainder);
            if union_is_matching(space, matchings) {
                out.push(PatternMatch::TwoCliquesCrossMatchings {
                    parts: (comps[0].clone(), comps[1].clone()),
                    clique_color: clique,
                    matching_colors: matchings,
                    remainder_color: remainder,
                });
            }
        }
    }

    if c == 4 && space.n() >= 4 {
        let sizes = space.class_sizes();
        for delta in all.iter().filter(|d| sizes[d.index()] == 1) {
            let (y, z) = space.class(delta)[0];
            if let Some(m) = edge_apex_roles(space, delta, y, z) {
                out.push(m);
            }
        }
    }
    out
}

fn edge_apex_roles(space: &ColoredSpace, delta: Color, y: usize, z: usize) -> Option<PatternMatch> {
    let n = space.n();
    let rest: Vec<usize> = (0..n).filter(|&p| p != y && p != z).collect();
    let gamma = space.color(y, rest[0]);
    let beta = space.color(z, rest[0]);
    let alpha = space.color(rest[0], rest[1]);
    let uniform = rest
        .iter()
        .all(|&u| space.color(y, u) == gamma && space.color(z, u) == beta)
        && pairs(rest.len()).all(|(a, b)| space.color(rest[a], rest[b]) == alpha);
    let distinct: ColorSet = [delta.0, gamma, beta, alpha]
        .into_iter()
        .map(Color)
        .collect();
    (uniform && distinct.len() == 4).then_some(PatternMatch::EdgeApex {
        edge: (y, z),
        delta,
        gamma: Color(gamma),
        beta: Color(beta),
        alpha: Color(alpha),
    })
}

/// Re-checks a witness pair by pair against its defining conditions.
pub fn validate_pattern(space: &ColoredSpace, m: &PatternMatch) -> bool {
    let n = space.n();
    let all = space.colors();
    match m {
        PatternMatch::MatchingsPlusRemainder {
            matching_colors,
            remainder_color,
        } => {
            !matching_colors.contains(*remainder_color)
                && matching_colors.union(ColorSet::singleton(*remainder_color)) == all
                && matching_colors.is_subset(all)
                && matching_colors
                    .iter()
                    .all(|c| union_is_matching(space, ColorSet::singleton(c)))
                && union_is_matching(space, *matching_colors)
        }
        PatternMatch::TwoCliquesCrossMatchings {
            parts: (y, z),
            clique_color,
            matching_colors,
            remainder_color,
        } => {
            let mut side = vec![None; n];
            for &p in y {
                side[p] = Some(0);
            }
            for &p in z {
                if p >= n || side[p].is_some() {
                    return false;
                }
                side[p] = Some(1);
            }
            if y.len() < 2 || z.len() < 2 || side.iter().any(Option::is_none) {
                return false;
            }
            let cross_ok = pairs(n).all(|(i, j)| {
                let c = Color(space.color(i, j));
                if side[i] == side[j] {
                    c == *clique_color
                } else {
                    c != *clique_color && (matching_colors.contains(c) || c == *remainder_color)
                }
            });
            cross_ok
                && !matching_colors.contains(*remainder_color)
                && !matching_colors.contains(*clique_color)
                && *remainder_color != *clique_color
                && union_is_matching(space, *matching_colors)
        }
        PatternMatch::EdgeApex {
            edge: (y, z),
            delta,
            gamma,
            beta,
            alpha,
        } => {
            let (y, z) = (*y, *z);
            if y >= n || z >= n || y == z || space.color_count() != 4 {
                return false;
            }
            pairs(n).all(|(i, j)| {
                let c = Color(space.color(i, j));
                let expected = match ((i == y || i == z), (j == y || j == z)) {
                    (true, true) => *delta,
                    (false, false) => *alpha,
                    _ => {
                        if i == y || j == y {
                            *gamma
                        } else {
                            *beta
                        }
                    }
                };
                c == expected
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::*;

    fn set(cs: &[u8]) -> ColorSet {
        cs.iter().map(|&c| Color(c)).collect()
    }

    #[test]
    fn closedness_examples() {
        let o = octahedron();
        assert!(is_closed(&o, set(&[1])).unwrap());
        assert!(is_closed_via_cliques(&o, set(&[1])).unwrap());
        assert!(is_closed(&o, set(&[0, 1])).unwrap());
        let h = hexagon();
        assert!(!is_closed(&h, set(&[0])).unwrap());
        assert!(!is_closed_via_cliques(&h, set(&[0])).unwrap());
        assert_eq!(
            is_closed(&h, ColorSet::empty()),
            Err(SpaceError::EmptyColorSet)
        );
        assert_eq!(
            is_closed(&h, set(&[7])),
            Err(SpaceError::UnknownColor(Color(7)))
        );
    }

    #[test]
    fn components() {
        let parts = connected_components(&octahedron(), set(&[1])).unwrap();
        assert_eq!(parts, vec![vec![0, 3], vec![1, 4], vec![2, 5]]);
        assert_eq!(
            connected_components(&monochromatic(5), set(&[0]))
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn degree_bound_lemma() {
        let r = check_lemma_m0(&rainbow(4), 1).unwrap();
        assert!(r.applicable && r.holds);
        assert_eq!(r.witness.unwrap()["strict"], json!(true));
        assert!(!check_lemma_m0(&monochromatic(5), 3).unwrap().applicable);
        assert!(check_lemma_m0(&monochromatic(5), 5).is_err());
    }

    #[test]
    fn non_matching_lemma() {
        assert!(!check_lemma_m2(&octahedron()).applicable);
        let r = check_lemma_m2(&monochromatic(4));
        assert!(r.applicable && r.holds);
    }

    #[test]
    fn delta_lemma_on_edge_apex_example() {
        let r = check_lemma_delta(&triangles_single_edge_6());
        assert!(r.applicable, "{r:?}");
        assert!(r.holds, "{r:?}");
        assert!(!check_lemma_delta(&monochromatic(5)).applicable);
    }

    #[test]
    fn shapes_of_examples() {
        let t = a3_set(&bipartite_matchings_8()).unwrap();
        assert!(match_shape(&t, &SHAPE_AAB_AAG_AAD_BGD).is_some());
        let r = check_lemma_no_monochromatic(&bipartite_matchings_8());
        assert!(r.applicable && r.holds, "{r:?}");
        let r = check_lemma_no_monochromatic(&four_two_split_6());
        assert!(r.applicable && r.holds, "{r:?}");
        let r = check_lemma_closed_monochromatic(&triangles_cross_matchings_6());
        assert!(r.applicable && r.holds, "{r:?}");
        let r = check_lemma_open_monochromatic(&family_edge_apex(9));
        assert!(!r.applicable || r.holds, "{r:?}");
    }

    #[test]
    fn classify_examples() {
        let m = classify_patterns(&family_edge_apex(9));
        assert_eq!(
            m.iter()
                .filter(|p| matches!(p, PatternMatch::EdgeApex { .. }))
                .count(),
            1
        );
        assert!(
            classify_patterns(&octahedron()).contains(&PatternMatch::MatchingsPlusRemainder {
                matching_colors: set(&[1]),
                remainder_color: Color(0),
            })
        );
        assert!(classify_patterns(&rainbow(5)).is_empty());
        for s in [
            family_edge_apex(9),
            octahedron(),
            hexagon(),
            monochromatic(4),
        ] {
            for p in classify_patterns(&s) {
                assert!(validate_pattern(&s, &p), "{p:?}");
            }
        }
    }

    #[test]
    fn pattern_json_has_variant_tag() {
        let p = PatternMatch::MatchingsPlusRemainder {
            matching_colors: set(&[1]),
            remainder_color: Color(0),
        };
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"variant":"MatchingsPlusRemainder","matching_colors":[1],"remainder_color":0}"#
        );
    }

    #[test]
    fn tables_agree_with_reference() {
        for s in [
            octahedron(),
            hexagon(),
            bipartite_matchings_8(),
            triangles_single_edge_6(),
            rainbow(4),
        ] {
            let t = ClosednessTables::new(&s);
            for bits in 1u128..1 << s.color_count() {
                let g = ColorSet::from_bits(bits);
                assert_eq!(t.by_types(g), is_closed(&s, g).unwrap());
                assert_eq!(t.by_cliques(g), is_closed_via_cliques(&s, g).unwrap());
            }
            assert_eq!(t.first_disagreement(), None);
        }
    }

    #[test]
    fn a3_bound() {
        assert!(check_a3_bound(&hexagon()));
        assert!(check_a3_bound(&rainbow(6)));
    }
}

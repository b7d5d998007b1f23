//! Fusions: coarsenings of the color partition obtained by merging colors.
//!
//! The two finders look for merges that lower `a_2` without lowering `a_3` less.
//! Each first tries the merges suggested by a short local configuration search
//! (a path `x1 x2 x3` with equal colors for the reducing finder, two same-colored
//! disjoint pairs for the matching finder), then falls back to every merge in
//! lexicographic order. Candidates within each stage are tried in lexicographic
//! order, so results do not depend on evaluation order.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::to_text;
use crate::isometry::a3_count;
use crate::space::{pair_count, pairs, ColoredSpace};

/// A surjection from source colors onto `0..target_colors`, normalized so that
/// target colors are numbered by their smallest source preimage.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct FusionMap {
    map: Vec<u8>,
    target_colors: usize,
}

impl FusionMap {
    /// Accepts any surjection onto `0..t` and normalizes it.
    pub fn new(map: Vec<u8>) -> Result<Self, FusionError> {
        let t = map.iter().map(|&x| x as usize + 1).max().unwrap_or(0);
        let mut hit = vec![false; t];
        for &x in &map {
            hit[x as usize] = true;
        }
        if let Some(missing) = hit.iter().position(|h| !h) {
            return Err(FusionError::InvalidMap(format!(
                "target color {missing} has no preimage"
            )));
        }
        Ok(Self::normalized(map))
    }

    fn normalized(map: Vec<u8>) -> Self {
        let mut rename = [u8::MAX; 256];
        let mut next = 0u8;
        let map: Vec<u8> = map
            .into_iter()
            .map(|x| {
                if rename[x as usize] == u8::MAX {
                    rename[x as usize] = next;
                    next += 1;
                }
                rename[x as usize]
            })
            .collect();
        FusionMap {
            map,
            target_colors: next as usize,
        }
    }

    pub fn identity(colors: usize) -> Self {
        FusionMap {
            map: (0..colors as u8).collect(),
            target_colors: colors,
        }
    }

    /// Merges each listed pair of colors (pairs may chain).
    pub fn merging(colors: usize, merges: &[(u8, u8)]) -> Self {
        let mut class: Vec<u8> = (0..colors as u8).collect();
        for &(a, b) in merges {
            let (ca, cb) = (class[a as usize], class[b as usize]);
            let (keep, drop) = (ca.min(cb), ca.max(cb));
            for c in class.iter_mut() {
                if *c == drop {
                    *c = keep;
                }
            }
        }
        Self::normalized(class)
    }

    pub fn source_colors(&self) -> usize {
        self.map.len()
    }

    pub fn target_colors(&self) -> usize {
        self.target_colors
    }

    pub fn image(&self, c: u8) -> u8 {
        self.map[c as usize]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.map
    }
}

impl TryFrom<Vec<u8>> for FusionMap {
    type Error = FusionError;

    fn try_from(map: Vec<u8>) -> Result<Self, Self::Error> {
        FusionMap::new(map)
    }
}

impl From<FusionMap> for Vec<u8> {
    fn from(f: FusionMap) -> Self {
        f.map
    }
}

impl fmt::Display for FusionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, t) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for FusionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FusionMap{self}")
    }
}

impl std::str::FromStr for FusionMap {
    type Err = FusionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        let map = inner
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<u8>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| FusionError::InvalidMap(e.to_string()))?;
        FusionMap::new(map)
    }
}

/// A merge that was evaluated while searching, with the resulting counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttemptedMerge {
    pub map: FusionMap,
    pub a2: usize,
    pub a3: usize,
}

/// Everything needed to replay a failed search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub lemma: String,
    pub space: String,
    pub a2: usize,
    pub a3: usize,
    pub constraints: String,
    pub attempted: Vec<AttemptedMerge>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FusionError {
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("fusion map has {got} source colors, space has {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("spaces have different point counts: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("invalid fusion map: {0}")]
    InvalidMap(String),
    #[error("no merge satisfies the {} contract ({} merges tried)", .0.lemma, .0.attempted.len())]
    CounterexampleToLemma(Box<CounterexampleReport>),
}

pub fn apply_fusion(space: &ColoredSpace, f: &FusionMap) -> Result<ColoredSpace, FusionError> {
    if f.source_colors() != space.color_count() {
        return Err(FusionError::ArityMismatch {
            expected: space.color_count(),
            got: f.source_colors(),
        });
    }
    Ok(apply_unchecked(space, f))
}

fn apply_unchecked(space: &ColoredSpace, f: &FusionMap) -> ColoredSpace {
    let colors: Vec<u8> = pairs(space.n())
        .map(|(i, j)| f.image(space.color(i, j)))
        .collect();
    let fused = ColoredSpace::from_pair_colors(space.n(), &colors)
        .expect("surjective map yields a valid space");
    debug_assert_eq!(fused.color_count(), f.target_colors());
    fused
}

/// Whether every color class of `fine` lies inside one color class of `coarse`.
pub fn is_fusion_of(coarse: &ColoredSpace, fine: &ColoredSpace) -> Result<bool, FusionError> {
    if coarse.n() != fine.n() {
        return Err(FusionError::SizeMismatch(coarse.n(), fine.n()));
    }
    let mut image = vec![u8::MAX; fine.color_count()];
    for (i, j) in pairs(fine.n()) {
        let f = fine.color(i, j) as usize;
        let c = coarse.color(i, j);
        if image[f] == u8::MAX {
            image[f] = c;
        } else if image[f] != c {
            return Ok(false);
        }
    }
    Ok(true)
}

fn ordered(a: u8, b: u8) -> (u8, u8) {
    (a.min(b), a.max(b))
}

/// One or two color merges, kept in a canonical order for sorting.
type Merge = Vec<(u8, u8)>;

fn evaluate(
    space: &ColoredSpace,
    merge: &Merge,
    attempted: &mut Vec<AttemptedMerge>,
) -> (FusionMap, usize, usize) {
    let f = FusionMap::merging(space.color_count(), merge);
    let fused = apply_unchecked(space, &f);
    let a3 = a3_count(&fused);
    attempted.push(AttemptedMerge {
        map: f.clone(),
        a2: fused.color_count(),
        a3,
    });
    (f, fused.color_count(), a3)
}

/// A fusion merging exactly two colors with `a_3` dropping by at least one.
/// Requires `a_2 ≥ 2`, a color with a vertex of degree at least 2, and `n ≥ 5`.
pub fn find_reducing_fusion(space: &ColoredSpace) -> Result<FusionMap, FusionError> {
    let (n, a2) = (space.n(), space.color_count());
    if a2 < 2 || space.m2() == 0 || n < 5 {
        return Err(FusionError::PreconditionFailed(format!(
            "reducing fusion needs a_2 >= 2, m_2 > 0, n >= 5 (got a_2 = {a2}, m_2 = {}, n = {n})",
            space.m2()
        )));
    }
    let a3 = a3_count(space);
    let mut guided = reducing_candidates(space);
    guided.sort_unstable();
    guided.dedup();
    let exhaustive: Vec<(u8, u8)> = pairs(a2).map(|(a, b)| (a as u8, b as u8)).collect();
    let mut attempted = Vec::new();
    for m in guided.iter().chain(exhaustive.iter()) {
        let (f, new_a2, new_a3) = evaluate(space, &vec![*m], &mut attempted);
        if new_a2 + 1 == a2 && new_a3 < a3 {
            return Ok(f);
        }
    }
    Err(counterexample(
        space,
        "reducing fusion",
        "a_2 >= 2, m_2 > 0, n >= 5; want da2 = 1, da3 >= 1",
        attempted,
    ))
}

/// Merges read off the configuration `r(x1,x2) = r(x2,x3)` and a fourth point `x4`
/// (falling back to a fifth point when every `x4` looks alike).
fn reducing_candidates(space: &ColoredSpace) -> Vec<(u8, u8)> {
    let n = space.n();
    let r = |a: usize, b: usize| space.color(a, b);
    let Some((x1, x2, x3)) = (0..n).find_map(|x2| {
        (0..n).find_map(|x1| {
            (x1 + 1..n).find_map(|x3| {
                (x1 != x2 && x3 != x2 && r(x1, x2) == r(x2, x3)).then_some((x1, x2, x3))
            })
        })
    }) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let others: Vec<usize> = (0..n).filter(|&p| p != x1 && p != x2 && p != x3).collect();
    for &x4 in &others {
        if r(x4, x1) != r(x4, x3) {
            out.push(ordered(r(x4, x1), r(x4, x3)));
        } else if r(x4, x1) != r(x1, x2) {
            out.push(ordered(r(x1, x2), r(x1, x4)));
        } else if r(x1, x3) != r(x2, x4) {
            out.push(ordered(r(x1, x3), r(x2, x4)));
        }
    }
    if out.is_empty() {
        for &x4 in &others {
            if r(x1, x2) != r(x2, x4) {
                out.push(ordered(r(x1, x2), r(x2, x4)));
            }
        }
    }
    out
}

/// A fusion merging one pair or two disjoint pairs of colors with
/// `Δa_2 ≤ Δa_3`. Requires every color to be a matching and `n ≥ 5`.
pub fn find_matching_fusion(space: &ColoredSpace) -> Result<FusionMap, FusionError> {
    let (n, a2) = (space.n(), space.color_count());
    if space.m2() != 0 || n < 5 {
        return Err(FusionError::PreconditionFailed(format!(
            "matching fusion needs m_2 = 0 and n >= 5 (got m_2 = {}, n = {n})",
            space.m2()
        )));
    }
    let a3 = a3_count(space);
    let mut guided = matching_candidates(space);
    guided.sort_unstable();
    guided.dedup();
    let singles: Vec<Merge> = pairs(a2).map(|(a, b)| vec![(a as u8, b as u8)]).collect();
    let doubles = disjoint_double_merges(a2);
    let mut attempted = Vec::new();
    for m in guided.iter().chain(singles.iter()).chain(doubles.iter()) {
        let (f, new_a2, new_a3) = evaluate(space, m, &mut attempted);
        let d2 = a2 - new_a2;
        if (1..=2).contains(&d2) && new_a3 + d2 <= a3 {
            return Ok(f);
        }
    }
    Err(counterexample(
        space,
        "matching fusion",
        "m_2 = 0, n >= 5; want da2 in {1,2}, da2 <= da3",
        attempted,
    ))
}

fn disjoint_double_merges(c: usize) -> Vec<Merge> {
    let singles: Vec<(u8, u8)> = pairs(c).map(|(a, b)| (a as u8, b as u8)).collect();
    let mut out = Vec::new();
    for (i, &p) in singles.iter().enumerate() {
        for &q in &singles[i + 1..] {
            if p.0 != q.0 && p.0 != q.1 && p.1 != q.0 && p.1 != q.1 {
                out.push(vec![p, q]);
            }
        }
    }
    out
}

/// Merges read off two disjoint pairs `x1x2`, `y1y2` of one color and the colors
/// between them; when those colors pair up, a fifth point `z` supplies a double merge.
fn matching_candidates(space: &ColoredSpace) -> Vec<Merge> {
    let n = space.n();
    let r = |a: usize, b: usize| space.color(a, b);
    let sizes = space.class_sizes();
    let Some(alpha) = sizes.iter().position(|&s| s >= 2) else {
        return Vec::new();
    };
    let class = space.class(crate::space::Color(alpha as u8));
    let ((x1, x2), (y1, y2)) = (class[0], class[1]);
    let cross = [r(x1, y1), r(x1, y2), r(x2, y1), r(x2, y2)];
    let mut distinct = cross.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    match distinct.len() {
        4 => vec![vec![ordered(r(x1, y1), r(x2, y2))]],
        3 => {
            if r(x1, y1) == r(x2, y2) {
                vec![vec![ordered(r(x1, y2), r(x2, y1))]]
            } else {
                vec![vec![ordered(r(x1, y1), r(x2, y2))]]
            }
        }
        _ => (0..n)
            .filter(|&z| ![x1, x2, y1, y2].contains(&z))
            .map(|z| {
                let mut m = vec![ordered(r(z, x1), r(z, y2)), ordered(r(z, x2), r(z, y1))];
                m.sort_unstable();
                m
            })
            .collect(),
    }
}

fn counterexample(
    space: &ColoredSpace,
    lemma: &str,
    constraints: &str,
    attempted: Vec<AttemptedMerge>,
) -> FusionError {
    FusionError::CounterexampleToLemma(Box::new(CounterexampleReport {
        lemma: lemma.to_string(),
        space: to_text(space),
        a2: space.color_count(),
        a3: a3_count(space),
        constraints: constraints.to_string(),
        attempted,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Finder {
    Reducing,
    Matching,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub step: usize,
    pub finder: Finder,
    pub map: FusionMap,
    pub a2_before: usize,
    pub a3_before: usize,
    pub a2: usize,
    pub a3: usize,
    #[serde(skip)]
    pub space: Option<ColoredSpace>,
}

impl ChainStep {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("chain step is serializable")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionChain {
    pub steps: Vec<ChainStep>,
    pub start: (usize, usize),
    pub end: (usize, usize),
}

impl FusionChain {
    /// `a_2 ≤ a_3` at the start of every step and at the end.
    pub fn a2_le_a3_throughout(&self) -> bool {
        self.start.0 <= self.start.1
            && self.end.0 <= self.end.1
            && self.steps.iter().all(|s| s.a2_before <= s.a3_before)
    }
}

/// Applies the reducing finder (when some color is not a matching) or the matching
/// finder (when all are) until at most two colors remain.
pub fn fusion_chain(space: &ColoredSpace) -> Result<FusionChain, FusionError> {
    if space.n() < 5 {
        return Err(FusionError::PreconditionFailed(format!(
            "fusion chains need n >= 5, got {}",
            space.n()
        )));
    }
    let start = (space.color_count(), a3_count(space));
    let mut current = space.clone();
    let mut steps = Vec::new();
    let mut counts = start;
    while current.color_count() > 2 {
        let finder = if current.m2() > 0 {
            Finder::Reducing
        } else {
            Finder::Matching
        };
        let map = match finder {
            Finder::Reducing => find_reducing_fusion(&current)?,
            Finder::Matching => find_matching_fusion(&current)?,
        };
        let next = apply_unchecked(&current, &map);
        let next_counts = (next.color_count(), a3_count(&next));
        steps.push(ChainStep {
            step: steps.len(),
            finder,
            map,
            a2_before: counts.0,
            a3_before: counts.1,
            a2: next_counts.0,
            a3: next_counts.1,
            space: Some(next.clone()),
        });
        counts = next_counts;
        current = next;
    }
    debug_assert!(pair_count(space.n()) >= counts.0);
    Ok(FusionChain {
        steps,
        start,
        end: counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::*;
    use crate::isometry::isometric_sequence;

    #[test]
    fn map_normalization_and_display() {
        let f = FusionMap::new(vec![2, 0, 2, 1]).unwrap();
        assert_eq!(f.as_slice(), &[0, 1, 0, 2]);
        assert_eq!(f.to_string(), "[0,1,0,2]");
        assert_eq!("[0,1,0,2]".parse::<FusionMap>().unwrap(), f);
        assert_eq!(serde_json::to_string(&f).unwrap(), "[0,1,0,2]");
        assert!(FusionMap::new(vec![0, 2]).is_err());
        assert_eq!(FusionMap::merging(4, &[(1, 3)]).as_slice(), &[0, 1, 2, 1]);
    }

    #[test]
    fn apply_and_refine() {
        let h = hexagon();
        assert_eq!(apply_fusion(&h, &FusionMap::identity(3)).unwrap(), h);
        let merged = apply_fusion(&h, &FusionMap::merging(3, &[(0, 1)])).unwrap();
        assert_eq!((merged.color_count(), a3_count(&merged)), (2, 2));
        assert!(is_fusion_of(&merged, &h).unwrap());
        assert!(!is_fusion_of(&h, &merged).unwrap());
        let mono = apply_fusion(&h, &FusionMap::new(vec![0, 0, 0]).unwrap()).unwrap();
        assert_eq!(isometric_sequence(&mono).values(), &[1; 6]);
        assert!(matches!(
            apply_fusion(&h, &FusionMap::identity(2)),
            Err(FusionError::ArityMismatch {
                expected: 3,
                got: 2
            })
        ));
        assert!(!is_fusion_of(&hexagon(), &octahedron()).unwrap());
        assert_eq!(
            is_fusion_of(&hexagon(), &rainbow(4)),
            Err(FusionError::SizeMismatch(6, 4))
        );
    }

    #[test]
    fn reducing_examples() {
        let f = find_reducing_fusion(&hexagon()).unwrap();
        assert_eq!(f.as_slice(), &[0, 0, 1]);
        let f = find_reducing_fusion(&octahedron()).unwrap();
        assert_eq!(f.target_colors(), 1);
        assert!(matches!(
            find_reducing_fusion(&monochromatic(5)),
            Err(FusionError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn matching_examples() {
        let r = rainbow(5);
        let f = find_matching_fusion(&r).unwrap();
        let fused = apply_fusion(&r, &f).unwrap();
        let d2 = 10 - fused.color_count();
        assert!((1..=2).contains(&d2));
        assert!(d2 <= 10 - a3_count(&fused));
        assert!(matches!(
            find_matching_fusion(&hexagon()),
            Err(FusionError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn chains() {
        assert!(fusion_chain(&octahedron()).unwrap().steps.is_empty());
        let h = fusion_chain(&hexagon()).unwrap();
        assert_eq!(h.steps.len(), 1);
        assert_eq!(h.end.0, 2);
        let r = fusion_chain(&rainbow(5)).unwrap();
        assert!(r.end.0 <= 2);
        assert!(r.a2_le_a3_throughout());
        assert!(matches!(
            fusion_chain(&rainbow(4)),
            Err(FusionError::PreconditionFailed(_))
        ));
    }
}

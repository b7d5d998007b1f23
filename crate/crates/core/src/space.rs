//! Finite colored spaces: a point set with a color on every unordered pair.
//!
//! Points are dense indices `0..n`. Colors are dense indices `0..c` and every
//! color must occur on at least one pair, so the number of colors of a space is
//! always the number of distinct pair colors.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported point count. Pair sets fit in 128 bits and colors in a byte.
pub const MAX_POINTS: usize = 16;

/// Marker stored on the diagonal of the color matrix.
pub(crate) const NO_COLOR: u8 = u8::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("pair {{{0},{1}}} has no color")]
    MissingPair(usize, usize),
    #[error("pair {{{0},{1}}} is assigned more than once")]
    DuplicatePair(usize, usize),
    #[error("pair {{{i},{j}}} has color {color}, but the space has only {count} colors")]
    ColorOutOfRange {
        i: usize,
        j: usize,
        color: usize,
        count: usize,
    },
    #[error("color {0} is not used by any pair")]
    UnusedColor(Color),
    #[error("point {0} paired with itself")]
    SamePoint(usize),
    #[error("point {point} out of range for a space on {n} points")]
    PointOutOfRange { point: usize, n: usize },
    #[error("point {0} listed more than once")]
    DuplicatePoint(usize),
    #[error("a colored space needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("at most {MAX_POINTS} points are supported, got {0}")]
    TooManyPoints(usize),
    #[error("subset of size {size} is too small (need at least {min})")]
    TooSmall { size: usize, min: usize },
    #[error("color set is empty")]
    EmptyColorSet,
    #[error("color set mentions color {0}, which is not a color of the space")]
    UnknownColor(Color),
    #[error("k = {k} is outside 1..={n}")]
    BadK { k: usize, n: usize },
    #[error("subset sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("expected {expected} pair colors, got {got}")]
    PairCount { expected: usize, got: usize },
}

/// A pair color. Colors of a space are `0..color_count`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Color(pub u8);

impl Color {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A set of colors, stored as a bitmask (a space has at most `C(16,2) = 120` colors).
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorSet(u128);

impl ColorSet {
    pub const fn empty() -> Self {
        ColorSet(0)
    }

    /// All colors `0..count`.
    pub fn all(count: usize) -> Self {
        if count >= 128 {
            ColorSet(u128::MAX)
        } else {
            ColorSet((1u128 << count) - 1)
        }
    }

    pub fn from_bits(bits: u128) -> Self {
        ColorSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn singleton(c: Color) -> Self {
        ColorSet(1u128 << c.0)
    }

    pub fn insert(&mut self, c: Color) {
        self.0 |= 1u128 << c.0;
    }

    pub fn remove(&mut self, c: Color) {
        self.0 &= !(1u128 << c.0);
    }

    pub fn contains(self, c: Color) -> bool {
        self.0 >> c.0 & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: ColorSet) -> ColorSet {
        ColorSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ColorSet) -> ColorSet {
        ColorSet(self.0 & other.0)
    }

    pub fn is_subset(self, other: ColorSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Color> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let c = bits.trailing_zeros() as u8;
                bits &= bits - 1;
                Some(Color(c))
            }
        })
    }
}

impl FromIterator<Color> for ColorSet {
    fn from_iter<I: IntoIterator<Item = Color>>(iter: I) -> Self {
        let mut s = ColorSet::empty();
        for c in iter {
            s.insert(c);
        }
        s
    }
}

impl fmt::Debug for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for ColorSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ColorSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let colors = Vec::<Color>::deserialize(deserializer)?;
        if let Some(c) = colors.iter().find(|c| c.0 >= 128) {
            return Err(serde::de::Error::custom(format!("color {c} out of range")));
        }
        Ok(colors.into_iter().collect())
    }
}

/// Unordered pairs `{i, j}`, `i < j`, in the fixed traversal order: `i` ascending,
/// then `j` ascending.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// A finite colored space `(X, r)` with `X = {0, …, n-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredSpace {
    n: usize,
    colors: usize,
    // n*n symmetric matrix, NO_COLOR on the diagonal
    matrix: Vec<u8>,
}

impl ColoredSpace {
    /// Builds a space from explicit pair assignments. Every pair must be assigned
    /// exactly once, and every color in `0..color_count` must be used.
    pub fn new<I>(n: usize, color_count: usize, assignments: I) -> Result<Self, SpaceError>
    where
        I: IntoIterator<Item = ((usize, usize), Color)>,
    {
        check_point_count(n)?;
        let mut matrix = vec![NO_COLOR; n * n];
        for ((a, b), color) in assignments {
            if a == b {
                return Err(SpaceError::SamePoint(a));
            }
            for p in [a, b] {
                if p >= n {
                    return Err(SpaceError::PointOutOfRange { point: p, n });
                }
            }
            let (i, j) = (a.min(b), a.max(b));
            if color.index() >= color_count {
                return Err(SpaceError::ColorOutOfRange {
                    i,
                    j,
                    color: color.index(),
                    count: color_count,
                });
            }
            if matrix[i * n + j] != NO_COLOR {
                return Err(SpaceError::DuplicatePair(i, j));
            }
            matrix[i * n + j] = color.0;
            matrix[j * n + i] = color.0;
        }
        if let Some((i, j)) = pairs(n).find(|&(i, j)| matrix[i * n + j] == NO_COLOR) {
            return Err(SpaceError::MissingPair(i, j));
        }
        Self::finish(n, color_count, matrix)
    }

    /// Builds a space from the pair colors listed in the fixed pair order.
    /// The color count is taken to be `max + 1`.
    pub fn from_pair_colors(n: usize, colors: &[u8]) -> Result<Self, SpaceError> {
        check_point_count(n)?;
        let expected = pair_count(n);
        if colors.len() != expected {
            return Err(SpaceError::PairCount {
                expected,
                got: colors.len(),
            });
        }
        let count = colors.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        Self::new(n, count, pairs(n).zip(colors.iter().map(|&c| Color(c))))
    }

    /// Builds a space by evaluating `f(i, j)` for every pair `i < j`.
    pub fn from_fn<F>(n: usize, mut f: F) -> Result<Self, SpaceError>
    where
        F: FnMut(usize, usize) -> u8,
    {
        let colors: Vec<u8> = pairs(n).map(|(i, j)| f(i, j)).collect();
        Self::from_pair_colors(n, &colors)
    }

    /// Trusted constructor for internal callers that already hold a valid matrix.
    pub(crate) fn from_matrix_unchecked(n: usize, colors: usize, matrix: Vec<u8>) -> Self {
        debug_assert_eq!(matrix.len(), n * n);
        ColoredSpace { n, colors, matrix }
    }

    fn finish(n: usize, colors: usize, matrix: Vec<u8>) -> Result<Self, SpaceError> {
        let mut used = [false; 256];
        for (i, j) in pairs(n) {
            used[matrix[i * n + j] as usize] = true;
        }
        if let Some(c) = (0..colors.min(256)).find(|&c| !used[c]) {
            return Err(SpaceError::UnusedColor(Color(c as u8)));
        }
        Ok(ColoredSpace { n, colors, matrix })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of colors, which equals `a_2`.
    pub fn color_count(&self) -> usize {
        self.colors
    }

    pub fn colors(&self) -> ColorSet {
        ColorSet::all(self.colors)
    }

    /// Color of the pair `{x, y}`.
    pub fn color_of(&self, x: usize, y: usize) -> Result<Color, SpaceError> {
        for p in [x, y] {
            if p >= self.n {
                return Err(SpaceError::PointOutOfRange {
                    point: p,
                    n: self.n,
                });
            }
        }
        if x == y {
            return Err(SpaceError::SamePoint(x));
        }
        Ok(Color(self.matrix[x * self.n + y]))
    }

    /// Unchecked raw color of `{x, y}`; returns `u8::MAX` when `x == y`.
    #[inline]
    pub fn color(&self, x: usize, y: usize) -> u8 {
        self.matrix[x * self.n + y]
    }

    /// Pair colors in the fixed pair order.
    pub fn pair_colors(&self) -> Vec<u8> {
        pairs(self.n).map(|(i, j)| self.color(i, j)).collect()
    }

    /// Number of pairs of each color.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.colors];
        for (i, j) in pairs(self.n) {
            sizes[self.color(i, j) as usize] += 1;
        }
        sizes
    }

    /// The pairs `E_α` of color `alpha`, in pair order.
    pub fn class(&self, alpha: Color) -> Vec<(usize, usize)> {
        pairs(self.n)
            .filter(|&(i, j)| self.color(i, j) == alpha.0)
            .collect()
    }

    /// Number of neighbours of `x` in the graph `(X, E_α)`.
    pub fn degree(&self, alpha: Color, x: usize) -> usize {
        (0..self.n)
            .filter(|&y| y != x && self.color(x, y) == alpha.0)
            .count()
    }

    /// `deg[α][x]` for every color and point.
    pub fn degree_table(&self) -> Vec<Vec<usize>> {
        let mut table = vec![vec![0; self.n]; self.colors];
        for (i, j) in pairs(self.n) {
            let c = self.color(i, j) as usize;
            table[c][i] += 1;
            table[c][j] += 1;
        }
        table
    }

    /// `(M_k, m_k)`: the colors whose graph has a vertex of degree at least `k`.
    pub fn m_stats(&self, k: usize) -> Result<(ColorSet, usize), SpaceError> {
        if k == 0 || k > self.n {
            return Err(SpaceError::BadK { k, n: self.n });
        }
        let set: ColorSet = self
            .degree_table()
            .iter()
            .enumerate()
            .filter(|(_, degs)| degs.iter().any(|&d| d >= k))
            .map(|(c, _)| Color(c as u8))
            .collect();
        Ok((set, set.len()))
    }

    /// `m_2`, the number of colors that are not matchings.
    pub fn m2(&self) -> usize {
        self.m_stats(2).map(|(_, m)| m).unwrap_or(0)
    }

    pub(crate) fn check_colors(&self, gamma: ColorSet) -> Result<(), SpaceError> {
        if gamma.is_empty() {
            return Err(SpaceError::EmptyColorSet);
        }
        if let Some(c) = gamma.iter().find(|c| c.index() >= self.colors) {
            return Err(SpaceError::UnknownColor(c));
        }
        Ok(())
    }

    /// The simple graph `(X, ⋃_{γ∈Γ} E_γ)`.
    pub fn color_graph(&self, gamma: ColorSet) -> Result<ColorGraph<'_>, SpaceError> {
        self.check_colors(gamma)?;
        let mut adjacency = vec![0u32; self.n];
        for (i, j) in pairs(self.n) {
            if gamma.contains(Color(self.color(i, j))) {
                adjacency[i] |= 1 << j;
                adjacency[j] |= 1 << i;
            }
        }
        Ok(ColorGraph {
            owner: self,
            color_set: gamma,
            adjacency,
        })
    }

    /// True iff the union of the classes in `gamma` has maximum degree at most one.
    pub fn is_matching(&self, gamma: ColorSet) -> Result<bool, SpaceError> {
        Ok(self.color_graph(gamma)?.max_degree() <= 1)
    }

    /// The subspace induced on `points`, with colors renumbered.
    pub fn induced_subspace(&self, points: &[usize]) -> Result<SubspaceView<'_>, SpaceError> {
        if points.len() < 2 {
            return Err(SpaceError::TooSmall {
                size: points.len(),
                min: 2,
            });
        }
        let mut sorted = points.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(SpaceError::DuplicatePoint(w[0]));
            }
        }
        if let Some(&p) = sorted.last().filter(|&&p| p >= self.n) {
            return Err(SpaceError::PointOutOfRange {
                point: p,
                n: self.n,
            });
        }
        let present: ColorSet = pairs(sorted.len())
            .map(|(a, b)| Color(self.color(sorted[a], sorted[b])))
            .collect();
        // order-preserving renumbering of the colors present
        let renorm: BTreeMap<Color, Color> = present
            .iter()
            .enumerate()
            .map(|(k, c)| (c, Color(k as u8)))
            .collect();
        let m = sorted.len();
        let mut matrix = vec![NO_COLOR; m * m];
        for (a, b) in pairs(m) {
            let c = renorm[&Color(self.color(sorted[a], sorted[b]))].0;
            matrix[a * m + b] = c;
            matrix[b * m + a] = c;
        }
        Ok(SubspaceView {
            parent: self,
            points: sorted,
            renorm,
            space: ColoredSpace::from_matrix_unchecked(m, present.len(), matrix),
        })
    }

    /// Relabels points: point `i` of the result is point `perm[i]` of `self`.
    pub fn permute_points(&self, perm: &[usize]) -> ColoredSpace {
        assert_eq!(perm.len(), self.n, "permutation length");
        let n = self.n;
        let mut matrix = vec![NO_COLOR; n * n];
        for (i, j) in pairs(n) {
            let c = self.color(perm[i], perm[j]);
            matrix[i * n + j] = c;
            matrix[j * n + i] = c;
        }
        ColoredSpace::from_matrix_unchecked(n, self.colors, matrix)
    }

    /// Renames colors through a bijection `map[old] = new`.
    pub fn rename_colors(&self, map: &[u8]) -> ColoredSpace {
        assert_eq!(map.len(), self.colors, "color map length");
        let matrix = self
            .matrix
            .iter()
            .map(|&c| if c == NO_COLOR { c } else { map[c as usize] })
            .collect();
        ColoredSpace::from_matrix_unchecked(self.n, self.colors, matrix)
    }
}

fn check_point_count(n: usize) -> Result<(), SpaceError> {
    if n < 2 {
        Err(SpaceError::TooFewPoints(n))
    } else if n > MAX_POINTS {
        Err(SpaceError::TooManyPoints(n))
    } else {
        Ok(())
    }
}

impl fmt::Debug for ColoredSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ColoredSpace({})",
            crate::format::to_text(self).trim_end().replace('\n', "; ")
        )
    }
}

/// The graph of a color set; adjacency is stored as point bitmasks.
#[derive(Clone, Debug)]
pub struct ColorGraph<'a> {
    pub owner: &'a ColoredSpace,
    pub color_set: ColorSet,
    adjacency: Vec<u32>,
}

impl ColorGraph<'_> {
    /// `R(x)`, the neighbours of `x`, as a bitmask.
    pub fn neighbors(&self, x: usize) -> u32 {
        self.adjacency[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adjacency[x].count_ones() as usize
    }

    pub fn max_degree(&self) -> usize {
        (0..self.adjacency.len())
            .map(|x| self.degree(x))
            .max()
            .unwrap_or(0)
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.adjacency[x] >> y & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        pairs(self.adjacency.len())
            .filter(|&(i, j)| self.has_edge(i, j))
            .collect()
    }

    /// Connected components as sorted point lists, ordered by smallest point.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.adjacency.len();
        let mut seen = 0u32;
        let mut parts = Vec::new();
        for start in 0..n {
            if seen >> start & 1 == 1 {
                continue;
            }
            let mut comp = 1u32 << start;
            let mut frontier = comp;
            while frontier != 0 {
                let x = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let fresh = self.adjacency[x] & !comp;
                comp |= fresh;
                frontier |= fresh;
            }
            seen |= comp;
            parts.push((0..n).filter(|&p| comp >> p & 1 == 1).collect());
        }
        parts
    }
}

/// A subspace `(Y, r_Y)` together with the color renumbering into the induced space.
#[derive(Clone, Debug)]
pub struct SubspaceView<'a> {
    pub parent: &'a ColoredSpace,
    /// Sorted points of `Y`; point `k` of `space` is `points[k]` of the parent.
    pub points: Vec<usize>,
    /// Parent color → induced color, order preserving.
    pub renorm: BTreeMap<Color, Color>,
    pub space: ColoredSpace,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: u8) -> Color {
        Color(x)
    }

    #[test]
    fn smallest_space() {
        let s = ColoredSpace::new(2, 1, [((0, 1), c(0))]).unwrap();
        assert_eq!(s.color_count(), 1);
        assert_eq!(s.color_of(1, 0).unwrap(), c(0));
    }

    #[test]
    fn forced_triangle() {
        let s = ColoredSpace::new(3, 2, [((0, 1), c(0)), ((1, 2), c(0)), ((0, 2), c(1))]).unwrap();
        assert_eq!(s.colors(), ColorSet::all(2));
        assert_eq!(s.class(c(0)), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            ColoredSpace::new(3, 3, [((0, 1), c(0)), ((1, 2), c(1)), ((0, 2), c(1))]),
            Err(SpaceError::UnusedColor(c(2)))
        );
        assert_eq!(
            ColoredSpace::new(3, 2, [((0, 1), c(0)), ((1, 2), c(1))]),
            Err(SpaceError::MissingPair(0, 2))
        );
        assert_eq!(
            ColoredSpace::new(3, 2, [((0, 1), c(0)), ((1, 0), c(1)), ((0, 2), c(1))]),
            Err(SpaceError::DuplicatePair(0, 1))
        );
        assert!(matches!(
            ColoredSpace::new(2, 1, [((0, 1), c(3))]),
            Err(SpaceError::ColorOutOfRange { color: 3, .. })
        ));
        assert_eq!(
            ColoredSpace::new(1, 1, []),
            Err(SpaceError::TooFewPoints(1))
        );
        assert_eq!(
            ColoredSpace::from_fn(17, |_, _| 0),
            Err(SpaceError::TooManyPoints(17))
        );
    }

    #[test]
    fn color_of_is_symmetric_and_rejects_diagonal() {
        let s = ColoredSpace::from_fn(5, |i, j| ((i * 3 + j) % 4) as u8).unwrap();
        for (i, j) in pairs(5) {
            assert_eq!(s.color_of(i, j), s.color_of(j, i));
        }
        assert_eq!(s.color_of(2, 2), Err(SpaceError::SamePoint(2)));
    }

    #[test]
    fn m_stats_of_complete_and_rainbow() {
        let mono = ColoredSpace::from_fn(5, |_, _| 0).unwrap();
        assert_eq!(mono.m_stats(4).unwrap(), (ColorSet::all(1), 1));
        let mut k = 0u8;
        let rainbow = ColoredSpace::from_fn(4, |_, _| {
            k += 1;
            k - 1
        })
        .unwrap();
        assert_eq!(rainbow.m_stats(2).unwrap(), (ColorSet::empty(), 0));
        assert_eq!(rainbow.m_stats(1).unwrap().1, 6);
        assert!(matches!(rainbow.m_stats(0), Err(SpaceError::BadK { .. })));
        assert!(!rainbow.is_matching(ColorSet::all(6)).unwrap());
        assert_eq!(
            rainbow.is_matching(ColorSet::empty()),
            Err(SpaceError::EmptyColorSet)
        );
    }

    #[test]
    fn induced_subspace_renumbers_colors() {
        let s = ColoredSpace::from_fn(4, |i, j| {
            if i == 0 {
                2
            } else if j == 3 {
                1
            } else {
                0
            }
        })
        .unwrap();
        let view = s.induced_subspace(&[3, 1, 2]).unwrap();
        assert_eq!(view.points, vec![1, 2, 3]);
        assert_eq!(view.space.color_count(), 2);
        assert_eq!(view.renorm[&c(1)], c(1));
        assert_eq!(view.renorm[&c(0)], c(0));
        let whole = s.induced_subspace(&[0, 1, 2, 3]).unwrap();
        assert_eq!(whole.space, s);
        assert!(whole.renorm.iter().all(|(a, b)| a == b));
        assert!(matches!(
            s.induced_subspace(&[1]),
            Err(SpaceError::TooSmall { .. })
        ));
        assert_eq!(
            s.induced_subspace(&[1, 1]).unwrap_err(),
            SpaceError::DuplicatePoint(1)
        );
    }

    #[test]
    fn components_of_matching() {
        let s = ColoredSpace::from_fn(6, |i, j| u8::from(j == i + 3)).unwrap();
        let g = s.color_graph(ColorSet::singleton(c(1))).unwrap();
        assert_eq!(g.components(), vec![vec![0, 3], vec![1, 4], vec![2, 5]]);
        assert_eq!(g.max_degree(), 1);
    }

    #[test]
    fn color_set_ops() {
        let s: ColorSet = [c(0), c(5), c(127)].into_iter().collect();
        assert_eq!(s.len(), 3);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![c(0), c(5), c(127)]);
        assert!(ColorSet::singleton(c(5)).is_subset(s));
        assert_eq!(serde_json::to_string(&s).unwrap(), "[0,5,127]");
    }
}

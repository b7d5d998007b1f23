//! Isometry and isomorphism of colored spaces, canonical keys, and the
//! isometric sequence `(a_1, …, a_n)`.
//!
//! Canonical keys are lexicographic minima over vertex orderings. For an
//! ordering `π` of `m` points the flattened vector is
//!
//! ```text
//! r(π1,π0), r(π2,π0), r(π2,π1), r(π3,π0), …, r(π_{m-1},π_{m-2})
//! ```
//!
//! so that a prefix `π0..πd` fixes a prefix of the vector; the search abandons an
//! ordering prefix as soon as its partial vector exceeds the incumbent. Points
//! that are twins (same color to every other point) are interchangeable by an
//! automorphism, so only one of them is branched on at each level.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::space::{pairs, Color, ColoredSpace, SpaceError, NO_COLOR};

/// Canonical certificate of an isometry class `[Y]`: colors are kept as they are.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IsometryKey(Box<[u8]>);

/// Canonical certificate of an isomorphism class: colors are renamed by first
/// appearance. The first byte is the point count.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IsomorphismKey(Box<[u8]>);

impl IsometryKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl IsomorphismKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let bytes = hex::decode(s).ok()?;
        let n = *bytes.first()? as usize;
        (bytes.len() == 1 + n * n.saturating_sub(1) / 2).then(|| IsomorphismKey(bytes.into()))
    }

    /// The canonical representative encoded by this key.
    pub fn to_space(&self) -> ColoredSpace {
        let n = self.0[0] as usize;
        let body = &self.0[1..];
        let colors = body.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut matrix = vec![NO_COLOR; n * n];
        let mut pos = 0;
        for k in 1..n {
            for i in 0..k {
                matrix[k * n + i] = body[pos];
                matrix[i * n + k] = body[pos];
                pos += 1;
            }
        }
        ColoredSpace::from_matrix_unchecked(n, colors, matrix)
    }
}

impl fmt::Debug for IsometryKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IsometryKey({:?})", self.0)
    }
}

impl fmt::Debug for IsomorphismKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IsomorphismKey({})", self.to_hex())
    }
}

impl fmt::Display for IsomorphismKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// An unordered color triple, stored sorted.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[Color; 3]", into = "[Color; 3]")]
pub struct TriangleType([Color; 3]);

impl TriangleType {
    pub fn new(a: Color, b: Color, c: Color) -> Self {
        let mut t = [a, b, c];
        t.sort_unstable();
        TriangleType(t)
    }

    pub fn colors(self) -> [Color; 3] {
        self.0
    }

    pub fn contains(self, c: Color) -> bool {
        self.0.contains(&c)
    }

    /// How often `c` occurs in the triple.
    pub fn multiplicity(self, c: Color) -> usize {
        self.0.iter().filter(|&&x| x == c).count()
    }

    pub fn map(self, f: impl Fn(Color) -> Color) -> Self {
        TriangleType::new(f(self.0[0]), f(self.0[1]), f(self.0[2]))
    }
}

impl From<[Color; 3]> for TriangleType {
    fn from(t: [Color; 3]) -> Self {
        TriangleType::new(t[0], t[1], t[2])
    }
}

impl From<TriangleType> for [Color; 3] {
    fn from(t: TriangleType) -> Self {
        t.0
    }
}

impl fmt::Debug for TriangleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// The set `A_3(r)` of triangle types.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TriangleTypeSet(BTreeSet<TriangleType>);

impl TriangleTypeSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, t: TriangleType) -> bool {
        self.0.contains(&t)
    }

    /// Membership test for the type `abc` given in any order.
    pub fn has(&self, a: Color, b: Color, c: Color) -> bool {
        self.0.contains(&TriangleType::new(a, b, c))
    }

    pub fn iter(&self) -> impl Iterator<Item = TriangleType> + '_ {
        self.0.iter().copied()
    }

    /// Types in which `c` occurs.
    pub fn containing(&self, c: Color) -> impl Iterator<Item = TriangleType> + '_ {
        self.0.iter().copied().filter(move |t| t.contains(c))
    }

    pub fn insert(&mut self, t: TriangleType) -> bool {
        self.0.insert(t)
    }

    /// The image of the set under a color map.
    pub fn map(&self, f: impl Fn(Color) -> Color) -> TriangleTypeSet {
        self.0.iter().map(|t| t.map(&f)).collect()
    }
}

impl FromIterator<TriangleType> for TriangleTypeSet {
    fn from_iter<I: IntoIterator<Item = TriangleType>>(iter: I) -> Self {
        TriangleTypeSet(iter.into_iter().collect())
    }
}

impl fmt::Debug for TriangleTypeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// `(a_1, …, a_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IsometricSequence(pub Vec<usize>);

impl IsometricSequence {
    pub fn values(&self) -> &[usize] {
        &self.0
    }

    /// `a_k` with 1-based `k`.
    pub fn a(&self, k: usize) -> usize {
        self.0[k - 1]
    }

    /// Non-decreasing then non-increasing.
    pub fn is_unimodal(&self) -> bool {
        let v = &self.0;
        let mut i = 1;
        while i < v.len() && v[i] >= v[i - 1] {
            i += 1;
        }
        while i < v.len() && v[i] <= v[i - 1] {
            i += 1;
        }
        i >= v.len()
    }
}

impl fmt::Display for IsometricSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Result of a lexicographic minimisation.
pub(crate) struct LexMin {
    pub vector: Vec<u8>,
}

/// Branch-and-bound search for the lexicographically least flattened vector.
struct Search<'a> {
    m: usize,
    mat: &'a [u8],
    rename: bool,
    twin: Vec<u8>,
    best: Vec<u8>,
    have_best: bool,
    cur: Vec<u8>,
    order: Vec<usize>,
    used: u32,
    map: [u8; 256],
    next: u8,
    scratch: Vec<Vec<u8>>,
    cands: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(m: usize, mat: &'a [u8], rename: bool) -> Self {
        let len = m * m.saturating_sub(1) / 2;
        Search {
            m,
            mat,
            rename,
            twin: twin_classes(m, mat),
            best: vec![0; len],
            have_best: false,
            cur: vec![0; len],
            order: vec![0; m],
            used: 0,
            map: [NO_COLOR; 256],
            next: 0,
            scratch: vec![Vec::new(); m + 1],
            cands: vec![Vec::new(); m + 1],
        }
    }

    fn run(mut self) -> LexMin {
        if self.m == 0 {
            return LexMin { vector: Vec::new() };
        }
        self.dfs(0);
        LexMin { vector: self.best }
    }

    /// One representative per twin class among the unused points.
    fn candidates(&self, out: &mut Vec<usize>) {
        out.clear();
        let mut seen_classes = 0u32;
        for v in 0..self.m {
            if self.used >> v & 1 == 0 {
                let class = self.twin[v];
                if seen_classes >> class & 1 == 0 {
                    seen_classes |= 1 << class;
                    out.push(v);
                }
            }
        }
    }

    /// Writes the (renamed) row of `v` against the current prefix of length `d`.
    fn row(&self, v: usize, d: usize, out: &mut [u8]) {
        if !self.rename {
            for i in 0..d {
                out[i] = self.mat[v * self.m + self.order[i]];
            }
            return;
        }
        let mut fresh: [u8; 16] = [0; 16];
        let mut n_fresh = 0usize;
        for i in 0..d {
            let c = self.mat[v * self.m + self.order[i]];
            let mapped = self.map[c as usize];
            out[i] = if mapped != NO_COLOR {
                mapped
            } else if let Some(k) = fresh[..n_fresh].iter().position(|&f| f == c) {
                self.next + k as u8
            } else {
                fresh[n_fresh] = c;
                n_fresh += 1;
                self.next + n_fresh as u8 - 1
            };
        }
    }

    fn dfs(&mut self, d: usize) {
        let m = self.m;
        if d == m {
            if !self.have_best || self.cur < self.best {
                self.best.copy_from_slice(&self.cur);
                self.have_best = true;
            }
            return;
        }
        let mut cands = std::mem::take(&mut self.cands[d]);
        self.candidates(&mut cands);
        if d == 0 {
            for &v in &cands {
                self.order[0] = v;
                self.used |= 1 << v;
                self.dfs(1);
                self.used &= !(1 << v);
            }
            self.cands[d] = cands;
            return;
        }
        let start = d * (d - 1) / 2;
        let mut rows = std::mem::take(&mut self.scratch[d]);
        rows.clear();
        rows.resize(cands.len() * d, 0);
        for (k, &v) in cands.iter().enumerate() {
            self.row(v, d, &mut rows[k * d..(k + 1) * d]);
        }
        let mut idx: Vec<usize> = (0..cands.len()).collect();
        idx.sort_by(|&a, &b| rows[a * d..(a + 1) * d].cmp(&rows[b * d..(b + 1) * d]));
        for &k in &idx {
            let v = cands[k];
            self.cur[start..start + d].copy_from_slice(&rows[k * d..(k + 1) * d]);
            if self.have_best && self.cur[..start + d] > self.best[..start + d] {
                break;
            }
            let saved_next = self.next;
            let mut assigned: [u8; 16] = [0; 16];
            let mut n_assigned = 0;
            if self.rename {
                for i in 0..d {
                    let c = self.mat[v * m + self.order[i]];
                    if self.map[c as usize] == NO_COLOR {
                        self.map[c as usize] = self.next;
                        self.next += 1;
                        assigned[n_assigned] = c;
                        n_assigned += 1;
                    }
                }
            }
            self.order[d] = v;
            self.used |= 1 << v;
            self.dfs(d + 1);
            self.used &= !(1 << v);
            for &c in &assigned[..n_assigned] {
                self.map[c as usize] = NO_COLOR;
            }
            self.next = saved_next;
        }
        self.scratch[d] = rows;
        self.cands[d] = cands;
    }
}

/// Twin class ids: `u ~ v` iff every other point sees `u` and `v` in the same color.
fn twin_classes(m: usize, mat: &[u8]) -> Vec<u8> {
    let mut class = vec![u8::MAX; m];
    let mut next = 0u8;
    for u in 0..m {
        if class[u] != u8::MAX {
            continue;
        }
        class[u] = next;
        for v in u + 1..m {
            if class[v] == u8::MAX
                && (0..m).all(|w| w == u || w == v || mat[u * m + w] == mat[v * m + w])
            {
                class[v] = next;
            }
        }
        next += 1;
    }
    class
}

pub(crate) fn lex_min(m: usize, mat: &[u8], rename: bool) -> LexMin {
    Search::new(m, mat, rename).run()
}

fn local_matrix(space: &ColoredSpace, points: &[usize]) -> Vec<u8> {
    let m = points.len();
    let mut mat = vec![NO_COLOR; m * m];
    for (a, b) in pairs(m) {
        let c = space.color(points[a], points[b]);
        mat[a * m + b] = c;
        mat[b * m + a] = c;
    }
    mat
}

fn check_subset(space: &ColoredSpace, points: &[usize]) -> Result<(), SpaceError> {
    let mut seen = 0u32;
    for &p in points {
        if p >= space.n() {
            return Err(SpaceError::PointOutOfRange {
                point: p,
                n: space.n(),
            });
        }
        if seen >> p & 1 == 1 {
            return Err(SpaceError::DuplicatePoint(p));
        }
        seen |= 1 << p;
    }
    Ok(())
}

/// Canonical key of the isometry class of the subspace on `points`.
pub fn isometry_key(space: &ColoredSpace, points: &[usize]) -> Result<IsometryKey, SpaceError> {
    check_subset(space, points)?;
    Ok(isometry_key_unchecked(space, points))
}

fn isometry_key_unchecked(space: &ColoredSpace, points: &[usize]) -> IsometryKey {
    let mat = local_matrix(space, points);
    IsometryKey(lex_min(points.len(), &mat, false).vector.into())
}

/// Canonical key of the isomorphism class of `space`.
pub fn isomorphism_key(space: &ColoredSpace) -> IsomorphismKey {
    canonical_form(space).0
}

/// The isomorphism key together with the canonical relabelled representative.
pub fn canonical_form(space: &ColoredSpace) -> (IsomorphismKey, ColoredSpace) {
    let n = space.n();
    let points: Vec<usize> = (0..n).collect();
    let mat = local_matrix(space, &points);
    let result = lex_min(n, &mat, true);
    let mut bytes = Vec::with_capacity(result.vector.len() + 1);
    bytes.push(n as u8);
    bytes.extend_from_slice(&result.vector);
    let key = IsomorphismKey(bytes.into());
    let rep = key.to_space();
    (key, rep)
}

pub fn isomorphic(a: &ColoredSpace, b: &ColoredSpace) -> bool {
    a.n() == b.n() && a.color_count() == b.color_count() && isomorphism_key(a) == isomorphism_key(b)
}

/// Decides `Y ≃_r Z` by exhaustive search over bijections `Y → Z`.
pub fn isometric(space: &ColoredSpace, y: &[usize], z: &[usize]) -> Result<bool, SpaceError> {
    if y.len() != z.len() {
        return Err(SpaceError::SizeMismatch(y.len(), z.len()));
    }
    check_subset(space, y)?;
    check_subset(space, z)?;
    fn extend(
        space: &ColoredSpace,
        y: &[usize],
        z: &[usize],
        image: &mut Vec<usize>,
        used: u32,
    ) -> bool {
        let d = image.len();
        if d == y.len() {
            return true;
        }
        for (k, &target) in z.iter().enumerate() {
            if used >> k & 1 == 1 {
                continue;
            }
            if (0..d).all(|i| space.color(y[i], y[d]) == space.color(image[i], target)) {
                image.push(target);
                if extend(space, y, z, image, used | 1 << k) {
                    return true;
                }
                image.pop();
            }
        }
        false
    }
    Ok(extend(space, y, z, &mut Vec::with_capacity(y.len()), 0))
}

/// Decides isomorphism by exhaustive search over point bijections, building the
/// color bijection along the way. Independent of the canonical key machinery.
pub fn isomorphic_brute_force(a: &ColoredSpace, b: &ColoredSpace) -> bool {
    if a.n() != b.n() || a.color_count() != b.color_count() {
        return false;
    }
    struct State<'s> {
        a: &'s ColoredSpace,
        b: &'s ColoredSpace,
        image: Vec<usize>,
        fwd: Vec<u8>,
        back: Vec<u8>,
    }
    fn extend(st: &mut State<'_>, used: u32) -> bool {
        let d = st.image.len();
        if d == st.a.n() {
            return true;
        }
        for t in 0..st.b.n() {
            if used >> t & 1 == 1 {
                continue;
            }
            let mut added: Vec<u8> = Vec::new();
            let mut ok = true;
            for i in 0..d {
                let ca = st.a.color(i, d);
                let cb = st.b.color(st.image[i], t);
                match (st.fwd[ca as usize], st.back[cb as usize]) {
                    (NO_COLOR, NO_COLOR) => {
                        st.fwd[ca as usize] = cb;
                        st.back[cb as usize] = ca;
                        added.push(ca);
                    }
                    (f, g) if f == cb && g == ca => {}
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                st.image.push(t);
                if extend(st, used | 1 << t) {
                    return true;
                }
                st.image.pop();
            }
            for ca in added {
                let cb = st.fwd[ca as usize];
                st.fwd[ca as usize] = NO_COLOR;
                st.back[cb as usize] = NO_COLOR;
            }
        }
        false
    }
    let mut st = State {
        a,
        b,
        image: Vec::with_capacity(a.n()),
        fwd: vec![NO_COLOR; a.color_count()],
        back: vec![NO_COLOR; b.color_count()],
    };
    extend(&mut st, 0)
}

/// Advances `comb` to the next `k`-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut comb: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let current = comb.clone()?;
        let mut next = current.clone();
        comb = next_combination(&mut next, n).then_some(next);
        Some(current)
    })
}

/// `a_k` together with the lexicographically least subset of each class, listed in
/// lexicographic order.
pub fn a_k(space: &ColoredSpace, k: usize) -> Result<(usize, Vec<Vec<usize>>), SpaceError> {
    let n = space.n();
    if k == 0 || k > n {
        return Err(SpaceError::BadK { k, n });
    }
    let mut seen: HashMap<IsometryKey, ()> = HashMap::new();
    let mut reps = Vec::new();
    for subset in subsets(n, k) {
        let key = isometry_key_unchecked(space, &subset);
        if seen.insert(key, ()).is_none() {
            reps.push(subset);
        }
    }
    Ok((reps.len(), reps))
}

pub fn isometric_sequence(space: &ColoredSpace) -> IsometricSequence {
    let n = space.n();
    IsometricSequence(
        (1..=n)
            .map(|k| match k {
                2 => space.color_count(),
                3 => a3_count(space),
                _ => a_k(space, k).expect("k within 1..=n").0,
            })
            .collect(),
    )
}

/// `A_3(r)` through sorted color triples.
pub fn a3_set(space: &ColoredSpace) -> Result<TriangleTypeSet, SpaceError> {
    if space.n() < 3 {
        return Err(SpaceError::TooSmall {
            size: space.n(),
            min: 3,
        });
    }
    Ok(triangles(space)
        .map(|[a, b, c]| TriangleType::new(Color(a), Color(b), Color(c)))
        .collect())
}

/// `A_3` of the subspace on `points`, in the parent's colors.
pub fn a3_set_of(space: &ColoredSpace, points: &[usize]) -> Result<TriangleTypeSet, SpaceError> {
    check_subset(space, points)?;
    if points.len() < 3 {
        return Err(SpaceError::TooSmall {
            size: points.len(),
            min: 3,
        });
    }
    Ok(subsets(points.len(), 3)
        .map(|t| {
            let (x, y, z) = (points[t[0]], points[t[1]], points[t[2]]);
            TriangleType::new(
                Color(space.color(x, y)),
                Color(space.color(x, z)),
                Color(space.color(y, z)),
            )
        })
        .collect())
}

/// Color triples of all triangles, unsorted.
pub(crate) fn triangles(space: &ColoredSpace) -> impl Iterator<Item = [u8; 3]> + '_ {
    let n = space.n();
    (0..n).flat_map(move |x| {
        (x + 1..n).flat_map(move |y| {
            (y + 1..n).map(move |z| [space.color(x, y), space.color(x, z), space.color(y, z)])
        })
    })
}

#[inline]
pub(crate) fn triangle_code(a: u8, b: u8, c: u8) -> u32 {
    let (lo, hi) = (a.min(b), a.max(b));
    let (lo, mid, hi) = if c < lo {
        (c, lo, hi)
    } else if c < hi {
        (lo, c, hi)
    } else {
        (lo, hi, c)
    };
    (lo as u32) << 16 | (mid as u32) << 8 | hi as u32
}

/// `a_3` without building the type set; 0 when `n < 3`.
pub fn a3_count(space: &ColoredSpace) -> usize {
    let mut codes: Vec<u32> = triangles(space)
        .map(|[a, b, c]| triangle_code(a, b, c))
        .collect();
    codes.sort_unstable();
    codes.dedup();
    codes.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{hexagon, monochromatic, octahedron, rainbow};

    #[test]
    fn small_keys() {
        let s = hexagon();
        assert_eq!(isometry_key(&s, &[0, 3]).unwrap().as_bytes(), &[2]);
        assert_eq!(isometry_key(&s, &[0, 1, 2]).unwrap().as_bytes(), &[0, 0, 1]);
        assert_eq!(isometry_key(&s, &[1, 4, 2]).unwrap().as_bytes(), &[0, 1, 2]);
        assert_eq!(isometry_key(&s, &[1]).unwrap().as_bytes(), &[] as &[u8]);
        assert!(isometry_key(&s, &[1, 1]).is_err());
    }

    #[test]
    fn triangle_key_is_sorted_type() {
        let s = crate::enumerate::random_space(7, 5, 11).unwrap();
        for t in subsets(7, 3) {
            let key = isometry_key(&s, &t).unwrap();
            let ty = TriangleType::new(
                Color(s.color(t[0], t[1])),
                Color(s.color(t[0], t[2])),
                Color(s.color(t[1], t[2])),
            );
            let expected: Vec<u8> = ty.colors().iter().map(|c| c.0).collect();
            assert_eq!(key.as_bytes(), &expected[..]);
        }
    }

    #[test]
    fn isometric_examples() {
        let o = octahedron();
        assert!(isometric(&o, &[0, 1, 2], &[0, 1, 2]).unwrap());
        // two faces: no antipodal pair inside either
        assert!(isometric(&o, &[0, 1, 2], &[3, 4, 5]).unwrap());
        assert!(!isometric(&o, &[0, 1, 2], &[0, 1, 3]).unwrap());
        let r = rainbow(5);
        assert!(!isometric(&r, &[0, 1, 2], &[0, 1, 3]).unwrap());
        assert!(matches!(
            isometric(&r, &[0, 1], &[0, 1, 2]),
            Err(SpaceError::SizeMismatch(2, 3))
        ));
    }

    #[test]
    fn isomorphism_examples() {
        let m = monochromatic(4);
        assert_eq!(
            isomorphism_key(&m),
            isomorphism_key(&m.permute_points(&[2, 0, 3, 1]))
        );
        let o = octahedron();
        let swapped = o.rename_colors(&[1, 0]);
        assert!(isomorphic(&o, &swapped));
        assert!(isomorphic_brute_force(&o, &swapped));
        assert!(!isomorphic(&o, &hexagon()));
        assert!(!isomorphic_brute_force(&o, &hexagon()));
    }

    #[test]
    fn canonical_form_round_trips() {
        let s = crate::enumerate::random_space(8, 4, 3).unwrap();
        let (key, rep) = canonical_form(&s);
        assert!(isomorphic_brute_force(&s, &rep));
        assert_eq!(isomorphism_key(&rep), key);
        assert_eq!(IsomorphismKey::from_hex(&key.to_hex()), Some(key));
    }

    #[test]
    fn sequences_of_named_spaces() {
        assert_eq!(isometric_sequence(&octahedron()).to_string(), "1,2,2,2,1,1");
        assert_eq!(isometric_sequence(&hexagon()).to_string(), "1,3,3,3,1,1");
        assert_eq!(isometric_sequence(&monochromatic(5)).values(), &[1; 5]);
    }

    #[test]
    fn a_k_representatives_and_bad_k() {
        let (count, reps) = a_k(&octahedron(), 3).unwrap();
        assert_eq!(count, 2);
        assert_eq!(reps, vec![vec![0, 1, 2], vec![0, 1, 3]]);
        assert_eq!(a_k(&octahedron(), 0), Err(SpaceError::BadK { k: 0, n: 6 }));
        assert_eq!(a_k(&octahedron(), 7), Err(SpaceError::BadK { k: 7, n: 6 }));
    }

    #[test]
    fn a3_sets() {
        let o = a3_set(&octahedron()).unwrap();
        let expected: TriangleTypeSet = [
            TriangleType::new(Color(0), Color(0), Color(0)),
            TriangleType::new(Color(0), Color(0), Color(1)),
        ]
        .into_iter()
        .collect();
        assert_eq!(o, expected);
        let r = a3_set(&rainbow(4)).unwrap();
        assert_eq!(r.len(), 4);
        assert!(a3_set(&rainbow(2)).is_err());
        assert_eq!(serde_json::to_string(&o).unwrap(), "[[0,0,0],[0,0,1]]");
    }

    #[test]
    fn unimodality() {
        assert!(IsometricSequence(vec![1, 3, 3, 3, 1, 1]).is_unimodal());
        assert!(IsometricSequence(vec![1, 1, 1]).is_unimodal());
        assert!(!IsometricSequence(vec![1, 3, 2, 3, 1]).is_unimodal());
    }

    #[test]
    fn combinations_in_order() {
        let all: Vec<Vec<usize>> = subsets(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(subsets(3, 0).count(), 1);
        assert_eq!(subsets(3, 4).count(), 0);
    }
}

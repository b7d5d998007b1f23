//! Isomorph-free generation of colored spaces by adding one point at a time, plus
//! the unreduced set-partition stream and seeded random spaces.
//!
//! Each level holds one canonical representative per isomorphism class. A level
//! on `L + 1` points is produced by giving every pair `{i, L}` of every parent a
//! color, where a color that does not yet occur may only be the next unused index.
//! Partial assignments that already exceed the color or triangle-type caps are cut,
//! which is sound because both caps are inherited by induced subspaces.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use dashmap::DashMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::isometry::{canonical_form, triangle_code, IsomorphismKey};
use crate::space::{pair_count, ColoredSpace, SpaceError, MAX_POINTS, NO_COLOR};

/// Extra filters that are not inherited by subspaces and are applied at the target
/// level only (with pruning of earlier levels where that is provably safe).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtraPredicate {
    /// Exactly this many colors at the target level.
    ExactColors(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationConstraints {
    pub n_target: usize,
    pub max_colors: Option<usize>,
    pub max_a3: Option<usize>,
    #[serde(default)]
    pub extra: Option<ExtraPredicate>,
}

impl EnumerationConstraints {
    pub fn new(n_target: usize) -> Self {
        EnumerationConstraints {
            n_target,
            max_colors: None,
            max_a3: None,
            extra: None,
        }
    }

    pub fn max_colors(mut self, c: usize) -> Self {
        self.max_colors = Some(c);
        self
    }

    pub fn max_a3(mut self, a3: usize) -> Self {
        self.max_a3 = Some(a3);
        self
    }

    pub fn exact_colors(mut self, c: usize) -> Self {
        self.extra = Some(ExtraPredicate::ExactColors(c));
        self
    }

    /// Whether a space satisfies the hereditary caps.
    pub fn admits(&self, space: &ColoredSpace) -> bool {
        self.max_colors.is_none_or(|m| space.color_count() <= m)
            && self
                .max_a3
                .is_none_or(|m| crate::isometry::a3_count(space) <= m)
    }

    fn target_filter(&self, space: &ColoredSpace) -> bool {
        match self.extra {
            Some(ExtraPredicate::ExactColors(k)) => space.color_count() == k,
            None => true,
        }
    }

    /// Whether a level on `points` points may be restricted to the target filter
    /// without losing any target-level space.
    fn level_filter_is_safe(&self, points: usize) -> bool {
        match self.extra {
            Some(ExtraPredicate::ExactColors(k)) => {
                (points + 1..=self.n_target).all(|j| !all_critical_possible(j, k))
            }
            None => false,
        }
    }
}

/// Necessary condition for a `k`-colored space on `j` points in which deleting any
/// point loses a color. Such a point is the centre of a star-shaped color class or
/// an end of a single-edge class; with `s` single-edge classes, `t` stars and `u`
/// other classes we need `s + t + u = k` and `2s + t = j` (after discarding
/// redundant witnesses), and without other classes the `s + t(j-1)` available edges
/// must cover all `C(j,2)` pairs.
///
/// When this is false, every `k`-colored space on `j` points has a `k`-colored
/// subspace on `j - 1` points.
pub fn all_critical_possible(j: usize, k: usize) -> bool {
    (0..=k).any(|s| {
        (0..=k - s).any(|t| {
            let u = k - s - t;
            2 * s + t == j && (u >= 1 || s + t * (j.saturating_sub(1)) >= pair_count(j))
        })
    })
}

/// Search limits. `None` means unlimited.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }
}

pub const CHECKPOINT_VERSION: u32 = 1;

/// Resumable state: the last fully completed level, as canonical keys.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub constraints: EnumerationConstraints,
    /// Point count of the stored level.
    pub completed_points: usize,
    /// Hex canonical keys of the stored level, sorted.
    pub keys: Vec<String>,
    /// Search nodes spent up to the stored level.
    pub nodes: u64,
}

impl Checkpoint {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint is serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, EnumerationError> {
        let cp: Checkpoint =
            serde_json::from_str(s).map_err(|e| EnumerationError::BadCheckpoint(e.to_string()))?;
        if cp.version != CHECKPOINT_VERSION {
            return Err(EnumerationError::BadCheckpoint(format!(
                "unsupported checkpoint version {}",
                cp.version
            )));
        }
        Ok(cp)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnumerationError {
    #[error("budget exceeded while building level {level}; resume from the checkpoint at {} points", .checkpoint.completed_points)]
    BudgetExceeded {
        level: usize,
        checkpoint: Box<Checkpoint>,
    },
    #[error("target point count {0} is outside 2..={MAX_POINTS}")]
    BadTarget(usize),
    #[error("color cap must be positive")]
    BadColorCap,
    #[error("full coloring streams are capped at n = 6, got {0}")]
    TooLarge(usize),
    #[error("color count {c} is outside 1..={max} for {n} points")]
    BadArity { n: usize, c: usize, max: usize },
    #[error("invalid checkpoint: {0}")]
    BadCheckpoint(String),
}

/// Concurrent set of canonical keys with multiplicities.
#[derive(Default)]
pub struct CanonicalStore {
    map: DashMap<IsomorphismKey, (ColoredSpace, u64)>,
}

impl CanonicalStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `space` under its canonical key; returns true if the class is new.
    pub fn insert(&self, space: &ColoredSpace) -> bool {
        let (key, rep) = canonical_form(space);
        self.insert_canonical(key, rep)
    }

    pub fn insert_canonical(&self, key: IsomorphismKey, rep: ColoredSpace) -> bool {
        let mut fresh = false;
        self.map
            .entry(key)
            .and_modify(|e| e.1 += 1)
            .or_insert_with(|| {
                fresh = true;
                (rep, 1)
            });
        fresh
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Contents sorted by key: `(key, canonical representative, count)`.
    pub fn into_sorted(self) -> Vec<(IsomorphismKey, ColoredSpace, u64)> {
        let mut v: Vec<_> = self.map.into_iter().map(|(k, (s, c))| (k, s, c)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationSummary {
    /// Classes emitted at the target level.
    pub count: u64,
    /// Classes kept at each level, indexed from 2 points.
    pub level_sizes: Vec<usize>,
    pub nodes: u64,
    pub elapsed_ms: u64,
}

struct Limits {
    nodes: AtomicU64,
    abort: AtomicBool,
    budget: Budget,
    start: Instant,
}

impl Limits {
    fn tick(&self, amount: u64) -> bool {
        let total = self.nodes.fetch_add(amount, Ordering::Relaxed) + amount;
        if self.budget.max_nodes.is_some_and(|m| total > m)
            || self
                .budget
                .max_time
                .is_some_and(|t| self.start.elapsed() > t)
        {
            self.abort.store(true, Ordering::Relaxed);
        }
        !self.abort.load(Ordering::Relaxed)
    }
}

/// Enumerates one representative per isomorphism class, calling `sink` in ascending
/// key order.
pub fn enumerate_spaces(
    constraints: &EnumerationConstraints,
    budget: Budget,
    sink: impl FnMut(&IsomorphismKey, &ColoredSpace),
) -> Result<EnumerationSummary, EnumerationError> {
    enumerate_from(constraints, budget, None, sink)
}

/// Like [`enumerate_spaces`], optionally resuming from a checkpoint.
pub fn enumerate_from(
    constraints: &EnumerationConstraints,
    budget: Budget,
    resume: Option<&Checkpoint>,
    mut sink: impl FnMut(&IsomorphismKey, &ColoredSpace),
) -> Result<EnumerationSummary, EnumerationError> {
    let target = constraints.n_target;
    if !(2..=MAX_POINTS).contains(&target) {
        return Err(EnumerationError::BadTarget(target));
    }
    if constraints.max_colors == Some(0) {
        return Err(EnumerationError::BadColorCap);
    }
    let start = Instant::now();
    let (mut level, mut points, start_nodes, mut level_sizes) = match resume {
        Some(cp) => resume_level(constraints, cp)?,
        None => {
            let seed = ColoredSpace::from_pair_colors(2, &[0]).expect("two points");
            let level = vec![(crate::isometry::isomorphism_key(&seed), seed)];
            (level, 2, 0, vec![1])
        }
    };
    let limits = Limits {
        nodes: AtomicU64::new(start_nodes),
        abort: AtomicBool::new(false),
        budget,
        start,
    };
    if points == 2 && constraints.level_filter_is_safe(2) {
        level.retain(|(_, s)| constraints.target_filter(s));
        level_sizes[0] = level.len();
    }
    while points < target {
        let store = CanonicalStore::new();
        level.par_iter().for_each(|(_, parent)| {
            if !limits.abort.load(Ordering::Relaxed) {
                extend(parent, constraints, &limits, &store);
            }
        });
        if limits.abort.load(Ordering::Relaxed) {
            let checkpoint = Checkpoint {
                version: CHECKPOINT_VERSION,
                constraints: constraints.clone(),
                completed_points: points,
                keys: level.iter().map(|(k, _)| k.to_hex()).collect(),
                nodes: start_nodes,
            };
            return Err(EnumerationError::BudgetExceeded {
                level: points + 1,
                checkpoint: Box::new(checkpoint),
            });
        }
        points += 1;
        let filter_level = points == target || constraints.level_filter_is_safe(points);
        level = store
            .into_sorted()
            .into_iter()
            .filter(|(_, s, _)| !filter_level || constraints.target_filter(s))
            .map(|(k, s, _)| (k, s))
            .collect();
        level_sizes.push(level.len());
    }
    if target == 2 {
        level.retain(|(_, s)| constraints.target_filter(s) && constraints.admits(s));
        level_sizes[0] = level.len();
    }
    for (key, space) in &level {
        sink(key, space);
    }
    Ok(EnumerationSummary {
        count: level.len() as u64,
        level_sizes,
        nodes: limits.nodes.load(Ordering::Relaxed),
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

type Level = Vec<(IsomorphismKey, ColoredSpace)>;

fn resume_level(
    constraints: &EnumerationConstraints,
    cp: &Checkpoint,
) -> Result<(Level, usize, u64, Vec<usize>), EnumerationError> {
    if cp.constraints != *constraints {
        return Err(EnumerationError::BadCheckpoint(
            "checkpoint was written for different constraints".into(),
        ));
    }
    let mut level = Vec::with_capacity(cp.keys.len());
    for hex in &cp.keys {
        let key = IsomorphismKey::from_hex(hex)
            .ok_or_else(|| EnumerationError::BadCheckpoint(format!("bad key {hex}")))?;
        if key.as_bytes()[0] as usize != cp.completed_points {
            return Err(EnumerationError::BadCheckpoint(format!(
                "key {hex} has the wrong size"
            )));
        }
        let space = key.to_space();
        level.push((key, space));
    }
    let mut sizes = vec![0; cp.completed_points - 1];
    sizes[cp.completed_points - 2] = level.len();
    Ok((level, cp.completed_points, cp.nodes, sizes))
}

/// All one-point extensions of `parent` that respect the caps.
fn extend(
    parent: &ColoredSpace,
    constraints: &EnumerationConstraints,
    limits: &Limits,
    store: &CanonicalStore,
) {
    let l = parent.n();
    let m = l + 1;
    let mut matrix = vec![NO_COLOR; m * m];
    for i in 0..l {
        for j in 0..l {
            if i != j {
                matrix[i * m + j] = parent.color(i, j);
            }
        }
    }
    let mut codes: Vec<u32> = crate::isometry::triangles(parent)
        .map(|[a, b, c]| triangle_code(a, b, c))
        .collect();
    codes.sort_unstable();
    codes.dedup();
    let mut st = Extension {
        l,
        m,
        matrix,
        codes,
        colors: parent.color_count(),
        max_colors: constraints.max_colors.unwrap_or(usize::MAX),
        max_a3: constraints.max_a3.unwrap_or(usize::MAX),
        limits,
        store,
        pending: 0,
    };
    st.assign(0);
    limits.tick(st.pending);
}

struct Extension<'a> {
    l: usize,
    m: usize,
    matrix: Vec<u8>,
    codes: Vec<u32>,
    colors: usize,
    max_colors: usize,
    max_a3: usize,
    limits: &'a Limits,
    store: &'a CanonicalStore,
    pending: u64,
}

impl Extension<'_> {
    fn assign(&mut self, i: usize) {
        self.pending += 1;
        if self.pending >= 4096 {
            let ok = self.limits.tick(self.pending);
            self.pending = 0;
            if !ok {
                return;
            }
        }
        if self.limits.abort.load(Ordering::Relaxed) {
            return;
        }
        let (l, m) = (self.l, self.m);
        if i == l {
            let space = ColoredSpace::from_matrix_unchecked(m, self.colors, self.matrix.clone());
            let (key, rep) = canonical_form(&space);
            self.store.insert_canonical(key, rep);
            return;
        }
        let top = (self.colors + 1).min(self.max_colors);
        for c in 0..top {
            let c8 = c as u8;
            self.matrix[i * m + l] = c8;
            self.matrix[l * m + i] = c8;
            let saved_colors = self.colors;
            if c == self.colors {
                self.colors += 1;
            }
            let saved_len = self.codes.len();
            let mut ok = true;
            for j in 0..i {
                let code = triangle_code(self.matrix[j * m + i], self.matrix[j * m + l], c8);
                if !self.codes.contains(&code) {
                    if self.codes.len() >= self.max_a3 {
                        ok = false;
                        break;
                    }
                    self.codes.push(code);
                }
            }
            if ok {
                self.assign(i + 1);
            }
            self.codes.truncate(saved_len);
            self.colors = saved_colors;
        }
        self.matrix[i * m + l] = NO_COLOR;
        self.matrix[l * m + i] = NO_COLOR;
    }
}

/// `Bell(k)`, the number of set partitions of a `k`-set.
pub fn bell(k: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..k {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().expect("non-empty"));
        for &x in &row {
            let last = *next.last().expect("non-empty");
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

pub const MAX_FULL_COLORING_POINTS: usize = 6;

/// Streams every coloring of `K_n` up to renaming of colors (one per set partition of
/// the pairs, colors numbered by first appearance in pair order).
pub fn enumerate_all_colorings(
    n: usize,
    mut sink: impl FnMut(&ColoredSpace),
) -> Result<u64, EnumerationError> {
    check_full(n)?;
    let slots = pair_count(n);
    let mut rgs = vec![0u8; slots];
    let mut count = 0u64;
    rgs_walk_len(slots, &mut rgs, 1, 1, &mut |rgs, colors| {
        count += 1;
        sink(&rgs_space(n, rgs, colors));
    });
    Ok(count)
}

/// Parallel variant of [`enumerate_all_colorings`]: the stream is sharded on a
/// prefix of the pair slots and `f` is called concurrently. Returns the count.
pub fn par_enumerate_all_colorings(
    n: usize,
    f: impl Fn(&ColoredSpace) + Sync,
) -> Result<u64, EnumerationError> {
    check_full(n)?;
    let slots = pair_count(n);
    let prefix_len = slots.min(6);
    let mut prefixes = Vec::new();
    let mut rgs = vec![0u8; prefix_len];
    rgs_walk_len(prefix_len, &mut rgs, 1, 1, &mut |p, colors| {
        prefixes.push((p.to_vec(), colors))
    });
    let total = AtomicU64::new(0);
    prefixes.par_iter().for_each(|(prefix, colors)| {
        let mut rgs = vec![0u8; slots];
        rgs[..prefix_len].copy_from_slice(prefix);
        let mut local = 0u64;
        rgs_walk_len(
            slots,
            &mut rgs,
            prefix_len.max(1),
            *colors,
            &mut |rgs, colors| {
                local += 1;
                f(&rgs_space(n, rgs, colors));
            },
        );
        total.fetch_add(local, Ordering::Relaxed);
    });
    Ok(total.into_inner())
}

fn check_full(n: usize) -> Result<(), EnumerationError> {
    if n < 2 {
        return Err(EnumerationError::BadTarget(n));
    }
    if n > MAX_FULL_COLORING_POINTS {
        return Err(EnumerationError::TooLarge(n));
    }
    Ok(())
}

/// Restricted growth strings: `rgs[0] = 0`, `rgs[i] ≤ max(rgs[..i]) + 1`.
fn rgs_walk_len(
    len: usize,
    rgs: &mut [u8],
    pos: usize,
    colors: usize,
    visit: &mut dyn FnMut(&[u8], usize),
) {
    if pos >= len {
        visit(&rgs[..len], colors);
        return;
    }
    for c in 0..=colors {
        rgs[pos] = c as u8;
        rgs_walk_len(len, rgs, pos + 1, colors.max(c + 1), visit);
    }
}

fn rgs_space(n: usize, rgs: &[u8], colors: usize) -> ColoredSpace {
    let mut matrix = vec![NO_COLOR; n * n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            matrix[i * n + j] = rgs[k];
            matrix[j * n + i] = rgs[k];
            k += 1;
        }
    }
    ColoredSpace::from_matrix_unchecked(n, colors, matrix)
}

/// A space with `c` colors: uniform colors per pair, then each missing color is placed
/// on a random pair whose current color is used more than once. Same seed, same space.
pub fn random_space(n: usize, c: usize, seed: u64) -> Result<ColoredSpace, EnumerationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_space_with(&mut rng, n, c)
}

pub fn random_space_with<R: Rng>(
    rng: &mut R,
    n: usize,
    c: usize,
) -> Result<ColoredSpace, EnumerationError> {
    if !(2..=MAX_POINTS).contains(&n) {
        return Err(EnumerationError::BadTarget(n));
    }
    let max = pair_count(n);
    if c == 0 || c > max {
        return Err(EnumerationError::BadArity { n, c, max });
    }
    let mut colors: Vec<u8> = (0..max).map(|_| rng.gen_range(0..c) as u8).collect();
    let mut sizes = vec![0usize; c];
    for &x in &colors {
        sizes[x as usize] += 1;
    }
    for missing in 0..c {
        if sizes[missing] > 0 {
            continue;
        }
        let donors: Vec<usize> = (0..max)
            .filter(|&p| sizes[colors[p] as usize] >= 2)
            .collect();
        let p = donors[rng.gen_range(0..donors.len())];
        sizes[colors[p] as usize] -= 1;
        colors[p] = missing as u8;
        sizes[missing] = 1;
    }
    ColoredSpace::from_pair_colors(n, &colors)
        .map_err(|e: SpaceError| unreachable!("repaired coloring is valid: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isometry::{isomorphic, isomorphism_key};

    #[test]
    fn bell_numbers() {
        assert_eq!(bell(0), 1);
        assert_eq!(bell(3), 5);
        assert_eq!(bell(6), 203);
        assert_eq!(bell(10), 115975);
        assert_eq!(bell(15), 1382958545);
    }

    #[test]
    fn full_streams() {
        assert_eq!(enumerate_all_colorings(3, |_| {}).unwrap(), 5);
        assert_eq!(enumerate_all_colorings(4, |_| {}).unwrap(), 203);
        assert_eq!(par_enumerate_all_colorings(4, |_| {}).unwrap(), 203);
        assert_eq!(
            enumerate_all_colorings(7, |_| {}),
            Err(EnumerationError::TooLarge(7))
        );
        let mut seen = std::collections::HashSet::new();
        enumerate_all_colorings(4, |s| assert!(seen.insert(s.pair_colors()))).unwrap();
    }

    #[test]
    fn small_class_counts() {
        let count = |c: EnumerationConstraints| {
            enumerate_spaces(&c, Budget::unlimited(), |_, _| {})
                .unwrap()
                .count
        };
        assert_eq!(count(EnumerationConstraints::new(2)), 1);
        assert_eq!(count(EnumerationConstraints::new(3)), 3);
        assert_eq!(count(EnumerationConstraints::new(3).max_colors(2)), 2);
        assert_eq!(count(EnumerationConstraints::new(4)), 25);
    }

    #[test]
    fn critical_counting() {
        assert!(all_critical_possible(5, 4));
        assert!(all_critical_possible(6, 4));
        for j in 7..=9 {
            assert!(!all_critical_possible(j, 4), "{j}");
        }
        // a rainbow triangle loses a color whichever point is removed
        assert!(all_critical_possible(3, 3));
    }

    #[test]
    fn random_spaces() {
        let a = random_space(7, 5, 42).unwrap();
        assert_eq!(a, random_space(7, 5, 42).unwrap());
        assert_eq!(a.color_count(), 5);
        assert_eq!(random_space(5, 1, 1).unwrap().class_sizes(), vec![10]);
        let r = random_space(5, 10, 9).unwrap();
        assert!(isomorphic(&r, &crate::examples::rainbow(5)));
        assert!(matches!(
            random_space(4, 7, 0),
            Err(EnumerationError::BadArity { .. })
        ));
    }

    #[test]
    fn budget_and_resume() {
        let c = EnumerationConstraints::new(6).max_colors(3);
        let mut full = Vec::new();
        enumerate_spaces(&c, Budget::unlimited(), |k, _| full.push(k.clone())).unwrap();
        let tight = Budget {
            max_nodes: Some(2000),
            max_time: None,
        };
        let err = enumerate_spaces(&c, tight, |_, _| {}).unwrap_err();
        let EnumerationError::BudgetExceeded { checkpoint, .. } = err else {
            panic!("{err:?}")
        };
        let cp = Checkpoint::from_json(&checkpoint.to_json()).unwrap();
        let mut resumed = Vec::new();
        enumerate_from(&c, Budget::unlimited(), Some(&cp), |k, _| {
            resumed.push(k.clone())
        })
        .unwrap();
        assert_eq!(full, resumed);
    }

    #[test]
    fn representatives_are_canonical() {
        enumerate_spaces(
            &EnumerationConstraints::new(4),
            Budget::unlimited(),
            |k, s| {
                assert_eq!(&isomorphism_key(s), k);
            },
        )
        .unwrap();
    }
}

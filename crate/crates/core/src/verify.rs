//! Verification jobs: exhaustive, constrained and sampled sweeps over universes of
//! spaces, producing reports that can be replayed from their configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::enumerate::{
    bell, enumerate_spaces, par_enumerate_all_colorings, random_space_with, Budget,
    EnumerationConstraints, EnumerationError, MAX_FULL_COLORING_POINTS,
};
use crate::examples::{
    family_edge_apex, family_matchings, family_two_cliques, hexagon, monochromatic, rainbow,
};
use crate::format::to_text;
use crate::fusion::{
    apply_fusion, find_matching_fusion, find_reducing_fusion, fusion_chain, FusionError, FusionMap,
};
use crate::isometry::{
    a3_count, a3_set, isometric, isometry_key, isomorphic_brute_force, isomorphism_key,
};
use crate::space::{pair_count, ColorSet, ColoredSpace, SpaceError};
use crate::structure::{
    all_lemma_reports, check_a3_bound, classify_patterns, is_closed, is_closed_via_cliques,
    match_shape, validate_pattern, ClosednessTables, Shape, SHAPE_AAA_AAB_AAG_AAD,
    SHAPE_AAA_ABB_ABG_ABD, SHAPE_AAA_ABB_AGG_BGD, SHAPE_AAA_ABG_AGD_ABD, SHAPE_AAB_AAG_AAD_BGD,
    SHAPE_AAB_AAG_BBG_AAD, SHAPE_AAB_AAG_BBG_ABD,
};

/// Records kept per report; totals are always exact.
pub const MAX_RECORDS: usize = 1000;

/// Point count from which every space with `a_2 = a_3 ≥ 4` must match a pattern.
pub const CLASSIFICATION_MIN_POINTS: usize = 9;

const SAMPLE_CHUNK: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Job {
    A2LeA3,
    Classification,
    Lemmas,
    Fusion,
    CrossCheckKeys,
}

impl Job {
    pub const ALL: [Job; 5] = [
        Job::A2LeA3,
        Job::Classification,
        Job::Lemmas,
        Job::Fusion,
        Job::CrossCheckKeys,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Job::A2LeA3 => "a2-le-a3",
            Job::Classification => "classification",
            Job::Lemmas => "lemmas",
            Job::Fusion => "fusion",
            Job::CrossCheckKeys => "cross-check-keys",
        }
    }
}

impl fmt::Display for Job {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Job {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a2-le-a3" | "a2le3" | "a2lea3" | "a2_le_a3" => Ok(Job::A2LeA3),
            "classification" | "classify" => Ok(Job::Classification),
            "lemmas" => Ok(Job::Lemmas),
            "fusion" => Ok(Job::Fusion),
            "cross-check-keys" | "keys" | "cross_check_keys" => Ok(Job::CrossCheckKeys),
            other => Err(VerifyError::UnknownJob(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every coloring (one per partition of the pairs), reconciled against Bell numbers.
    Full,
    /// Isomorph-free enumeration under a color cap.
    Constrained,
    /// Seeded random colorings.
    Sampled,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::Constrained => "constrained",
            Mode::Sampled => "sampled",
        })
    }
}

impl FromStr for Mode {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Mode::Full),
            "constrained" => Ok(Mode::Constrained),
            "sampled" => Ok(Mode::Sampled),
            other => Err(VerifyError::UnknownMode(other.to_string())),
        }
    }
}

/// Everything that determines a job's output. The worker count is deliberately not
/// part of it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobConfig {
    pub job: Job,
    pub n_min: usize,
    pub n_max: usize,
    pub mode: Mode,
    /// Color cap for constrained universes.
    pub max_colors: usize,
    /// Random spaces (a2-le-a3, fusion), closed-set probes (lemmas), subset pairs
    /// (cross-check-keys) or perturbations (classification).
    pub samples: u64,
    /// Space pairs for cross-check-keys.
    pub space_pairs: u64,
    pub seed: u64,
    pub budget_nodes: Option<u64>,
    pub budget_secs: Option<u64>,
}

impl JobConfig {
    pub fn new(job: Job, n_min: usize, n_max: usize, mode: Mode) -> Self {
        let samples = match job {
            Job::A2LeA3 => 10_000_000,
            Job::Lemmas => 100_000,
            Job::CrossCheckKeys => 10_000,
            Job::Classification => 10_000,
            Job::Fusion => 100_000,
        };
        JobConfig {
            job,
            n_min,
            n_max,
            mode,
            max_colors: 4,
            samples,
            space_pairs: if job == Job::CrossCheckKeys { 1000 } else { 0 },
            seed: 0,
            budget_nodes: None,
            budget_secs: None,
        }
    }

    pub fn samples(mut self, samples: u64) -> Self {
        self.samples = samples;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn max_colors(mut self, c: usize) -> Self {
        self.max_colors = c;
        self
    }

    pub fn budget(&self) -> Budget {
        Budget {
            max_nodes: self.budget_nodes,
            max_time: self.budget_secs.map(Duration::from_secs),
        }
    }

    /// First 16 hex digits of the SHA-256 of the JSON configuration.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("config is serializable");
        let digest = Sha256::digest(json.as_bytes());
        hex::encode(&digest[..8])
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown job {0:?}")]
    UnknownJob(String),
    #[error("unknown mode {0:?} (expected full, constrained or sampled)")]
    UnknownMode(String),
    #[error("bad range: {0}")]
    BadRange(String),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// One universe that a job covered.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniverseEntry {
    pub n: usize,
    pub mode: Mode,
    pub description: String,
    /// Analytic size, when known (full mode).
    pub predicted: Option<u64>,
    pub covered: u64,
}

/// A violation or finding: the space, its canonical key, and the inputs of the check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub key: String,
    pub check: String,
    pub space: String,
    pub detail: Value,
}

impl Record {
    pub fn new(space: &ColoredSpace, check: &str, detail: Value) -> Self {
        Record {
            key: isomorphism_key(space).to_hex(),
            check: check.to_string(),
            space: to_text(space),
            detail,
        }
    }

    fn bare(check: &str, detail: Value) -> Self {
        Record {
            key: String::new(),
            check: check.to_string(),
            space: String::new(),
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub job_id: String,
    pub fingerprint: String,
    pub config: JobConfig,
    pub universe: Vec<UniverseEntry>,
    pub checked: u64,
    /// Sorted by canonical key; at most [`MAX_RECORDS`] kept.
    pub violations: Vec<Record>,
    pub violations_total: u64,
    /// Expected or informational records (e.g. counterexamples below the threshold).
    pub findings: Vec<Record>,
    pub findings_total: u64,
    pub stats: BTreeMap<String, u64>,
    pub coverage: Vec<String>,
    pub downgraded: bool,
    pub budget_exceeded: bool,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations_total == 0 && !self.budget_exceeded
    }

    /// 0 pass, 2 violations, 3 budget exceeded.
    pub fn exit_code(&self) -> i32 {
        if self.violations_total > 0 {
            2
        } else if self.budget_exceeded {
            3
        } else {
            0
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}-{}.json", self.job_id, self.fingerprint)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("job          {}\n", self.job_id));
        out.push_str(&format!("fingerprint  {}\n", self.fingerprint));
        for u in &self.universe {
            let predicted = u.predicted.map_or("-".to_string(), |p| p.to_string());
            out.push_str(&format!(
                "universe     n={:<2} {:<11} predicted {:>10}  covered {:>10}  {}\n",
                u.n, u.mode, predicted, u.covered, u.description
            ));
        }
        out.push_str(&format!("checked      {}\n", self.checked));
        out.push_str(&format!("violations   {}\n", self.violations_total));
        out.push_str(&format!("findings     {}\n", self.findings_total));
        for (k, v) in &self.stats {
            out.push_str(&format!("stat         {k} = {v}\n"));
        }
        for c in &self.coverage {
            out.push_str(&format!("coverage     {c}\n"));
        }
        if self.downgraded {
            out.push_str("downgraded   yes\n");
        }
        if self.budget_exceeded {
            out.push_str("budget       exceeded\n");
        }
        out.push_str(&format!("elapsed_ms   {}\n", self.elapsed_ms));
        let result = match self.exit_code() {
            0 => "PASS",
            2 => "FAIL",
            _ => "INCOMPLETE",
        };
        out.push_str(&format!("result       {result}\n"));
        out
    }
}

/// Shared accumulator for one job run.
#[derive(Default)]
struct Collector {
    checked: AtomicU64,
    violations: Mutex<Vec<Record>>,
    findings: Mutex<Vec<Record>>,
    stats: Mutex<BTreeMap<String, u64>>,
    universe: Mutex<Vec<UniverseEntry>>,
    coverage: Mutex<Vec<String>>,
    downgraded: bool,
    budget_exceeded: bool,
}

impl Collector {
    fn check(&self) {
        self.checked.fetch_add(1, Ordering::Relaxed);
    }

    fn violation(&self, r: Record) {
        self.violations.lock().unwrap().push(r);
    }

    fn finding(&self, r: Record) {
        self.findings.lock().unwrap().push(r);
    }

    fn add_stat(&self, key: impl Into<String>, v: u64) {
        *self.stats.lock().unwrap().entry(key.into()).or_default() += v;
    }

    fn merge_stats(&self, local: BTreeMap<String, u64>) {
        let mut stats = self.stats.lock().unwrap();
        for (k, v) in local {
            *stats.entry(k).or_default() += v;
        }
    }

    fn universe(&self, entry: UniverseEntry) {
        self.universe.lock().unwrap().push(entry);
    }

    fn note(&self, s: impl Into<String>) {
        self.coverage.lock().unwrap().push(s.into());
    }

    fn finish(self, config: JobConfig, start: Instant) -> VerificationReport {
        let sort = |mut v: Vec<Record>| {
            v.sort_by(|a, b| {
                (&a.key, &a.check, a.detail.to_string()).cmp(&(
                    &b.key,
                    &b.check,
                    b.detail.to_string(),
                ))
            });
            v.dedup();
            let total = v.len() as u64;
            v.truncate(MAX_RECORDS);
            (v, total)
        };
        let (violations, violations_total) = sort(self.violations.into_inner().unwrap());
        let (findings, findings_total) = sort(self.findings.into_inner().unwrap());
        VerificationReport {
            job_id: config.job.id().to_string(),
            fingerprint: config.fingerprint(),
            config,
            universe: self.universe.into_inner().unwrap(),
            checked: self.checked.into_inner(),
            violations,
            violations_total,
            findings,
            findings_total,
            stats: self.stats.into_inner().unwrap(),
            coverage: self.coverage.into_inner().unwrap(),
            downgraded: self.downgraded,
            budget_exceeded: self.budget_exceeded,
            elapsed_ms: start.elapsed().as_millis() as u64,
        }
    }
}

/// Runs the job described by `config`.
pub fn run_job(config: &JobConfig) -> Result<VerificationReport, VerifyError> {
    match config.job {
        Job::A2LeA3 => verify_a2_le_a3(config),
        Job::Classification => verify_classification(config),
        Job::Lemmas => verify_lemmas(config),
        Job::Fusion => verify_fusion(config),
        Job::CrossCheckKeys => cross_check_keys(config),
    }
}

fn check_range(config: &JobConfig, min: usize) -> Result<(), VerifyError> {
    if config.n_min < min || config.n_min > config.n_max || config.n_max > crate::space::MAX_POINTS
    {
        return Err(VerifyError::BadRange(format!(
            "{}..={} (this job needs {min} <= n_min <= n_max <= {})",
            config.n_min,
            config.n_max,
            crate::space::MAX_POINTS
        )));
    }
    Ok(())
}

/// Visits a universe of spaces of size `n` in parallel. Returns false when the
/// enumeration budget ran out.
fn sweep(
    config: &JobConfig,
    n: usize,
    mode: Mode,
    col: &Collector,
    visit: &(dyn Fn(&ColoredSpace) + Sync),
) -> Result<bool, VerifyError> {
    match mode {
        Mode::Full => {
            if n > MAX_FULL_COLORING_POINTS {
                return Err(VerifyError::BadRange(format!(
                    "full mode is capped at n = {MAX_FULL_COLORING_POINTS}, got {n}"
                )));
            }
            let predicted = bell(pair_count(n)) as u64;
            let covered = par_enumerate_all_colorings(n, visit)?;
            col.universe(UniverseEntry {
                n,
                mode,
                description: "all colorings up to color renaming".into(),
                predicted: Some(predicted),
                covered,
            });
            if covered != predicted {
                col.violation(Record::bare(
                    "universe_count",
                    json!({"n": n, "predicted": predicted, "covered": covered}),
                ));
            }
            Ok(true)
        }
        Mode::Constrained => {
            let constraints = EnumerationConstraints::new(n).max_colors(config.max_colors);
            let mut reps = Vec::new();
            let result =
                enumerate_spaces(&constraints, config.budget(), |_, s| reps.push(s.clone()));
            let done = match result {
                Ok(_) => true,
                Err(EnumerationError::BudgetExceeded { level, .. }) => {
                    col.note(format!(
                        "budget exceeded while building level {level} for n = {n}"
                    ));
                    false
                }
                Err(e) => return Err(e.into()),
            };
            reps.par_iter().for_each(visit);
            col.universe(UniverseEntry {
                n,
                mode,
                description: format!("isomorph-free, at most {} colors", config.max_colors),
                predicted: None,
                covered: reps.len() as u64,
            });
            Ok(done)
        }
        Mode::Sampled => {
            let covered = sample_spaces(config.samples, config.seed ^ (n as u64) << 48, n, visit);
            col.universe(UniverseEntry {
                n,
                mode,
                description: format!("seeded random colorings, seed {}", config.seed),
                predicted: Some(config.samples),
                covered,
            });
            Ok(true)
        }
    }
}

/// Chunked seeded sampling: chunk `i` uses stream `i` of a ChaCha8 generator, so the
/// sample set does not depend on the worker count. The color count is uniform in
/// `1..=C(n,2)`.
fn sample_spaces(samples: u64, seed: u64, n: usize, visit: &(dyn Fn(&ColoredSpace) + Sync)) -> u64 {
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    let max_c = pair_count(n);
    (0..chunks).into_par_iter().for_each(|i| {
        let mut rng = chunk_rng(seed, i);
        let len = SAMPLE_CHUNK.min(samples - i * SAMPLE_CHUNK);
        for _ in 0..len {
            let c = rng.gen_range(1..=max_c);
            let s = random_space_with(&mut rng, n, c).expect("valid arity");
            visit(&s);
        }
    });
    samples
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// `a_2 ≤ a_3` on every space with at least 5 points; at 3 and 4 points the job must
/// instead find spaces with `a_2 > a_3`.
pub fn verify_a2_le_a3(config: &JobConfig) -> Result<VerificationReport, VerifyError> {
    check_range(config, 3)?;
    let start = Instant::now();
    let mut col = Collector::default();
    for n in config.n_min..=config.n_max {
        if n <= 4 {
            // expect-counterexample mode, always over every coloring
            let found = AtomicU64::new(0);
            sweep(config, n, Mode::Full, &col, &|s| {
                col.check();
                let (a2, a3) = (s.color_count(), a3_count(s));
                if a2 > a3 {
                    found.fetch_add(1, Ordering::Relaxed);
                    col.finding(Record::new(
                        s,
                        "a2_gt_a3_below_5",
                        json!({"n": n, "a2": a2, "a3": a3}),
                    ));
                }
            })?;
            let found = found.into_inner();
            col.add_stat(format!("n{n}.colorings_with_a2_gt_a3"), found);
            if found == 0 {
                col.violation(Record::bare(
                    "expected_counterexample_missing",
                    json!({"n": n}),
                ));
            }
            continue;
        }
        let bad = AtomicU64::new(0);
        let done = sweep(config, n, config.mode, &col, &|s| {
            col.check();
            let (a2, a3) = (s.color_count(), a3_count(s));
            if a2 > a3 {
                bad.fetch_add(1, Ordering::Relaxed);
                col.violation(Record::new(
                    s,
                    "a2_le_a3",
                    json!({"n": n, "a2": a2, "a3": a3}),
                ));
            }
        })?;
        col.add_stat(format!("n{n}.violations"), bad.into_inner());
        if !done {
            col.budget_exceeded = true;
            break;
        }
    }
    Ok(col.finish(config.clone(), start))
}

/// The shapes whose point bounds are checked, in a fixed order.
pub const ALL_SHAPES: [Shape; 7] = [
    SHAPE_AAB_AAG_AAD_BGD,
    SHAPE_AAB_AAG_BBG_AAD,
    SHAPE_AAB_AAG_BBG_ABD,
    SHAPE_AAA_ABG_AGD_ABD,
    SHAPE_AAA_ABB_AGG_BGD,
    SHAPE_AAA_ABB_ABG_ABD,
    SHAPE_AAA_AAB_AAG_AAD,
];

/// Checks of one space with `a_2 = a_3 ≥ 4`: pattern witnesses are valid, and at
/// `n ≥ 9` at least one pattern matches.
fn check_classified(
    space: &ColoredSpace,
    col: &Collector,
    stats: &mut BTreeMap<String, u64>,
    source: &str,
) {
    let n = space.n();
    let matches = classify_patterns(space);
    for m in &matches {
        *stats
            .entry(format!("{source}.pattern.{}", m.label()))
            .or_default() += 1;
        if !validate_pattern(space, m) {
            col.violation(Record::new(
                space,
                "invalid_pattern_witness",
                serde_json::to_value(m).unwrap(),
            ));
        }
    }
    if matches.is_empty() {
        let detail = json!({"n": n, "a2": space.color_count(), "a3": a3_count(space)});
        if n >= CLASSIFICATION_MIN_POINTS {
            col.violation(Record::new(space, "unclassified", detail));
        } else {
            *stats
                .entry(format!("{source}.unclassified_below_9"))
                .or_default() += 1;
            col.finding(Record::new(space, "unclassified_below_9", detail));
        }
    }
}

/// Constrained enumeration of 4-colored spaces with `a_3 ≤ 4` for each size in the
/// range: pattern completeness at `n ≥ 9`, the lemma checkers, and the absence of the
/// bounded triangle shapes beyond their bounds. Larger `a_2` is probed on family
/// instances and seeded perturbations of them.
pub fn verify_classification(config: &JobConfig) -> Result<VerificationReport, VerifyError> {
    check_range(config, 4)?;
    let start = Instant::now();
    let mut col = Collector::default();
    let mut stats = BTreeMap::new();
    for n in config.n_min..=config.n_max {
        let constraints = EnumerationConstraints::new(n)
            .max_colors(4)
            .max_a3(4)
            .exact_colors(4);
        let mut reps = Vec::new();
        match enumerate_spaces(&constraints, config.budget(), |_, s| reps.push(s.clone())) {
            Ok(summary) => {
                stats.insert(format!("n{n}.nodes"), summary.nodes);
            }
            Err(EnumerationError::BudgetExceeded { level, .. }) => {
                col.downgraded = true;
                col.note(format!(
                    "budget exceeded while building level {level} for n = {n}; results cover n <= {}",
                    n - 1
                ));
                break;
            }
            Err(e) => return Err(e.into()),
        }
        let mut four_four = 0u64;
        for s in &reps {
            col.check();
            let types = a3_set(s)?;
            if types.len() != 4 {
                continue;
            }
            four_four += 1;
            for report in all_lemma_reports(s) {
                if report.is_violation() {
                    col.violation(Record::new(
                        s,
                        &report.lemma,
                        report.witness.clone().unwrap_or(Value::Null),
                    ));
                }
            }
            for shape in &ALL_SHAPES {
                if let Some(roles) = match_shape(&types, shape) {
                    *stats
                        .entry(format!("n{n}.shape.{}", shape.name))
                        .or_default() += 1;
                    if shape.max_points.is_some_and(|m| n > m) {
                        col.violation(Record::new(
                            s,
                            "shape_beyond_bound",
                            json!({"shape": shape.name, "roles": roles, "n": n, "max_points": shape.max_points}),
                        ));
                    }
                }
            }
            check_classified(s, &col, &mut stats, &format!("n{n}"));
        }
        stats.insert(format!("n{n}.a2_eq_a3_eq_4"), four_four);
        col.universe(UniverseEntry {
            n,
            mode: Mode::Constrained,
            description: "isomorph-free, exactly 4 colors, a_3 <= 4".into(),
            predicted: None,
            covered: reps.len() as u64,
        });
    }
    if config.n_max >= CLASSIFICATION_MIN_POINTS && !col.downgraded {
        col.note(format!(
            "a_2 = a_3 = 4: exhaustive for n in {}..={}",
            config.n_min, config.n_max
        ));
    }
    classification_sentinels(config, &col, &mut stats);
    col.note("a_2 = a_3 >= 5: family instances and seeded perturbations only, not exhaustive");
    col.merge_stats(stats);
    Ok(col.finish(config.clone(), start))
}

fn sentinel_instances() -> Vec<(&'static str, ColoredSpace)> {
    let mut out = Vec::new();
    for n in 9..=12 {
        out.push(("edge-apex", family_edge_apex(n)));
    }
    let singles = |k: usize| (0..k).map(|i| vec![(2 * i, 2 * i + 1)]).collect::<Vec<_>>();
    for n in 9..=11 {
        for k in 3..=n / 2 {
            out.push((
                "matchings-plus-remainder",
                family_matchings(n, &singles(k)).expect("valid family"),
            ));
        }
    }
    for (p, q) in [(5, 4), (5, 5), (6, 4)] {
        for k in 1..=3usize.min(q) {
            let crosses: Vec<Vec<(usize, usize)>> = (0..k).map(|i| vec![(i, p + i)]).collect();
            out.push((
                "two-cliques-cross-matchings",
                family_two_cliques((p, q), &crosses).expect("valid family"),
            ));
        }
    }
    out
}

fn classification_sentinels(
    config: &JobConfig,
    col: &Collector,
    stats: &mut BTreeMap<String, u64>,
) {
    let instances = sentinel_instances();
    for (label, s) in &instances {
        col.check();
        let (a2, a3) = (s.color_count(), a3_count(s));
        *stats.entry(format!("sentinel.{label}")).or_default() += 1;
        if a2 == a3 {
            *stats.entry("sentinel.a2_eq_a3".into()).or_default() += 1;
        }
        let matches = classify_patterns(s);
        if !matches
            .iter()
            .any(|m| m.label() == *label && validate_pattern(s, m))
        {
            col.violation(Record::new(
                s,
                "sentinel_misclassified",
                json!({"expected": label, "got": matches.iter().map(|m| m.label()).collect::<Vec<_>>()}),
            ));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut hits = 0u64;
    for _ in 0..config.samples {
        let (_, base) = &instances[rng.gen_range(0..instances.len())];
        let s = perturb(base, &mut rng);
        col.check();
        if s.n() >= CLASSIFICATION_MIN_POINTS
            && s.color_count() >= 4
            && s.color_count() == a3_count(&s)
        {
            hits += 1;
            check_classified(&s, col, stats, "perturbation");
        }
    }
    stats.insert("perturbation.samples".into(), config.samples);
    stats.insert("perturbation.a2_eq_a3_ge_4".into(), hits);
}

/// Recolors one or two random pairs, possibly with a fresh color.
fn perturb(space: &ColoredSpace, rng: &mut ChaCha8Rng) -> ColoredSpace {
    let mut colors = space.pair_colors();
    let c = space.color_count();
    for _ in 0..rng.gen_range(1..=2) {
        let p = rng.gen_range(0..colors.len());
        colors[p] = rng.gen_range(0..=c) as u8;
    }
    ColoredSpace::from_pair_colors(space.n(), &first_appearance(&colors))
        .expect("renumbered coloring")
}

fn first_appearance(colors: &[u8]) -> Vec<u8> {
    let mut map = [u8::MAX; 256];
    let mut next = 0u8;
    colors
        .iter()
        .map(|&c| {
            if map[c as usize] == u8::MAX {
                map[c as usize] = next;
                next += 1;
            }
            map[c as usize]
        })
        .collect()
}

/// Every lemma checker, the `a_3` bound and agreement of the two closedness tests on
/// every color set, over the chosen universe; plus closedness agreement of the
/// reference implementations on seeded random `(space, Γ)` probes.
pub fn verify_lemmas(config: &JobConfig) -> Result<VerificationReport, VerifyError> {
    check_range(config, 3)?;
    let start = Instant::now();
    let mut col = Collector::default();
    let applicable: Mutex<BTreeMap<String, u64>> = Mutex::new(BTreeMap::new());
    for n in config.n_min..=config.n_max {
        let done = sweep(config, n, config.mode, &col, &|s| {
            col.check();
            let mut local = BTreeMap::new();
            for report in all_lemma_reports(s) {
                if report.applicable {
                    *local
                        .entry(format!("applicable.{}", report.lemma))
                        .or_insert(0u64) += 1;
                }
                if report.is_violation() {
                    col.violation(Record::new(
                        s,
                        &report.lemma,
                        report.witness.clone().unwrap_or(Value::Null),
                    ));
                }
            }
            if !check_a3_bound(s) {
                col.violation(Record::new(
                    s,
                    "a3_bound",
                    json!({"a2": s.color_count(), "a3": a3_count(s)}),
                ));
            }
            if let Some(g) = ClosednessTables::new(s).first_disagreement() {
                col.violation(Record::new(
                    s,
                    "closedness_tables_disagree",
                    json!({ "gamma": g }),
                ));
            }
            let mut map = applicable.lock().unwrap();
            for (k, v) in local {
                *map.entry(k).or_default() += v;
            }
        })?;
        if !done {
            col.budget_exceeded = true;
            break;
        }
    }
    col.merge_stats(applicable.into_inner().unwrap());
    let agree = closedness_probe(config.samples, config.seed, &col);
    col.add_stat("closedness_probe.samples", config.samples);
    col.add_stat("closedness_probe.closed", agree);
    Ok(col.finish(config.clone(), start))
}

/// Random `(space, Γ)` pairs with `5 ≤ n ≤ 8`; returns how many `Γ` were closed.
fn closedness_probe(samples: u64, seed: u64, col: &Collector) -> u64 {
    let closed = AtomicU64::new(0);
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    (0..chunks).into_par_iter().for_each(|i| {
        let mut rng = chunk_rng(seed ^ 0x636c6f73, i);
        let len = SAMPLE_CHUNK.min(samples - i * SAMPLE_CHUNK);
        let mut local = 0;
        for _ in 0..len {
            let n = rng.gen_range(5..=8);
            let c = rng.gen_range(1..=pair_count(n).min(8));
            let s = random_space_with(&mut rng, n, c).expect("valid arity");
            let bits = rng.gen_range(1u128..1 << c);
            let g = ColorSet::from_bits(bits);
            let by_types = is_closed(&s, g).expect("known colors");
            let by_cliques = is_closed_via_cliques(&s, g).expect("known colors");
            col.check();
            if by_types != by_cliques {
                col.violation(Record::new(
                    &s,
                    "closedness_disagree",
                    json!({ "gamma": g }),
                ));
            }
            local += by_types as u64;
        }
        closed.fetch_add(local, Ordering::Relaxed);
    });
    closed.into_inner()
}

/// Both fusion finders on every space meeting their preconditions, with the
/// contracts re-checked on the fused space, and the full fusion chain.
pub fn verify_fusion(config: &JobConfig) -> Result<VerificationReport, VerifyError> {
    check_range(config, 5)?;
    let start = Instant::now();
    let mut col = Collector::default();
    let counters: [AtomicU64; 4] = Default::default();
    for n in config.n_min..=config.n_max {
        let done = sweep(config, n, config.mode, &col, &|s| {
            col.check();
            check_fusions(s, &col, &counters);
        })?;
        if !done {
            col.budget_exceeded = true;
            break;
        }
    }
    let hex = hexagon();
    match find_reducing_fusion(&hex) {
        Ok(f) if reducing_contract(&hex, &f) => col.add_stat("sentinel.hexagon_reducing", 1),
        other => col.violation(Record::new(
            &hex,
            "sentinel_hexagon",
            json!(format!("{other:?}")),
        )),
    }
    for (i, name) in ["reducing", "matching", "matching_all_distinct", "chains"]
        .iter()
        .enumerate()
    {
        col.add_stat(
            format!("checked.{name}"),
            counters[i].load(Ordering::Relaxed),
        );
    }
    Ok(col.finish(config.clone(), start))
}

fn reducing_contract(space: &ColoredSpace, f: &FusionMap) -> bool {
    let fused = apply_fusion(space, f).expect("finder maps match the space");
    fused.color_count() + 1 == space.color_count() && a3_count(&fused) < a3_count(space)
}

fn matching_contract(space: &ColoredSpace, f: &FusionMap) -> bool {
    let fused = apply_fusion(space, f).expect("finder maps match the space");
    let d2 = space.color_count() - fused.color_count();
    let d3 = a3_count(space) as isize - a3_count(&fused) as isize;
    (1..=2).contains(&d2) && d2 as isize <= d3
}

fn check_fusions(s: &ColoredSpace, col: &Collector, counters: &[AtomicU64; 4]) {
    let a2 = s.color_count();
    let fail = |check: &str, e: FusionError| {
        let detail = match e {
            FusionError::CounterexampleToLemma(r) => serde_json::to_value(*r).unwrap(),
            other => json!(other.to_string()),
        };
        col.violation(Record::new(s, check, detail));
    };
    if a2 >= 2 && s.m2() > 0 {
        counters[0].fetch_add(1, Ordering::Relaxed);
        match find_reducing_fusion(s) {
            Ok(f) if reducing_contract(s, &f) => {}
            Ok(f) => col.violation(Record::new(s, "reducing_contract", json!({"map": f}))),
            Err(e) => fail("reducing_fusion", e),
        }
    }
    if s.m2() == 0 && a2 >= 2 {
        let slot = if a2 < pair_count(s.n()) { 1 } else { 2 };
        counters[slot].fetch_add(1, Ordering::Relaxed);
        match find_matching_fusion(s) {
            Ok(f) if matching_contract(s, &f) => {}
            Ok(f) => col.violation(Record::new(s, "matching_contract", json!({"map": f}))),
            Err(e) => fail("matching_fusion", e),
        }
    }
    counters[3].fetch_add(1, Ordering::Relaxed);
    match fusion_chain(s) {
        Ok(chain) if chain.a2_le_a3_throughout() => {}
        Ok(chain) => col.violation(Record::new(
            s,
            "chain_a2_le_a3",
            serde_json::to_value(&chain).unwrap(),
        )),
        Err(e) => fail("fusion_chain", e),
    }
}

/// Canonical keys against brute force: isometry keys on random subset pairs
/// (`n ≤ 8`, `k ≤ 5`) and isomorphism keys on random space pairs (`n ≤ 6`), half of
/// them relabeled copies.
pub fn cross_check_keys(config: &JobConfig) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let col = Collector::default();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (mut iso_pos, mut iso_neg) = (0u64, 0u64);
    for _ in 0..config.samples {
        let n = rng.gen_range(3..=8);
        let c = rng.gen_range(1..=pair_count(n).min(4));
        let s = random_space_with(&mut rng, n, c)?;
        let k = rng.gen_range(1..=n.min(5));
        let mut points: Vec<usize> = (0..n).collect();
        points.shuffle(&mut rng);
        let y = points[..k].to_vec();
        points.shuffle(&mut rng);
        let z = points[..k].to_vec();
        let by_key = isometry_key(&s, &y)? == isometry_key(&s, &z)?;
        let by_search = isometric(&s, &y, &z)?;
        col.check();
        if by_search {
            iso_pos += 1;
        } else {
            iso_neg += 1;
        }
        if by_key != by_search {
            col.violation(Record::new(
                &s,
                "isometry_key_disagrees",
                json!({"y": y, "z": z, "key_equal": by_key, "brute_force": by_search}),
            ));
        }
    }
    let (mut morph_pos, mut morph_neg) = (0u64, 0u64);
    for i in 0..config.space_pairs {
        let n = rng.gen_range(2..=6);
        let c = rng.gen_range(1..=pair_count(n).min(5));
        let a = random_space_with(&mut rng, n, c)?;
        let b = if i % 2 == 0 {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let mut names: Vec<u8> = (0..c as u8).collect();
            names.shuffle(&mut rng);
            a.permute_points(&perm).rename_colors(&names)
        } else {
            random_space_with(&mut rng, n, c)?
        };
        let by_key = isomorphism_key(&a) == isomorphism_key(&b);
        let by_search = isomorphic_brute_force(&a, &b);
        col.check();
        if by_search {
            morph_pos += 1;
        } else {
            morph_neg += 1;
        }
        if by_key != by_search || (i % 2 == 0 && !by_search) {
            col.violation(Record::new(
                &a,
                "isomorphism_key_disagrees",
                json!({"other": to_text(&b), "key_equal": by_key, "brute_force": by_search}),
            ));
        }
    }
    for n in 2..=6 {
        col.check();
        let (r, m) = (rainbow(n), monochromatic(n));
        let distinct = n == 2 || isomorphism_key(&r) != isomorphism_key(&m);
        if !distinct {
            col.violation(Record::new(
                &r,
                "rainbow_equals_monochromatic",
                json!({ "n": n }),
            ));
        }
    }
    col.add_stat("subset_pairs.isometric", iso_pos);
    col.add_stat("subset_pairs.not_isometric", iso_neg);
    col.add_stat("space_pairs.isomorphic", morph_pos);
    col.add_stat("space_pairs.not_isomorphic", morph_neg);
    col.universe(UniverseEntry {
        n: 8,
        mode: Mode::Sampled,
        description: format!(
            "{} subset pairs, {} space pairs",
            config.samples, config.space_pairs
        ),
        predicted: Some(config.samples + config.space_pairs),
        covered: iso_pos + iso_neg + morph_pos + morph_neg,
    });
    Ok(col.finish(config.clone(), start))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn job_names_round_trip() {
        for job in Job::ALL {
            assert_eq!(job.id().parse::<Job>().unwrap(), job);
        }
        assert_eq!("a2le3".parse::<Job>().unwrap(), Job::A2LeA3);
        assert!("nope".parse::<Job>().is_err());
    }

    #[test]
    fn fingerprint_tracks_config() {
        let a = JobConfig::new(Job::A2LeA3, 5, 5, Mode::Full);
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
        assert_ne!(a.fingerprint(), a.clone().seed(1).fingerprint());
        assert_eq!(a.fingerprint().len(), 16);
    }

    #[test]
    fn small_a2_le_a3_finds_rainbow() {
        let report = verify_a2_le_a3(&JobConfig::new(Job::A2LeA3, 3, 4, Mode::Full)).unwrap();
        assert!(report.passed(), "{}", report.summary_table());
        assert_eq!(report.checked, 5 + 203);
        let rainbow_key = isomorphism_key(&rainbow(4)).to_hex();
        assert!(report.findings.iter().any(|r| r.key == rainbow_key));
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = JobConfig::new(Job::A2LeA3, 6, 6, Mode::Sampled)
            .samples(2000)
            .seed(7);
        let a = verify_a2_le_a3(&cfg).unwrap();
        let b = verify_a2_le_a3(&cfg).unwrap();
        assert!(a.passed());
        assert_eq!(a.checked, 2000);
        assert_eq!((a.stats, a.violations), (b.stats, b.violations));
    }

    #[test]
    fn keys_cross_check_small() {
        let mut cfg = JobConfig::new(Job::CrossCheckKeys, 3, 8, Mode::Sampled).samples(300);
        cfg.space_pairs = 60;
        let report = cross_check_keys(&cfg).unwrap();
        assert!(report.passed(), "{}", report.summary_table());
        assert!(report.stats["subset_pairs.isometric"] > 0);
        assert!(report.stats["space_pairs.isomorphic"] >= 30);
    }

    #[test]
    fn classification_small_sizes() {
        let cfg = JobConfig::new(Job::Classification, 5, 7, Mode::Constrained).samples(200);
        let report = verify_classification(&cfg).unwrap();
        assert!(report.passed(), "{}", report.summary_table());
        assert!(!report.downgraded);
    }

    #[test]
    fn perturbation_keeps_valid_spaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let base = family_edge_apex(9);
        for _ in 0..50 {
            let s = perturb(&base, &mut rng);
            assert_eq!(s.n(), 9);
        }
    }
}

//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion; exits nonzero if any
//! criterion fails. Time limits are fixed below.

use std::time::{Duration, Instant};

use colored_spaces::enumerate::{enumerate_spaces, Budget, EnumerationConstraints};
use colored_spaces::examples::{
    bipartite_matchings_8, family_edge_apex, four_two_split_6, hexagon, monochromatic, octahedron,
    rainbow, triangles_cross_matchings_6, triangles_single_edge_6,
};
use colored_spaces::format::to_text;
use colored_spaces::isometry::{a3_count, a3_set_of, subsets};
use colored_spaces::structure::check_lemma_m0;
use colored_spaces::verify::{run_job, Job, JobConfig, Mode, VerificationReport};
use colored_spaces::{
    isometric_sequence, isomorphism_key, Color, ColoredSpace, TriangleType, TriangleTypeSet,
};

/// Class count at 4 points from the brute-force dedup of all 203 colorings.
const CLASSES_AT_4: usize = 25;
const CLASSES_AT_3: usize = 3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    if elapsed > limit {
        o.pass = false;
        o.detail.push_str(&format!("; over time limit {limit:?}"));
    }
    let tag = if o.pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {name}: {} ({:.2?})", o.detail, elapsed);
    o.pass
}

fn job(cfg: JobConfig) -> VerificationReport {
    run_job(&cfg).unwrap_or_else(|e| panic!("{} failed to run: {e}", cfg.job))
}

fn short(r: &VerificationReport) -> String {
    let universe: Vec<String> = r
        .universe
        .iter()
        .map(|u| format!("n={} {} {}", u.n, u.mode, u.covered))
        .collect();
    format!(
        "{} checked {}, {} violations [{}]",
        r.job_id,
        r.checked,
        r.violations_total,
        universe.join(", ")
    )
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn types(list: &[[u8; 3]]) -> TriangleTypeSet {
    list.iter()
        .map(|&[a, b, c]| TriangleType::new(Color(a), Color(b), Color(c)))
        .collect()
}

/// Every `W` with `|W| ≥ min_size` passing `qualifies` must have `A_3(W) = expected`.
fn example_claim(
    name: &str,
    space: &ColoredSpace,
    min_size: usize,
    qualifies: impl Fn(&[usize]) -> bool,
    expected: &TriangleTypeSet,
) -> (bool, String) {
    let n = space.n();
    let (mut checked, mut failures) = (0, Vec::new());
    for k in min_size..=n {
        for w in subsets(n, k) {
            if !qualifies(&w) {
                continue;
            }
            checked += 1;
            let got = a3_set_of(space, &w).expect("valid subset");
            if got != *expected {
                failures.push(format!("W={w:?} gives {got:?}"));
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("{name}: {checked} subsets match")
    } else {
        format!(
            "{name}: {} of {checked} subsets differ: {}",
            failures.len(),
            failures.join("; ")
        )
    };
    (failures.is_empty() && checked > 0, detail)
}

fn main() {
    let mut all = true;

    all &= timed(
        "named sequences of the octahedron and hexagon",
        Duration::from_secs(1),
        || {
            let o = isometric_sequence(&octahedron());
            let h = isometric_sequence(&hexagon());
            let pass = o.values() == [1, 2, 2, 2, 1, 1] && h.values() == [1, 3, 3, 3, 1, 1];
            outcome(pass, format!("octahedron {o}, hexagon {h}"))
        },
    );

    all &= timed(
        "monochromatic and rainbow extremes for n = 4..8",
        Duration::from_secs(10),
        || {
            let mut bad = Vec::new();
            for n in 4..=8 {
                let mono = isometric_sequence(&monochromatic(n));
                if mono.values().iter().any(|&a| a != 1) {
                    bad.push(format!("monochromatic({n}) = {mono}"));
                }
                let mut expected: Vec<usize> = (1..=n).map(|k| binomial(n, k)).collect();
                expected[0] = 1;
                let rb = isometric_sequence(&rainbow(n));
                if rb.values() != expected.as_slice() {
                    bad.push(format!("rainbow({n}) = {rb}"));
                }
            }
            outcome(
                bad.is_empty(),
                if bad.is_empty() {
                    "all exact".into()
                } else {
                    bad.join("; ")
                },
            )
        },
    );

    all &= timed(
        "a_2 <= a_3 is tight at 4 points and holds on all 5-point colorings",
        Duration::from_secs(120),
        || {
            let small = job(JobConfig::new(Job::A2LeA3, 4, 4, Mode::Full));
            let full = job(JobConfig::new(Job::A2LeA3, 5, 5, Mode::Full));
            let rainbow_key = isomorphism_key(&rainbow(4)).to_hex();
            let rainbow_found = small
                .findings
                .iter()
                .any(|r| r.key == rainbow_key && r.detail["a2"] == 6 && r.detail["a3"] == 4);
            let covered =
                |r: &VerificationReport| r.universe.iter().map(|u| u.covered).sum::<u64>();
            let pass = small.passed()
                && covered(&small) == 203
                && small.findings_total > 0
                && rainbow_found
                && full.passed()
                && covered(&full) == 115_975;
            outcome(
                pass,
                format!(
                "n=4: {} colorings with a_2 > a_3, rainbow 6 > 4 found: {rainbow_found}; n=5: {}",
                small.findings_total,
                short(&full)
            ),
            )
        },
    );

    all &= timed(
        "a_2 <= a_3 on 6 points: constrained universe and 10^7 samples",
        Duration::from_secs(1800),
        || {
            let constrained =
                job(JobConfig::new(Job::A2LeA3, 6, 6, Mode::Constrained).max_colors(4));
            let sampled = job(JobConfig::new(Job::A2LeA3, 6, 6, Mode::Sampled)
                .samples(10_000_000)
                .seed(1));
            let pass = constrained.passed() && sampled.passed() && sampled.checked == 10_000_000;
            outcome(
                pass,
                format!("{}; {}", short(&constrained), short(&sampled)),
            )
        },
    );

    all &= timed(
        "lemma suite over the 5-point and constrained 6-point universes",
        Duration::from_secs(600),
        || {
            let five = job(JobConfig::new(Job::Lemmas, 5, 5, Mode::Full).samples(100_000));
            let six = job(JobConfig::new(Job::Lemmas, 6, 6, Mode::Constrained).samples(0));
            let strict = check_lemma_m0(&rainbow(4), 1).expect("k = 1 is valid");
            let strict_ok = strict.applicable
                && strict.holds
                && strict.witness.as_ref().unwrap()["strict"] == true;
            let pass = five.passed()
                && six.passed()
                && strict_ok
                && five.stats["closedness_probe.samples"] == 100_000;
            outcome(
                pass,
                format!(
                    "{}; {}; rainbow(4) k=1 strict branch holds: {strict_ok}",
                    short(&five),
                    short(&six)
                ),
            )
        },
    );

    all &= timed(
        "fusion finders succeed on every 5-point coloring",
        Duration::from_secs(300),
        || {
            let r = job(JobConfig::new(Job::Fusion, 5, 5, Mode::Full));
            let reducing = r.stats["checked.reducing"];
            let matching = r.stats["checked.matching"];
            let pass = r.passed() && reducing > 0 && matching > 0;
            outcome(
                pass,
                format!("{}; reducing {reducing}, matching {matching}", short(&r)),
            )
        },
    );

    all &= timed(
        "classification of a_2 = a_3 = 4 up to 9 points",
        Duration::from_secs(3600),
        || {
            let r = job(JobConfig::new(Job::Classification, 4, 9, Mode::Constrained));
            let at9 = r.stats.get("n9.a2_eq_a3_eq_4").copied().unwrap_or(0);
            let shape = |n: usize, name: &str| {
                r.stats
                    .get(&format!("n{n}.shape.{name}"))
                    .copied()
                    .unwrap_or(0)
            };
            let bound8 = shape(9, "aab,aag,aad,bgd");
            let bound6 = shape(7, "aab,aag,bbg,aad")
                + shape(7, "aab,aag,bbg,abd")
                + shape(7, "aaa,abg,agd,abd");
            let pass = r.passed() && !r.downgraded && at9 > 0 && bound8 == 0 && bound6 == 0;
            outcome(
            pass,
            format!(
                "{}; {at9} classes at n=9 all classified; shape bounded by 8 at n=9: {bound8}; shapes bounded by 6 at n=7: {bound6}; downgraded: {}",
                short(&r),
                r.downgraded
            ),
        )
        },
    );

    all &= timed(
        "stated triangle types of the four constructed spaces",
        Duration::from_secs(60),
        || {
            let y4 = |w: &[usize]| w.iter().filter(|&&p| p < 4).count();
            let y3 = |w: &[usize]| w.iter().filter(|&&p| p < 3).count();
            let claims = [
                example_claim(
                    "bipartite-matchings-8",
                    &bipartite_matchings_8(),
                    4,
                    |w| y4(w) != 2,
                    &types(&[[0, 0, 1], [0, 0, 2], [0, 0, 3], [1, 2, 3]]),
                ),
                example_claim(
                    "four-two-split-6",
                    &four_two_split_6(),
                    5,
                    |w| w.contains(&4) && w.contains(&5),
                    &types(&[[0, 0, 1], [0, 0, 2], [1, 1, 2], [0, 0, 3]]),
                ),
                example_claim(
                    "triangles-single-edge-6",
                    &triangles_single_edge_6(),
                    4,
                    |w| w.contains(&0) && w.contains(&3) && y3(w) != 2,
                    &types(&[[0, 0, 1], [0, 0, 2], [1, 1, 2], [0, 1, 3]]),
                ),
                example_claim(
                    "triangles-cross-matchings-6",
                    &triangles_cross_matchings_6(),
                    4,
                    |w| y3(w) != 2,
                    &types(&[[0, 0, 0], [0, 1, 2], [0, 2, 3], [0, 1, 3]]),
                ),
            ];
            let pass = claims.iter().all(|(ok, _)| *ok);
            outcome(
                pass,
                claims
                    .iter()
                    .map(|(_, d)| d.as_str())
                    .collect::<Vec<_>>()
                    .join(" | "),
            )
        },
    );

    all &= timed(
        "edge-apex family has a_2 = a_3 = 4 for n = 9..12",
        Duration::from_secs(1),
        || {
            let counts: Vec<(usize, usize, usize)> = (9..=12)
                .map(|n| {
                    let s = family_edge_apex(n);
                    (n, s.color_count(), a3_count(&s))
                })
                .collect();
            let pass = counts.iter().all(|&(_, a2, a3)| a2 == 4 && a3 == 4);
            outcome(pass, format!("(n, a_2, a_3) = {counts:?}"))
        },
    );

    all &= timed(
        "canonical keys agree with brute-force search",
        Duration::from_secs(120),
        || {
            let mut cfg = JobConfig::new(Job::CrossCheckKeys, 3, 8, Mode::Sampled)
                .samples(10_000)
                .seed(1);
            cfg.space_pairs = 1000;
            let r = job(cfg);
            let pass = r.passed() && r.checked >= 11_000;
            outcome(
                pass,
                format!(
                    "{}; isometric pairs {}, isomorphic pairs {}",
                    short(&r),
                    r.stats["subset_pairs.isometric"],
                    r.stats["space_pairs.isomorphic"]
                ),
            )
        },
    );

    all &= timed(
        "enumeration class counts and worker-count independence",
        Duration::from_secs(120),
        || {
            let count = |n: usize| {
                enumerate_spaces(
                    &EnumerationConstraints::new(n),
                    Budget::unlimited(),
                    |_, _| {},
                )
                .expect("small enumeration")
                .count as usize
            };
            let (c3, c4) = (count(3), count(4));
            let render = |threads: usize| {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .unwrap();
                pool.install(|| {
                    let mut out = String::new();
                    let c = EnumerationConstraints::new(6).max_colors(3);
                    enumerate_spaces(&c, Budget::unlimited(), |k, s| {
                        out.push_str(&format!("# {k}\n{}", to_text(s)));
                    })
                    .unwrap();
                    let mut sampled = job(JobConfig::new(Job::A2LeA3, 6, 6, Mode::Sampled)
                        .samples(200_000)
                        .seed(3));
                    sampled.elapsed_ms = 0;
                    out.push_str(&sampled.to_json());
                    out
                })
            };
            let (one, four) = (render(1), render(4));
            let pass = c3 == CLASSES_AT_3 && c4 == CLASSES_AT_4 && one == four;
            outcome(
                pass,
                format!(
                    "n=3: {c3}, n=4: {c4}; 1 vs 4 workers byte-identical: {} ({} bytes)",
                    one == four,
                    one.len()
                ),
            )
        },
    );

    if !all {
        std::process::exit(1);
    }
}

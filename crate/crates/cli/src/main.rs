//! `cspace`: isometric sequences, pattern classification, fusions, enumeration and
//! verification jobs for finite colored spaces.
//!
//! Exit codes: 0 success, 2 violations found, 3 budget exceeded, 64 usage error,
//! 65 domain error (bad input, failed precondition).

mod config;

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use colored_spaces::enumerate::{
    enumerate_from, random_space, Checkpoint, EnumerationConstraints, EnumerationError,
};
use colored_spaces::examples::{
    family_edge_apex, family_matchings, family_two_cliques, monochromatic, named, rainbow, NAMED,
};
use colored_spaces::format::{to_json, to_text};
use colored_spaces::fusion::{
    apply_fusion, find_matching_fusion, find_reducing_fusion, fusion_chain, FusionError, FusionMap,
};
use colored_spaces::isometry::a3_count;
use colored_spaces::structure::{all_lemma_reports, classify_patterns};
use colored_spaces::verify::{run_job, Job, JobConfig, Mode};
use colored_spaces::{
    a3_set, isometric_sequence, parse_auto, serialize_space, ColoredSpace, Format,
};
use serde_json::json;

use config::{FileConfig, Overrides, Settings};

const EXIT_USAGE: u8 = 64;
const EXIT_DOMAIN: u8 = 65;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "cspace",
    version,
    about = "Finite colored spaces: sequences, classification, fusion, enumeration, verification"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, env = "CSPACE_FORMAT")]
    format: Option<Format>,
    /// Worker threads (output does not depend on it).
    #[arg(long, global = true, env = "CSPACE_JOBS")]
    jobs: Option<usize>,
    /// Seed for every randomized path.
    #[arg(long, global = true, env = "CSPACE_SEED")]
    seed: Option<u64>,
    /// Directory for reports and checkpoints.
    #[arg(long, global = true, env = "CSPACE_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// TOML file with defaults for the options above.
    #[arg(long, global = true, env = "CSPACE_CONFIG")]
    config: Option<PathBuf>,
    /// Search-node cap for enumeration.
    #[arg(long, global = true, env = "CSPACE_BUDGET_NODES")]
    budget_nodes: Option<u64>,
    /// Wall-clock cap for enumeration, in seconds.
    #[arg(long, global = true, env = "CSPACE_BUDGET_SECS")]
    budget_secs: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Isometric sequence, triangle types and M_k table of a space (`-` for stdin).
    Seq { input: String },
    /// Partition patterns and lemma reports of a space.
    Classify { input: String },
    /// Apply a fusion map, or find one (the finder is chosen from m_2).
    Fuse {
        input: String,
        #[arg(long, conflicts_with = "map", required_unless_present_any = ["map", "chain"])]
        find: bool,
        /// Comma-separated images of colors 0, 1, ...
        #[arg(long)]
        map: Option<FusionMap>,
        /// Print the whole fusion chain as JSON lines.
        #[arg(long, conflicts_with = "map")]
        chain: bool,
    },
    /// Isomorph-free enumeration in canonical-key order.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_colors: Option<usize>,
        #[arg(long)]
        max_a3: Option<usize>,
        #[arg(long)]
        exact_colors: Option<usize>,
        /// Resume from a checkpoint file.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Where to write the checkpoint if the budget runs out.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Run a verification job: a2-le-a3 (alias a2le3), classification, lemmas, fusion, cross-check-keys.
    Verify {
        job: String,
        /// Single point count (sets both ends of the range).
        #[arg(long, conflicts_with_all = ["n_min", "n_max"])]
        n: Option<usize>,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        /// full, constrained or sampled.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        space_pairs: Option<u64>,
        #[arg(long)]
        max_colors: Option<usize>,
    },
    /// Generate a named space or a family member.
    Gen {
        /// A fixed name, or rainbow, monochromatic, edge-apex, matchings, two-cliques, random.
        name: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        colors: Option<usize>,
        /// Matchings as `0-1,2-3;4-5` (`;` separates matchings).
        #[arg(long)]
        matchings: Option<String>,
        /// Clique sizes as `p,q`.
        #[arg(long)]
        parts: Option<String>,
    },
}

/// An error caused by how the command was invoked.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_DOMAIN)
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path).map_err(|e| usage(format!("{e:#}")))?,
        None => FileConfig::default(),
    };
    let settings = config::resolve(
        Overrides {
            format: cli.format,
            jobs: cli.jobs,
            seed: cli.seed,
            out_dir: cli.out_dir,
            budget_nodes: cli.budget_nodes,
            budget_secs: cli.budget_secs,
        },
        file,
    )
    .map_err(|e| usage(format!("{e:#}")))?;
    if let Some(jobs) = settings.jobs {
        if jobs == 0 {
            return Err(usage("--jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()?;
    }
    let mut out = String::new();
    let code = match cli.command {
        Command::Seq { input } => cmd_seq(&read_space(&input)?, &settings, &mut out),
        Command::Classify { input } => cmd_classify(&read_space(&input)?, &settings, &mut out),
        Command::Fuse {
            input,
            find,
            map,
            chain,
        } => cmd_fuse(&read_space(&input)?, find, map, chain, &settings, &mut out)?,
        Command::Enumerate {
            n,
            max_colors,
            max_a3,
            exact_colors,
            resume,
            checkpoint,
        } => {
            let mut c = EnumerationConstraints::new(n);
            c.max_colors = max_colors;
            c.max_a3 = max_a3;
            if let Some(k) = exact_colors {
                c = c.exact_colors(k);
            }
            cmd_enumerate(&c, resume.as_deref(), checkpoint, &settings, &mut out)?
        }
        Command::Verify {
            job,
            n,
            n_min,
            n_max,
            mode,
            samples,
            space_pairs,
            max_colors,
        } => {
            let job: Job = job.parse().map_err(|e| usage(format!("{e}")))?;
            let (lo, hi, default_mode) = default_range(job);
            let (n_min, n_max) = match n {
                Some(n) => (n, n),
                None => (n_min.unwrap_or(lo), n_max.unwrap_or(hi)),
            };
            let mode = match mode {
                Some(m) => m.parse::<Mode>().map_err(|e| usage(format!("{e}")))?,
                None => default_mode,
            };
            let mut cfg = JobConfig::new(job, n_min, n_max, mode).seed(settings.seed);
            if let Some(s) = samples {
                cfg.samples = s;
            }
            if let Some(s) = space_pairs {
                cfg.space_pairs = s;
            }
            if let Some(c) = max_colors {
                cfg.max_colors = c;
            }
            cfg.budget_nodes = settings.budget_nodes;
            cfg.budget_secs = settings.budget_secs;
            cmd_verify(&cfg, &settings, &mut out)?
        }
        Command::Gen {
            name,
            n,
            colors,
            matchings,
            parts,
        } => {
            let space = generate(
                &name,
                n,
                colors,
                matchings.as_deref(),
                parts.as_deref(),
                settings.seed,
            )?;
            out.push_str(&serialize_space(&space, settings.format));
            if settings.format == Format::Json {
                out.push('\n');
            }
            0
        }
    };
    std::io::stdout().write_all(out.as_bytes())?;
    Ok(code)
}

fn default_range(job: Job) -> (usize, usize, Mode) {
    match job {
        Job::A2LeA3 | Job::Lemmas | Job::Fusion => (5, 5, Mode::Full),
        Job::Classification => (4, 9, Mode::Constrained),
        Job::CrossCheckKeys => (3, 8, Mode::Sampled),
    }
}

fn read_space(input: &str) -> anyhow::Result<ColoredSpace> {
    let text = if input == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        s
    } else {
        std::fs::read_to_string(input).with_context(|| format!("reading {input}"))?
    };
    let name = if input == "-" { "<stdin>" } else { input };
    parse_auto(&text).map_err(|e| match e {
        colored_spaces::ParseError::Syntax { .. } => anyhow!("{name}: syntax error at {e}"),
        other => anyhow!("{name}: {other}"),
    })
}

fn types_text(space: &ColoredSpace) -> String {
    a3_set(space)
        .map(|t| {
            t.iter()
                .map(|t| format!("{t:?}"))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .unwrap_or_default()
}

fn cmd_seq(space: &ColoredSpace, settings: &Settings, out: &mut String) -> u8 {
    let seq = isometric_sequence(space);
    let m: Vec<_> = (1..space.n())
        .map(|k| {
            let (set, count) = space.m_stats(k).expect("k is a valid degree");
            (k, set, count)
        })
        .collect();
    match settings.format {
        Format::Text => {
            let _ = writeln!(out, "n {}", space.n());
            let _ = writeln!(out, "colors {}", space.color_count());
            let _ = writeln!(out, "sequence {seq}");
            let _ = writeln!(out, "unimodal {}", seq.is_unimodal());
            let _ = writeln!(out, "a3 {}", types_text(space));
            for (k, set, count) in m {
                let colors: Vec<String> = set.iter().map(|c| c.to_string()).collect();
                let _ = writeln!(out, "m{k} {count} {{{}}}", colors.join(","));
            }
        }
        Format::Json => {
            let doc = json!({
                "n": space.n(),
                "colors": space.color_count(),
                "sequence": seq.values(),
                "unimodal": seq.is_unimodal(),
                "a3": a3_set(space).ok(),
                "m": m.iter().map(|(k, set, count)| json!({"k": k, "count": count, "colors": set})).collect::<Vec<_>>(),
            });
            let _ = writeln!(out, "{doc}");
        }
    }
    0
}

fn cmd_classify(space: &ColoredSpace, settings: &Settings, out: &mut String) -> u8 {
    let patterns = classify_patterns(space);
    let lemmas = all_lemma_reports(space);
    let (a2, a3) = (space.color_count(), a3_count(space));
    match settings.format {
        Format::Text => {
            let _ = writeln!(out, "a2 {a2}");
            let _ = writeln!(out, "a3 {a3}");
            let _ = writeln!(out, "types {}", types_text(space));
            if patterns.is_empty() {
                let _ = writeln!(out, "pattern none");
            }
            for p in &patterns {
                let _ = writeln!(
                    out,
                    "pattern {} {}",
                    p.label(),
                    serde_json::to_string(p).unwrap()
                );
            }
            for r in lemmas.iter().filter(|r| r.applicable) {
                let verdict = if r.holds { "holds" } else { "VIOLATED" };
                let _ = writeln!(out, "lemma {} {verdict}", r.lemma);
            }
        }
        Format::Json => {
            let doc = json!({"a2": a2, "a3": a3, "a3_set": a3_set(space).ok(), "patterns": patterns, "lemmas": lemmas});
            let _ = writeln!(out, "{doc}");
        }
    }
    0
}

fn cmd_fuse(
    space: &ColoredSpace,
    find: bool,
    map: Option<FusionMap>,
    chain: bool,
    settings: &Settings,
    out: &mut String,
) -> anyhow::Result<u8> {
    if chain {
        let chain = fusion_chain(space).map_err(fusion_failure)?;
        for step in &chain.steps {
            let _ = writeln!(out, "{}", step.to_json_line());
        }
        let _ = writeln!(out, "{}", json!({"start": chain.start, "end": chain.end}));
        return Ok(0);
    }
    let (finder, map) = match (find, map) {
        (_, Some(map)) => ("given", map),
        (true, None) if space.m2() > 0 => (
            "reducing",
            find_reducing_fusion(space).map_err(fusion_failure)?,
        ),
        (true, None) => (
            "matching",
            find_matching_fusion(space).map_err(fusion_failure)?,
        ),
        (false, None) => return Err(usage("give --find, --map or --chain")),
    };
    let fused = apply_fusion(space, &map).map_err(fusion_failure)?;
    let before = (space.color_count(), a3_count(space));
    let after = (fused.color_count(), a3_count(&fused));
    match settings.format {
        Format::Text => {
            let _ = writeln!(out, "# finder {finder}");
            let _ = writeln!(out, "# map {map}");
            let _ = writeln!(out, "# a2 {} -> {}", before.0, after.0);
            let _ = writeln!(out, "# a3 {} -> {}", before.1, after.1);
            out.push_str(&to_text(&fused));
        }
        Format::Json => {
            let space_doc: serde_json::Value = serde_json::from_str(&to_json(&fused))?;
            let doc = json!({
                "finder": finder,
                "map": map,
                "before": {"a2": before.0, "a3": before.1},
                "after": {"a2": after.0, "a3": after.1},
                "space": space_doc,
            });
            let _ = writeln!(out, "{doc}");
        }
    }
    Ok(0)
}

fn fusion_failure(e: FusionError) -> anyhow::Error {
    match e {
        FusionError::CounterexampleToLemma(report) => {
            anyhow!(
                "{}\n{}",
                FusionError::CounterexampleToLemma(report.clone()),
                serde_json::to_string(&report).unwrap()
            )
        }
        other => anyhow!(other),
    }
}

fn cmd_enumerate(
    constraints: &EnumerationConstraints,
    resume: Option<&Path>,
    checkpoint_path: Option<PathBuf>,
    settings: &Settings,
    out: &mut String,
) -> anyhow::Result<u8> {
    let resume = match resume {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Some(Checkpoint::from_json(&text)?)
        }
        None => None,
    };
    let result = enumerate_from(
        constraints,
        settings.budget(),
        resume.as_ref(),
        |key, space| match settings.format {
            Format::Text => {
                let _ = writeln!(out, "# {key}");
                out.push_str(&to_text(space));
            }
            Format::Json => {
                let _ = writeln!(out, "{{\"key\":\"{key}\",\"space\":{}}}", to_json(space));
            }
        },
    );
    match result {
        Ok(summary) => {
            eprintln!(
                "classes {}  level sizes {:?}  nodes {}  elapsed {} ms",
                summary.count, summary.level_sizes, summary.nodes, summary.elapsed_ms
            );
            Ok(0)
        }
        Err(EnumerationError::BudgetExceeded { level, checkpoint }) => {
            let path = checkpoint_path.or_else(|| {
                settings
                    .out_dir
                    .as_ref()
                    .map(|d| d.join("enumerate-checkpoint.json"))
            });
            match path {
                Some(path) => {
                    write_file(&path, &checkpoint.to_json())?;
                    eprintln!(
                        "budget exceeded at level {level}; checkpoint written to {}",
                        path.display()
                    );
                }
                None => {
                    eprintln!("budget exceeded at level {level}; checkpoint follows");
                    eprintln!("{}", checkpoint.to_json());
                }
            }
            Ok(EXIT_BUDGET)
        }
        Err(e @ (EnumerationError::BadTarget(_) | EnumerationError::BadColorCap)) => {
            Err(usage(e.to_string()))
        }
        Err(e) => Err(e.into()),
    }
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn cmd_verify(cfg: &JobConfig, settings: &Settings, out: &mut String) -> anyhow::Result<u8> {
    use colored_spaces::verify::VerifyError;
    let report = run_job(cfg).map_err(|e| match e {
        VerifyError::BadRange(_) | VerifyError::UnknownJob(_) | VerifyError::UnknownMode(_) => {
            usage(e.to_string())
        }
        other => anyhow!(other),
    })?;
    if let Some(dir) = &settings.out_dir {
        let path = dir.join(report.file_name());
        write_file(&path, &report.to_json())?;
        eprintln!("report written to {}", path.display());
    }
    match settings.format {
        Format::Text => out.push_str(&report.summary_table()),
        Format::Json => {
            out.push_str(&report.to_json());
            out.push('\n');
        }
    }
    Ok(report.exit_code() as u8)
}

fn parse_matchings(spec: &str) -> anyhow::Result<Vec<Vec<(usize, usize)>>> {
    spec.split(';')
        .filter(|m| !m.trim().is_empty())
        .map(|m| {
            m.split(',')
                .map(|pair| {
                    let (a, b) = pair
                        .trim()
                        .split_once('-')
                        .ok_or_else(|| usage(format!("bad pair {pair:?}, expected a-b")))?;
                    let a = a
                        .trim()
                        .parse()
                        .map_err(|_| usage(format!("bad point {a:?}")))?;
                    let b = b
                        .trim()
                        .parse()
                        .map_err(|_| usage(format!("bad point {b:?}")))?;
                    Ok((a, b))
                })
                .collect()
        })
        .collect()
}

fn generate(
    name: &str,
    n: Option<usize>,
    colors: Option<usize>,
    matchings: Option<&str>,
    parts: Option<&str>,
    seed: u64,
) -> anyhow::Result<ColoredSpace> {
    if let Some(space) = named(name) {
        return Ok(space);
    }
    let need_n = |min: usize| -> anyhow::Result<usize> {
        let n = n.ok_or_else(|| usage(format!("{name} needs --n")))?;
        if !(min..=colored_spaces::MAX_POINTS).contains(&n) {
            return Err(usage(format!(
                "--n must be in {min}..={}",
                colored_spaces::MAX_POINTS
            )));
        }
        Ok(n)
    };
    let matchings = matchings
        .map(parse_matchings)
        .transpose()?
        .unwrap_or_default();
    Ok(match name {
        "rainbow" => rainbow(need_n(2)?),
        "monochromatic" => monochromatic(need_n(2)?),
        "edge-apex" => family_edge_apex(need_n(4)?),
        "matchings" => family_matchings(need_n(2)?, &matchings)?,
        "two-cliques" => {
            let parts = parts.ok_or_else(|| usage("two-cliques needs --parts p,q"))?;
            let (p, q) = parts.split_once(',').ok_or_else(|| usage("--parts expects p,q"))?;
            let p = p.trim().parse().map_err(|_| usage("bad --parts"))?;
            let q = q.trim().parse().map_err(|_| usage("bad --parts"))?;
            family_two_cliques((p, q), &matchings)?
        }
        "random" => {
            let n = need_n(2)?;
            let c = colors.ok_or_else(|| usage("random needs --colors"))?;
            random_space(n, c, seed)?
        }
        other => bail!(UsageError(format!(
            "unknown space {other:?}; known: {}, rainbow, monochromatic, edge-apex, matchings, two-cliques, random",
            NAMED.join(", ")
        ))),
    })
}

//! Settings shared by all subcommands: flags, `CSPACE_*` environment variables and an
//! optional TOML file, in that order of precedence.

use std::path::{Path, PathBuf};

use anyhow::Context;
use colored_spaces::enumerate::Budget;
use colored_spaces::Format;
use serde::Deserialize;

/// Keys accepted in the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<String>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub budget_nodes: Option<u64>,
    pub budget_secs: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub format: Format,
    pub jobs: Option<usize>,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub budget_nodes: Option<u64>,
    pub budget_secs: Option<u64>,
}

impl Settings {
    pub fn budget(&self) -> Budget {
        Budget {
            max_nodes: self.budget_nodes,
            max_time: self.budget_secs.map(std::time::Duration::from_secs),
        }
    }
}

/// Values given on the command line (or through the environment).
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub budget_nodes: Option<u64>,
    pub budget_secs: Option<u64>,
}

pub fn resolve(flags: Overrides, file: FileConfig) -> anyhow::Result<Settings> {
    let file_format = match file.format {
        Some(f) => Some(f.parse::<Format>().map_err(anyhow::Error::msg)?),
        None => None,
    };
    Ok(Settings {
        format: flags.format.or(file_format).unwrap_or(Format::Text),
        jobs: flags.jobs.or(file.jobs),
        seed: flags.seed.or(file.seed).unwrap_or(0),
        out_dir: flags.out_dir.or(file.out_dir),
        budget_nodes: flags.budget_nodes.or(file.budget_nodes),
        budget_secs: flags.budget_secs.or(file.budget_secs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str("format = \"json\"\nseed = 5\njobs = 2\n").unwrap();
        let flags = Overrides {
            seed: Some(9),
            ..Default::default()
        };
        let s = resolve(flags, file).unwrap();
        assert_eq!(s.format, Format::Json);
        assert_eq!(s.seed, 9);
        assert_eq!(s.jobs, Some(2));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("colour = 1\n").is_err());
    }
}

//! Run configuration: command-line flags layered over an optional TOML file.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use causex::ExpansionConfig;
use serde::Deserialize;

/// Settings accepted in a `--config` file. Every field is optional; flags
/// given on the command line take precedence.
///
/// ```toml
/// lexicon = "data/triggers.tsv"
/// rules = "data/rules.txt"
/// inputs = ["parsed/"]
/// output = "out/triplets.jsonl"
/// strict = false
/// jobs = 4
///
/// [expansion]
/// excluded_deps = ["punct", "appos", "advcl"]
/// clamp_at_trigger = true
/// uncertainty_words = ["may", "might", "would", "could"]
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub lexicon: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    #[serde(default)]
    pub inputs: Vec<PathBuf>,
    pub output: Option<PathBuf>,
    pub strict: Option<bool>,
    pub jobs: Option<usize>,
    #[serde(default)]
    pub expansion: ExpansionFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionFile {
    pub excluded_deps: Option<Vec<String>>,
    pub clamp_at_trigger: Option<bool>,
    pub uncertainty_words: Option<Vec<String>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let mut cfg: FileConfig = toml::from_str(&text)
            .with_context(|| format!("invalid config file {}", path.display()))?;
        // relative paths in the file are relative to the file
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.lexicon.as_mut().map(rebase);
        cfg.rules.as_mut().map(rebase);
        cfg.output.as_mut().map(rebase);
        cfg.inputs.iter_mut().for_each(rebase);
        Ok(cfg)
    }
}

/// Values given on the command line for `extract`.
#[derive(Debug, Default, Clone)]
pub struct FlagConfig {
    pub lexicon: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub inputs: Vec<PathBuf>,
    pub output: Option<PathBuf>,
    pub exclude_deps: Option<Vec<String>>,
    pub uncertainty_words: Option<Vec<String>>,
    pub no_clamp: bool,
    pub strict: bool,
    pub jobs: Option<usize>,
}

/// Fully resolved settings for an extraction run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `None` means the lexicon compiled into the library.
    pub lexicon_path: Option<PathBuf>,
    pub rules_path: Option<PathBuf>,
    pub expansion: ExpansionConfig,
    pub inputs: Vec<PathBuf>,
    pub output: PathBuf,
    pub strict_ingest: bool,
    /// Worker threads; 0 lets the pool pick.
    pub jobs: usize,
}

fn lowered(xs: Vec<String>) -> BTreeSet<String> {
    xs.into_iter()
        .map(|x| x.trim().to_lowercase())
        .filter(|x| !x.is_empty())
        .collect()
}

impl RunConfig {
    /// Merges flags over the file and checks that every referenced input
    /// exists.
    pub fn resolve(flags: FlagConfig, file: FileConfig) -> Result<Self> {
        let mut expansion = ExpansionConfig::default();
        if let Some(deps) = flags.exclude_deps.or(file.expansion.excluded_deps) {
            expansion.excluded_deps = lowered(deps);
        }
        if let Some(words) = flags.uncertainty_words.or(file.expansion.uncertainty_words) {
            expansion.uncertainty_words = lowered(words);
        }
        if flags.no_clamp {
            expansion.clamp_at_trigger = false;
        } else if let Some(clamp) = file.expansion.clamp_at_trigger {
            expansion.clamp_at_trigger = clamp;
        }

        let inputs = if flags.inputs.is_empty() {
            file.inputs
        } else {
            flags.inputs
        };
        if inputs.is_empty() {
            bail!("no input given; pass --input or set `inputs` in the config file");
        }
        let Some(output) = flags.output.or(file.output) else {
            bail!("no output given; pass --output or set `output` in the config file");
        };

        let cfg = RunConfig {
            lexicon_path: flags.lexicon.or(file.lexicon),
            rules_path: flags.rules.or(file.rules),
            expansion,
            inputs,
            output,
            strict_ingest: flags.strict || file.strict.unwrap_or(false),
            jobs: flags.jobs.or(file.jobs).unwrap_or(0),
        };
        cfg.check_paths()?;
        Ok(cfg)
    }

    fn check_paths(&self) -> Result<()> {
        let named = [("lexicon", &self.lexicon_path), ("rules", &self.rules_path)];
        for (what, path) in named {
            if let Some(p) = path {
                if !p.is_file() {
                    bail!("{what} file not found: {}", p.display());
                }
            }
        }
        for p in &self.inputs {
            if !p.exists() {
                bail!("input not found: {}", p.display());
            }
        }
        Ok(())
    }
}

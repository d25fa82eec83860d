//! Command-line front end for `causex`.

pub mod commands;
pub mod config;
pub mod sidecar;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "causex",
    version,
    about = "Cause-effect triplet extraction from CoNLL-U parses"
)]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract triplets from CoNLL-U files into JSONL.
    Extract(ExtractArgs),
    /// Score predictions against gold predications (precision, recall, F1).
    Evaluate(EvaluateArgs),
    /// Print per-rule coverage recorded by earlier extraction runs.
    RuleStats(RuleStatsArgs),
    /// Aggregate 0/1/2 expert scores into strict and lenient precision.
    Score(ScoreArgs),
    /// Keep triplets from sentences with no causal knowledge-base entry.
    Novel(NovelArgs),
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// TOML file with default settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Trigger lexicon (TSV); defaults to the shipped lexicon.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Rule file; defaults to the shipped decision list.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// CoNLL-U file, or a directory of `.conllu` files. Repeatable.
    #[arg(long = "input", short)]
    pub inputs: Vec<PathBuf>,
    /// JSONL destination; coverage goes to `<output>.coverage.json`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Comma-separated dependency labels cut from phrases.
    #[arg(long, value_delimiter = ',')]
    pub exclude_deps: Option<Vec<String>>,
    /// Comma-separated auxiliaries that mark uncertainty.
    #[arg(long, value_delimiter = ',')]
    pub uncertainty_words: Option<Vec<String>>,
    /// Keep the part of a phrase beyond the trigger.
    #[arg(long)]
    pub no_clamp: bool,
    /// Fail on the first malformed sentence instead of skipping it.
    #[arg(long)]
    pub strict: bool,
    /// Worker threads (default: one per core).
    #[arg(long, short)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Predicted triplets (JSONL).
    #[arg(long, short)]
    pub input: PathBuf,
    /// Gold predications (TSV: sent_id, predicate, subject, object[, CUIs]).
    #[arg(long)]
    pub gold: PathBuf,
    /// Comma-separated predicates counted as causal.
    #[arg(long, value_delimiter = ',')]
    pub predicates: Option<Vec<String>>,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RuleStatsArgs {
    /// Extraction output or its coverage file. Repeatable with --merge.
    #[arg(long = "input", short, required = true)]
    pub inputs: Vec<PathBuf>,
    /// Sum counts over several runs.
    #[arg(long)]
    pub merge: bool,
    /// Print rows as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Scores file: `<triplet line>\t<0|1|2>` per line.
    #[arg(long)]
    pub scores: PathBuf,
}

#[derive(Debug, Args)]
pub struct NovelArgs {
    /// Extracted triplets (JSONL).
    #[arg(long, short)]
    pub input: PathBuf,
    /// Sentence ids that already have a causal predication, one per line.
    #[arg(long)]
    pub kb_sentences: PathBuf,
    /// Where to write the novel triplets (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Extract(a) => commands::extract(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::RuleStats(a) => commands::rule_stats(a),
        Command::Score(a) => commands::score(a),
        Command::Novel(a) => commands::novel(a),
    }
}

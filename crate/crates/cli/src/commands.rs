//! Subcommand implementations.

use std::collections::{BTreeSet, HashSet};
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use causex::conllu::ReadOptions;
use causex::eval::{default_causal_predicates, load_gold, load_scores, triplets_per_rule};
use causex::extract::{read_jsonl, write_jsonl};
use causex::rules::{coverage_report, format_coverage};
use causex::{
    evaluate as score_predictions, kb_novel_triplets, load_rules, parse_conllu,
    strict_lenient_precision, CETriplet, Corpus, Extractor, Lexicon, RuleSet,
};

use crate::config::{FileConfig, FlagConfig, RunConfig};
use crate::sidecar::{sidecar_path, Coverage};
use crate::{EvaluateArgs, ExtractArgs, NovelArgs, RuleStatsArgs, ScoreArgs};

fn read(path: &Path, what: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {what} {}", path.display()))
}

/// Expands directories to the `.conllu` files inside them, sorted by name.
pub fn conllu_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("cannot list {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file() && f.extension().is_some_and(|x| x == "conllu"))
                .collect();
            found.sort();
            if found.is_empty() {
                log::warn!("{}: no .conllu files", p.display());
            }
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Reads every input into one corpus; returns it with the number of
/// sentences skipped as malformed.
pub fn load_corpus(inputs: &[PathBuf], strict: bool) -> Result<(Corpus, usize)> {
    let mut corpus = Corpus::default();
    let mut skipped = 0;
    for path in conllu_files(inputs)? {
        let file = File::open(&path).with_context(|| format!("cannot open {}", path.display()))?;
        let opts = ReadOptions {
            strict,
            default_doc_id: path
                .file_stem()
                .map_or("doc".into(), |s| s.to_string_lossy().into_owned()),
            source_path: path.display().to_string(),
        };
        let (part, diags) = parse_conllu(BufReader::new(file), &opts)
            .with_context(|| format!("cannot parse {}", path.display()))?;
        for d in &diags {
            log::warn!(
                "{}:{}: skipped {}/{}: {}",
                path.display(),
                d.line,
                d.doc_id,
                d.sent_id,
                d.message
            );
        }
        skipped += diags.len();
        corpus.extend(part);
    }
    Ok((corpus, skipped))
}

fn build_extractor(cfg: &RunConfig) -> Result<Extractor> {
    let lexicon = match &cfg.lexicon_path {
        Some(p) => Lexicon::parse(&read(p, "lexicon")?)
            .with_context(|| format!("invalid lexicon {}", p.display()))?,
        None => Lexicon::builtin(),
    };
    let rules = match &cfg.rules_path {
        Some(p) => load_rules(&read(p, "rules file")?)
            .with_context(|| format!("invalid rules file {}", p.display()))?,
        None => RuleSet::builtin(),
    };
    Ok(Extractor::new(lexicon, rules, cfg.expansion.clone()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub fn extract(args: ExtractArgs) -> Result<()> {
    let file = match &args.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let flags = FlagConfig {
        lexicon: args.lexicon,
        rules: args.rules,
        inputs: args.inputs,
        output: args.output,
        exclude_deps: args.exclude_deps,
        uncertainty_words: args.uncertainty_words,
        no_clamp: args.no_clamp,
        strict: args.strict,
        jobs: args.jobs,
    };
    let cfg = RunConfig::resolve(flags, file)?;
    let extractor = build_extractor(&cfg)?;
    let (corpus, skipped) = load_corpus(&cfg.inputs, cfg.strict_ingest)?;
    log::info!(
        "{} sentences in {} documents",
        corpus.sentence_count(),
        corpus.documents.len()
    );

    let (triplets, summary) = extractor.extract_corpus(&corpus, cfg.jobs)?;
    let mut out = create(&cfg.output)?;
    write_jsonl(&mut out, &triplets)
        .and_then(|_| out.flush())
        .with_context(|| format!("cannot write {}", cfg.output.display()))?;
    let coverage = Coverage::from_run(&extractor.rules, summary.clone());
    coverage.save(&sidecar_path(&cfg.output))?;

    eprintln!(
        "sentences {}  skipped {}  triggers {}  triplets {}",
        summary.sentences, skipped, summary.triggers, summary.triplets
    );
    let fired: Vec<_> = coverage_report(&coverage.counts())
        .into_iter()
        .filter(|r| r.count > 0)
        .collect();
    if !fired.is_empty() {
        eprint!("{}", format_coverage(&fired));
    }
    Ok(())
}

fn load_predictions(path: &Path) -> Result<Vec<CETriplet>> {
    read_jsonl(&read(path, "predictions")?)
        .with_context(|| format!("invalid predictions file {}", path.display()))
}

pub fn evaluate(args: EvaluateArgs) -> Result<()> {
    let preds = load_predictions(&args.input)?;
    let gold = load_gold(&read(&args.gold, "gold file")?)
        .with_context(|| format!("invalid gold file {}", args.gold.display()))?;
    let predicates: BTreeSet<String> = match args.predicates {
        Some(ps) => ps
            .iter()
            .map(|p| p.trim().to_uppercase())
            .filter(|p| !p.is_empty())
            .collect(),
        None => default_causal_predicates(),
    };
    if predicates.is_empty() {
        bail!("--predicates is empty");
    }
    let report = score_predictions(&preds, &gold, &predicates);
    if args.json {
        println!("{}", report.to_json());
    } else {
        println!("{report}");
    }
    Ok(())
}

pub fn rule_stats(args: RuleStatsArgs) -> Result<()> {
    if args.inputs.len() > 1 && !args.merge {
        bail!(
            "{} inputs given; pass --merge to sum their counts",
            args.inputs.len()
        );
    }
    let mut merged: Option<Coverage> = None;
    for p in &args.inputs {
        let cov = Coverage::load(&sidecar_path(p))?;
        match merged.as_mut() {
            Some(m) => m.merge(cov)?,
            None => merged = Some(cov),
        }
    }
    let cov = merged.expect("at least one input");
    let rows = coverage_report(&cov.counts());
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
    } else {
        print!("{}", format_coverage(&rows));
    }
    eprintln!(
        "runs {}  sentences {}  triggers {}  triplets {}",
        args.inputs.len(),
        cov.summary.sentences,
        cov.summary.triggers,
        cov.summary.triplets
    );
    Ok(())
}

pub fn score(args: ScoreArgs) -> Result<()> {
    let scores = load_scores(&read(&args.scores, "scores file")?)
        .with_context(|| format!("invalid scores file {}", args.scores.display()))?;
    let (strict, lenient) = strict_lenient_precision(&scores)?;
    println!("triplets           {}", scores.len());
    println!("strict precision   {strict:.4}");
    println!("lenient precision  {lenient:.4}");
    Ok(())
}

pub fn novel(args: NovelArgs) -> Result<()> {
    let triplets = load_predictions(&args.input)?;
    let kb: HashSet<String> = read(&args.kb_sentences, "knowledge-base sentence list")?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect();
    let novel = kb_novel_triplets(&triplets, &kb);
    match &args.output {
        Some(p) => {
            let mut out = create(p)?;
            write_jsonl(&mut out, &novel)
                .and_then(|_| out.flush())
                .with_context(|| format!("cannot write {}", p.display()))?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_jsonl(&mut lock, &novel)?;
            lock.flush()?;
        }
    }
    eprintln!(
        "{} of {} triplets are KB-novel",
        novel.len(),
        triplets.len()
    );
    for (rule, n) in triplets_per_rule(&novel) {
        eprintln!("  {rule:<6} {n}");
    }
    Ok(())
}

//! Phrase expansion, triplet formation and the per-sentence pipeline.

use std::collections::BTreeSet;
use std::io::{self, Write};
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conllu::Corpus;
use crate::features::candidate_pairs;
use crate::lexicon::{Lexicon, TriggerMatch};
use crate::rules::{PairLabel, RuleSet};
use crate::tree::{ParsedSentence, TreeError};

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("phrase head {0} is the trigger itself")]
    HeadIsTrigger(usize),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("could not build worker pool: {0}")]
    Pool(String),
    #[error("line {line}: invalid triplet record: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

/// Phrase expansion and argument settings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionConfig {
    /// Dependency labels whose subtrees are left out of a phrase.
    pub excluded_deps: BTreeSet<String>,
    /// Cut a phrase at the trigger when the trigger lies inside its subtree.
    pub clamp_at_trigger: bool,
    /// Lowercased auxiliaries that mark a relation as uncertain.
    pub uncertainty_words: BTreeSet<String>,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        let set = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect();
        ExpansionConfig {
            excluded_deps: set(&["punct", "appos", "advcl"]),
            clamp_at_trigger: true,
            uncertainty_words: set(&["may", "might", "would", "could"]),
        }
    }
}

/// A cause or effect argument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phrase {
    #[serde(rename = "head_index")]
    pub head: usize,
    /// Sorted token indices; may be non-contiguous.
    #[serde(rename = "indices")]
    pub token_indices: Vec<usize>,
    pub text: String,
    /// Half-open `[first, last + 1)` over `token_indices`.
    pub span: [usize; 2],
}

impl Phrase {
    fn from_indices(s: &ParsedSentence, head: usize, idx: BTreeSet<usize>) -> Phrase {
        let token_indices: Vec<usize> = idx.into_iter().collect();
        let text = token_indices
            .iter()
            .map(|&i| s.tokens()[i].text.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        let span = [token_indices[0], token_indices[token_indices.len() - 1] + 1];
        Phrase {
            head,
            token_indices,
            text,
            span,
        }
    }
}

/// The trigger as written to output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriggerRef {
    pub text: String,
    pub lemma: String,
    pub anchor_index: usize,
    pub span: [usize; 2],
}

impl TriggerRef {
    pub fn new(s: &ParsedSentence, m: &TriggerMatch) -> Self {
        let toks = &s.tokens()[m.span.clone()];
        TriggerRef {
            text: toks
                .iter()
                .map(|t| t.text.as_str())
                .collect::<Vec<_>>()
                .join(" "),
            lemma: toks
                .iter()
                .map(|t| t.lemma_lower())
                .collect::<Vec<_>>()
                .join(" "),
            anchor_index: m.anchor,
            span: [m.span.start, m.span.end],
        }
    }

    pub fn range(&self) -> Range<usize> {
        self.span[0]..self.span[1]
    }
}

/// A single-token argument (negation or uncertainty marker).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marker {
    pub index: usize,
    pub text: String,
}

impl Marker {
    fn at(s: &ParsedSentence, index: usize) -> Self {
        Marker {
            index,
            text: s.tokens()[index].text.clone(),
        }
    }
}

/// A ⟨cause, trigger, effect⟩ triplet with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CETriplet {
    pub doc_id: String,
    pub sent_id: String,
    pub trigger: TriggerRef,
    pub cause: Phrase,
    pub effect: Phrase,
    pub negation: Option<Marker>,
    pub uncertainty: Option<Marker>,
    pub cause_rule_id: String,
    pub effect_rule_id: String,
}

/// Expands `head` to its phrase for a single-token trigger.
pub fn expand_phrase(
    s: &ParsedSentence,
    head: usize,
    trigger: usize,
    cfg: &ExpansionConfig,
) -> Result<Phrase, ExtractError> {
    expand_around(s, head, trigger, trigger..trigger + 1, cfg)
}

/// Subtree of `head` minus excluded relations. When the trigger anchor lies
/// under `head`, everything from the trigger span outward (on the trigger's
/// side of `head`) is dropped.
pub fn expand_around(
    s: &ParsedSentence,
    head: usize,
    anchor: usize,
    span: Range<usize>,
    cfg: &ExpansionConfig,
) -> Result<Phrase, ExtractError> {
    s.token(anchor)?;
    if head == anchor || span.contains(&head) {
        return Err(ExtractError::HeadIsTrigger(head));
    }
    let mut idx = s.subtree(head, &cfg.excluded_deps)?;
    if cfg.clamp_at_trigger && s.is_ancestor(head, anchor)? {
        if anchor > head {
            idx.retain(|&i| i < span.start);
        } else {
            idx.retain(|&i| i >= span.end);
        }
    }
    idx.retain(|i| !span.contains(i));
    Ok(Phrase::from_indices(s, head, idx))
}

/// Cross product of cause and effect heads for one trigger, skipping pairs
/// that share a head. Inputs are deduplicated by head (first rule id kept)
/// and output is ordered by cause head, then effect head. Negation and
/// uncertainty are left unset.
pub fn form_triplets(
    v: &TriggerMatch,
    causes: &[(usize, String)],
    effects: &[(usize, String)],
    s: &ParsedSentence,
    cfg: &ExpansionConfig,
) -> Result<Vec<CETriplet>, ExtractError> {
    let dedup = |xs: &[(usize, String)]| {
        let mut seen = BTreeSet::new();
        let mut out: Vec<(usize, String)> = xs
            .iter()
            .filter(|(h, _)| seen.insert(*h))
            .cloned()
            .collect();
        out.sort_by_key(|(h, _)| *h);
        out
    };
    let (causes, effects) = (dedup(causes), dedup(effects));
    if causes.is_empty() || effects.is_empty() {
        return Ok(Vec::new());
    }
    let trigger = TriggerRef::new(s, v);
    let expand = |h: usize| expand_around(s, h, v.anchor, v.span.clone(), cfg);
    let effect_phrases = effects
        .iter()
        .map(|(h, _)| expand(*h))
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = Vec::new();
    for (c, c_rule) in &causes {
        let cause = expand(*c)?;
        for ((e, e_rule), effect) in effects.iter().zip(&effect_phrases) {
            if c == e {
                continue;
            }
            out.push(CETriplet {
                doc_id: s.doc_id.clone(),
                sent_id: s.sent_id.clone(),
                trigger: trigger.clone(),
                cause: cause.clone(),
                effect: effect.clone(),
                negation: None,
                uncertainty: None,
                cause_rule_id: c_rule.clone(),
                effect_rule_id: e_rule.clone(),
            });
        }
    }
    Ok(out)
}

fn leftmost_child(s: &ParsedSentence, v: usize, pred: impl Fn(usize) -> bool) -> Option<usize> {
    s.children(v)
        .ok()?
        .iter()
        .copied()
        .filter(|&c| pred(c))
        .min()
}

/// Leftmost child of `trigger` attached by `neg`.
pub fn extract_negation(s: &ParsedSentence, trigger: usize) -> Option<usize> {
    leftmost_child(s, trigger, |c| {
        s.tokens()[c].dep.eq_ignore_ascii_case("neg")
    })
}

/// Leftmost `aux` child of `trigger` whose lowercased form is an uncertainty word.
pub fn extract_uncertainty(
    s: &ParsedSentence,
    trigger: usize,
    cfg: &ExpansionConfig,
) -> Option<usize> {
    leftmost_child(s, trigger, |c| {
        let t = &s.tokens()[c];
        t.dep.eq_ignore_ascii_case("aux") && cfg.uncertainty_words.contains(&t.lower)
    })
}

/// Per-sentence result with the trigger count kept for run summaries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SentenceExtraction {
    pub triggers: usize,
    pub triplets: Vec<CETriplet>,
}

/// Runs the full pipeline over one sentence. Triplets are ordered by
/// trigger position, then cause head, then effect head.
pub fn extract_sentence_detailed(
    s: &ParsedSentence,
    lex: &Lexicon,
    rs: &RuleSet,
    cfg: &ExpansionConfig,
) -> Result<SentenceExtraction, ExtractError> {
    let triggers = lex.find_triggers(s);
    let mut triplets = Vec::new();
    for m in &triggers {
        let span: Vec<usize> = m.span.clone().collect();
        let pairs = candidate_pairs(s, m.anchor, &span).map_err(|e| match e {
            crate::features::FeatureError::Tree(t) => ExtractError::Tree(t),
            _ => ExtractError::HeadIsTrigger(m.anchor),
        })?;
        let (mut causes, mut effects) = (Vec::new(), Vec::new());
        for p in pairs {
            match rs.classify(&p.features) {
                PairLabel::Cause(id) => causes.push((p.u, id)),
                PairLabel::Effect(id) => effects.push((p.u, id)),
                PairLabel::Other => {}
            }
        }
        let mut formed = form_triplets(m, &causes, &effects, s, cfg)?;
        let neg = extract_negation(s, m.anchor).map(|i| Marker::at(s, i));
        let unc = extract_uncertainty(s, m.anchor, cfg).map(|i| Marker::at(s, i));
        for t in &mut formed {
            t.negation = neg.clone();
            t.uncertainty = unc.clone();
        }
        triplets.extend(formed);
    }
    Ok(SentenceExtraction {
        triggers: triggers.len(),
        triplets,
    })
}

/// As [`extract_sentence_detailed`], logging failures and yielding no triplets.
pub fn extract_sentence(
    s: &ParsedSentence,
    lex: &Lexicon,
    rs: &RuleSet,
    cfg: &ExpansionConfig,
) -> Vec<CETriplet> {
    match extract_sentence_detailed(s, lex, rs, cfg) {
        Ok(r) => r.triplets,
        Err(e) => {
            log::warn!("{}/{}: extraction failed: {e}", s.doc_id, s.sent_id);
            Vec::new()
        }
    }
}

/// Totals for a corpus run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub sentences: usize,
    pub triggers: usize,
    pub triplets: usize,
}

/// Lexicon, rules and configuration bundled for repeated use.
#[derive(Debug, Clone)]
pub struct Extractor {
    pub lexicon: Lexicon,
    pub rules: RuleSet,
    pub config: ExpansionConfig,
}

impl Extractor {
    pub fn new(lexicon: Lexicon, rules: RuleSet, config: ExpansionConfig) -> Self {
        Extractor {
            lexicon,
            rules,
            config,
        }
    }

    /// Shipped lexicon and rules with default expansion settings.
    pub fn builtin() -> Self {
        Extractor::new(
            Lexicon::builtin(),
            RuleSet::builtin(),
            ExpansionConfig::default(),
        )
    }

    pub fn extract_sentence(&self, s: &ParsedSentence) -> Vec<CETriplet> {
        extract_sentence(s, &self.lexicon, &self.rules, &self.config)
    }

    fn run_one(&self, s: &ParsedSentence) -> SentenceExtraction {
        extract_sentence_detailed(s, &self.lexicon, &self.rules, &self.config).unwrap_or_else(|e| {
            log::warn!("{}/{}: extraction failed: {e}", s.doc_id, s.sent_id);
            SentenceExtraction::default()
        })
    }

    /// Extracts from every sentence using `jobs` worker threads (0 = rayon
    /// default). Output follows corpus order regardless of `jobs`.
    pub fn extract_corpus(
        &self,
        corpus: &Corpus,
        jobs: usize,
    ) -> Result<(Vec<CETriplet>, RunSummary), ExtractError> {
        let sentences: Vec<&ParsedSentence> = corpus.sentences().collect();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| ExtractError::Pool(e.to_string()))?;
        let results: Vec<SentenceExtraction> =
            pool.install(|| sentences.par_iter().map(|s| self.run_one(s)).collect());

        let mut summary = RunSummary {
            sentences: sentences.len(),
            ..RunSummary::default()
        };
        let mut triplets = Vec::new();
        for r in results {
            summary.triggers += r.triggers;
            triplets.extend(r.triplets);
        }
        summary.triplets = triplets.len();
        Ok((triplets, summary))
    }
}

/// Writes one JSON object per line.
pub fn write_jsonl<W: Write>(mut w: W, triplets: &[CETriplet]) -> io::Result<()> {
    for t in triplets {
        serde_json::to_writer(&mut w, t)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn to_jsonl(triplets: &[CETriplet]) -> String {
    let mut buf = Vec::new();
    write_jsonl(&mut buf, triplets).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Parses JSON Lines output; blank lines are ignored.
pub fn read_jsonl(input: &str) -> Result<Vec<CETriplet>, ExtractError> {
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|source| ExtractError::Json {
                line: i + 1,
                source,
            })
        })
        .collect()
}

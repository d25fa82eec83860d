//! Scoring extracted triplets against gold predications and expert scores.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::CETriplet;

/// Predicates counted as causal when filtering gold predications.
pub const CAUSAL_PREDICATES: [&str; 10] = [
    "AFFECTS",
    "CAUSES",
    "STIMULATES",
    "INHIBITS",
    "DISRUPTS",
    "PRODUCES",
    "PRECEDES",
    "COMPLICATES",
    "PREDISPOSES",
    "PREVENTS",
];

/// Words ignored when comparing argument texts: articles, prepositions,
/// conjunctions, pronouns and forms of "be".
pub const STOPWORDS: &[&str] = &[
    // articles
    "a",
    "an",
    "the",
    // prepositions
    "about",
    "above",
    "across",
    "after",
    "against",
    "along",
    "among",
    "around",
    "as",
    "at",
    "before",
    "behind",
    "below",
    "beneath",
    "beside",
    "between",
    "beyond",
    "by",
    "despite",
    "down",
    "during",
    "except",
    "for",
    "from",
    "in",
    "inside",
    "into",
    "like",
    "near",
    "of",
    "off",
    "on",
    "onto",
    "out",
    "outside",
    "over",
    "per",
    "since",
    "than",
    "through",
    "throughout",
    "to",
    "toward",
    "towards",
    "under",
    "underneath",
    "until",
    "unto",
    "up",
    "upon",
    "via",
    "with",
    "within",
    "without",
    // conjunctions
    "and",
    "or",
    "but",
    "nor",
    "so",
    "yet",
    "both",
    "either",
    "neither",
    "whether",
    "if",
    "because",
    "while",
    "whereas",
    "although",
    "though",
    "unless",
    "that",
    // pronouns
    "i",
    "me",
    "my",
    "mine",
    "we",
    "us",
    "our",
    "ours",
    "you",
    "your",
    "yours",
    "he",
    "him",
    "his",
    "she",
    "her",
    "hers",
    "it",
    "its",
    "they",
    "them",
    "their",
    "theirs",
    "this",
    "these",
    "those",
    "who",
    "whom",
    "whose",
    "which",
    "what",
    "itself",
    "themselves",
    // copulas
    "be",
    "is",
    "am",
    "are",
    "was",
    "were",
    "been",
    "being",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("line {line}: expected 4 to 6 tab-separated columns, found {found}")]
    GoldColumns { line: usize, found: usize },
    #[error("line {line}: column `{column}` is empty")]
    EmptyField { line: usize, column: &'static str },
    #[error("sentence id mismatch: prediction `{predicted}` vs gold `{gold}`")]
    SentIdMismatch { predicted: String, gold: String },
    #[error("line {line}: expected `<triplet line>\\t<score>`, got `{text}`")]
    ScoreSyntax { line: usize, text: String },
    #[error("line {line}: score must be 0, 1 or 2, got `{value}`")]
    ScoreValue { line: usize, value: String },
    #[error("no scores to aggregate")]
    NoScores,
}

fn stopwords() -> &'static HashSet<&'static str> {
    static SET: std::sync::OnceLock<HashSet<&'static str>> = std::sync::OnceLock::new();
    SET.get_or_init(|| STOPWORDS.iter().copied().collect())
}

/// Lowercased alphanumeric words (internal hyphens kept) minus [`STOPWORDS`].
pub fn content_words(text: &str) -> BTreeSet<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '-'))
        .map(|w| w.trim_matches('-').to_lowercase())
        .filter(|w| !w.is_empty() && !stopwords().contains(w.as_str()))
        .collect()
}

fn overlaps(a: &str, b: &str) -> bool {
    let a = content_words(a);
    content_words(b).iter().any(|w| a.contains(w))
}

/// A reference predication for one sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldPredication {
    pub sent_id: String,
    pub predicate: String,
    pub subject_text: String,
    pub object_text: String,
    pub subject_cui: Option<String>,
    pub object_cui: Option<String>,
}

/// Reads `sent_id, predicate, subject_text, object_text[, subject_cui[, object_cui]]`
/// rows. Blank lines and `#` comments are skipped; `_` or empty CUIs are absent.
pub fn load_gold(input: &str) -> Result<Vec<GoldPredication>, EvalError> {
    let mut out = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').map(str::trim).collect();
        if !(4..=6).contains(&cols.len()) {
            return Err(EvalError::GoldColumns {
                line,
                found: cols.len(),
            });
        }
        for (k, name) in ["sent_id", "predicate", "subject_text", "object_text"]
            .into_iter()
            .enumerate()
        {
            if cols[k].is_empty() {
                return Err(EvalError::EmptyField { line, column: name });
            }
        }
        let cui = |k: usize| {
            cols.get(k)
                .filter(|c| !c.is_empty() && **c != "_")
                .map(|c| c.to_string())
        };
        out.push(GoldPredication {
            sent_id: cols[0].to_string(),
            predicate: cols[1].to_string(),
            subject_text: cols[2].to_string(),
            object_text: cols[3].to_string(),
            subject_cui: cui(4),
            object_cui: cui(5),
        });
    }
    Ok(out)
}

/// Cause overlaps the subject and effect overlaps the object in at least one
/// content word each. The trigger and predicate are not compared.
pub fn triplet_matches_gold(t: &CETriplet, g: &GoldPredication) -> Result<bool, EvalError> {
    if t.sent_id != g.sent_id {
        return Err(EvalError::SentIdMismatch {
            predicted: t.sent_id.clone(),
            gold: g.sent_id.clone(),
        });
    }
    Ok(overlaps(&t.cause.text, &g.subject_text) && overlaps(&t.effect.text, &g.object_text))
}

/// Counts and ratios. A ratio with a zero denominator is reported as 0 and
/// flagged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undefined: Vec<String>,
}

impl EvalReport {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let mut undefined = Vec::new();
        let mut ratio = |num: f64, den: f64, name: &str| {
            if den > 0.0 {
                num / den
            } else {
                undefined.push(name.to_string());
                0.0
            }
        };
        let precision = ratio(tp as f64, (tp + fp) as f64, "precision");
        let recall = ratio(tp as f64, (tp + fn_) as f64, "recall");
        let f1 = ratio(2.0 * precision * recall, precision + recall, "f1");
        EvalReport {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1,
            undefined,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>10}", "TP", self.tp)?;
        writeln!(f, "{:<10} {:>10}", "FP", self.fp)?;
        writeln!(f, "{:<10} {:>10}", "FN", self.fn_)?;
        writeln!(f, "{:<10} {:>10.4}", "Precision", self.precision)?;
        writeln!(f, "{:<10} {:>10.4}", "Recall", self.recall)?;
        write!(f, "{:<10} {:>10.4}", "F1", self.f1)?;
        if !self.undefined.is_empty() {
            write!(
                f,
                "\nundefined (0/0, reported as 0): {}",
                self.undefined.join(", ")
            )?;
        }
        Ok(())
    }
}

pub fn default_causal_predicates() -> BTreeSet<String> {
    CAUSAL_PREDICATES.iter().map(|p| p.to_string()).collect()
}

/// Gold predications with a causal predicate (case-insensitive) are matched
/// against predictions from the same sentence. A gold item with any match is
/// a TP, otherwise a FN; a prediction matching no gold item is a FP.
pub fn evaluate(
    predicted: &[CETriplet],
    gold: &[GoldPredication],
    causal_predicates: &BTreeSet<String>,
) -> EvalReport {
    let preds: HashSet<String> = causal_predicates.iter().map(|p| p.to_uppercase()).collect();
    let gold: Vec<&GoldPredication> = gold
        .iter()
        .filter(|g| preds.contains(&g.predicate.to_uppercase()))
        .collect();

    let mut gold_by_sent: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, g) in gold.iter().enumerate() {
        gold_by_sent.entry(g.sent_id.as_str()).or_default().push(i);
    }

    let mut gold_hit = vec![false; gold.len()];
    let mut fp = 0;
    for t in predicted {
        let mut any = false;
        for &gi in gold_by_sent.get(t.sent_id.as_str()).into_iter().flatten() {
            if overlaps(&t.cause.text, &gold[gi].subject_text)
                && overlaps(&t.effect.text, &gold[gi].object_text)
            {
                gold_hit[gi] = true;
                any = true;
            }
        }
        if !any {
            fp += 1;
        }
    }
    let tp = gold_hit.iter().filter(|&&h| h).count() as u64;
    EvalReport::from_counts(tp, fp, gold.len() as u64 - tp)
}

/// An expert judgement of one output triplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreRecord {
    /// 1-based line of the triplet in the JSONL output.
    pub triplet_line: usize,
    /// 0 incorrect, 1 partially correct, 2 correct.
    pub score: u8,
}

impl ScoreRecord {
    pub fn new(triplet_line: usize, score: u8) -> Option<Self> {
        (score <= 2).then_some(ScoreRecord {
            triplet_line,
            score,
        })
    }
}

/// Reads `triplet_line<TAB>score` rows, skipping blanks and `#` comments.
pub fn load_scores(input: &str) -> Result<Vec<ScoreRecord>, EvalError> {
    let mut out = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let syntax = || EvalError::ScoreSyntax {
            line,
            text: raw.to_string(),
        };
        let (idx, score) = raw.split_once('\t').ok_or_else(syntax)?;
        let idx: usize = idx.trim().parse().map_err(|_| syntax())?;
        let value = score.trim();
        let rec = value
            .parse::<u8>()
            .ok()
            .and_then(|s| ScoreRecord::new(idx, s))
            .ok_or_else(|| EvalError::ScoreValue {
                line,
                value: value.to_string(),
            })?;
        out.push(rec);
    }
    Ok(out)
}

/// Strict precision counts only fully correct triplets; lenient precision
/// is the score total over the maximum attainable.
pub fn strict_lenient_precision(scores: &[ScoreRecord]) -> Result<(f64, f64), EvalError> {
    if scores.is_empty() {
        return Err(EvalError::NoScores);
    }
    let n = scores.len() as f64;
    let full = scores.iter().filter(|s| s.score == 2).count() as f64;
    let total: u64 = scores.iter().map(|s| u64::from(s.score)).sum();
    Ok((full / n, total as f64 / (2.0 * n)))
}

/// Triplets from sentences the knowledge base has no causal predication for.
pub fn kb_novel_triplets(
    triplets: &[CETriplet],
    kb_causal_sentences: &HashSet<String>,
) -> Vec<CETriplet> {
    triplets
        .iter()
        .filter(|t| !kb_causal_sentences.contains(&t.sent_id))
        .cloned()
        .collect()
}

/// Per-rule triplet counts, crediting both the cause and the effect rule.
pub fn triplets_per_rule(triplets: &[CETriplet]) -> BTreeMap<String, u64> {
    let mut out = BTreeMap::new();
    for t in triplets {
        *out.entry(t.cause_rule_id.clone()).or_insert(0) += 1;
        *out.entry(t.effect_rule_id.clone()).or_insert(0) += 1;
    }
    out
}

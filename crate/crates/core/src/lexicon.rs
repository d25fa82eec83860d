//! Causal-trigger lexicon and trigger lookup.
//!
//! The lexicon file is UTF-8 text with one entry per line and three
//! tab-separated fields: the canonical form, the trigger class (`agnostic` or
//! `specific`) and a comma-separated list of explicit variants, which may be
//! empty. Lines starting with `#` and blank lines are ignored.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use thiserror::Error;

use crate::tree::ParsedSentence;

/// Lexicon shipped with the crate.
pub const DEFAULT_LEXICON: &str = include_str!("../data/triggers.tsv");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: expected 2 or 3 tab-separated fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: empty canonical form")]
    EmptyEntry { line: usize },
    #[error("line {line}: unknown trigger class `{value}`")]
    UnknownClass { line: usize, value: String },
    #[error("line {line}: duplicate entry `{canonical}` (first seen on line {first})")]
    Duplicate {
        line: usize,
        first: usize,
        canonical: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TriggerClass {
    DomainAgnostic,
    DomainSpecific,
}

impl FromStr for TriggerClass {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_lowercase().as_str() {
            "agnostic" | "domain-agnostic" => Ok(TriggerClass::DomainAgnostic),
            "specific" | "domain-specific" => Ok(TriggerClass::DomainSpecific),
            _ => Err(()),
        }
    }
}

impl fmt::Display for TriggerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriggerClass::DomainAgnostic => "agnostic",
            TriggerClass::DomainSpecific => "specific",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub canonical: String,
    pub variants: Vec<String>,
    pub trigger_class: TriggerClass,
    pub is_mwe: bool,
}

impl LexiconEntry {
    pub fn new(canonical: &str, trigger_class: TriggerClass, variants: &[&str]) -> Self {
        let canonical = normalize_form(canonical);
        LexiconEntry {
            is_mwe: canonical.split(' ').count() > 1,
            canonical,
            variants: variants.iter().map(|v| normalize_form(v)).collect(),
            trigger_class,
        }
    }
}

fn normalize_form(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Every surface/lemma form that identifies `entry`: canonical plus declared
/// variants, lowercased.
pub fn trigger_variants(entry: &LexiconEntry) -> BTreeSet<String> {
    std::iter::once(&entry.canonical)
        .chain(entry.variants.iter())
        .map(|f| normalize_form(f))
        .filter(|f| !f.is_empty())
        .collect()
}

/// Parses a lexicon file.
pub fn load_lexicon(input: &str) -> Result<Vec<LexiconEntry>, LexiconError> {
    let mut entries: Vec<LexiconEntry> = Vec::new();
    let mut first_seen: std::collections::HashMap<String, usize> = Default::default();
    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.trim_end_matches(['\r', '\n']).split('\t').collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(LexiconError::FieldCount {
                line,
                found: fields.len(),
            });
        }
        let canonical = normalize_form(fields[0]);
        if canonical.is_empty() {
            return Err(LexiconError::EmptyEntry { line });
        }
        let trigger_class =
            fields[1]
                .parse::<TriggerClass>()
                .map_err(|_| LexiconError::UnknownClass {
                    line,
                    value: fields[1].to_string(),
                })?;
        let variants: Vec<String> = fields
            .get(2)
            .map(|v| {
                v.split(',')
                    .map(normalize_form)
                    .filter(|v| !v.is_empty())
                    .collect()
            })
            .unwrap_or_default();
        if let Some(&first) = first_seen.get(&canonical) {
            return Err(LexiconError::Duplicate {
                line,
                first,
                canonical,
            });
        }
        first_seen.insert(canonical.clone(), line);
        entries.push(LexiconEntry {
            is_mwe: canonical.contains(' '),
            canonical,
            variants,
            trigger_class,
        });
    }
    Ok(entries)
}

/// A lexicon hit in one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriggerMatch {
    /// Contiguous token range covered by the match.
    pub span: Range<usize>,
    /// Span token used as the trigger node in all features.
    pub anchor: usize,
    /// Index of the entry in the lexicon it was matched against.
    pub entry: usize,
}

/// Lexicon with a precomputed form index for lookup.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    // first word -> (words of the form, entry index), longest forms first
    forms: HashMap<String, Vec<(Vec<String>, usize)>>,
}

impl Lexicon {
    pub fn new(entries: Vec<LexiconEntry>) -> Self {
        let mut forms: HashMap<String, Vec<(Vec<String>, usize)>> = HashMap::new();
        for (idx, e) in entries.iter().enumerate() {
            for f in trigger_variants(e) {
                let words: Vec<String> = f.split(' ').map(str::to_string).collect();
                forms
                    .entry(words[0].clone())
                    .or_default()
                    .push((words, idx));
            }
        }
        for list in forms.values_mut() {
            list.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.1.cmp(&b.1)));
        }
        Lexicon { entries, forms }
    }

    pub fn parse(input: &str) -> Result<Self, LexiconError> {
        load_lexicon(input).map(Lexicon::new)
    }

    /// The lexicon compiled into the crate.
    pub fn builtin() -> Self {
        Lexicon::parse(DEFAULT_LEXICON).expect("shipped lexicon is valid")
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn entry(&self, idx: usize) -> &LexiconEntry {
        &self.entries[idx]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Candidate triggers in `s`, ordered by span start. Overlaps are resolved
    /// longest-first, then leftmost.
    pub fn find_triggers(&self, s: &ParsedSentence) -> Vec<TriggerMatch> {
        let toks = s.tokens();
        let lemmas: Vec<String> = toks.iter().map(|t| t.lemma_lower()).collect();
        let word_matches = |i: usize, w: &str| toks[i].lower == w || lemmas[i] == w;

        // (start, len, entry)
        let mut hits: Vec<(usize, usize, usize)> = Vec::new();
        for start in 0..toks.len() {
            let mut candidates: Vec<&(Vec<String>, usize)> = self
                .forms
                .get(&toks[start].lower)
                .into_iter()
                .flatten()
                .collect();
            if lemmas[start] != toks[start].lower {
                candidates.extend(self.forms.get(&lemmas[start]).into_iter().flatten());
                candidates.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.1.cmp(&b.1)));
            }
            // candidates are sorted longest-first, so the first hit per length wins
            let mut seen_len = HashSet::new();
            for (words, entry) in candidates {
                let len = words.len();
                if start + len > toks.len() || seen_len.contains(&len) {
                    continue;
                }
                if words
                    .iter()
                    .enumerate()
                    .all(|(k, w)| word_matches(start + k, w))
                {
                    seen_len.insert(len);
                    hits.push((start, len, *entry));
                }
            }
        }

        hits.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)).then(a.2.cmp(&b.2)));
        let mut taken = vec![false; toks.len()];
        let mut chosen = Vec::new();
        for (start, len, entry) in hits {
            if taken[start..start + len].iter().any(|&t| t) {
                continue;
            }
            taken[start..start + len].iter_mut().for_each(|t| *t = true);
            let span = start..start + len;
            chosen.push(TriggerMatch {
                anchor: span_head(s, &span),
                span,
                entry,
            });
        }
        chosen.sort_by_key(|m| m.span.start);
        chosen
    }
}

/// The span token whose parent lies outside the span. When a span is not a
/// connected subtree there may be several; the shallowest (then leftmost)
/// one is used.
pub fn span_head(s: &ParsedSentence, span: &Range<usize>) -> usize {
    span.clone()
        .filter(|&i| match s.tokens()[i].head {
            None => true,
            Some(h) => !span.contains(&h),
        })
        .min_by_key(|&i| (s.depth(i).unwrap_or(usize::MAX), i))
        .unwrap_or(span.start)
}

/// Convenience over [`Lexicon::find_triggers`] for a plain entry list.
pub fn find_triggers(s: &ParsedSentence, lex: &[LexiconEntry]) -> Vec<TriggerMatch> {
    Lexicon::new(lex.to_vec()).find_triggers(s)
}

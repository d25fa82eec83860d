//! Decision-list rules over pair features.
//!
//! Rule file format (UTF-8, `#` comments, records separated by blank lines):
//!
//! ```text
//! RULE C1 CAUSE
//! AND: dep.path.u<nsubj<v
//! OR: u.POS_gen.NOUN, u.POS_gen.PROPN
//! NEG: v.rootword.result
//! ```
//!
//! File order is priority order; the first matching rule labels the pair.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{normalize_feature, FeatureError, FeatureSet};

/// Rule file shipped with the crate.
pub const DEFAULT_RULES: &str = include_str!("../data/rules.txt");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("line {line}: rule `{id}` has an empty AND set")]
    EmptyAnd { line: usize, id: String },
    #[error("line {line}: duplicate rule id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: unknown label `{label}`")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: {source}")]
    Feature {
        line: usize,
        #[source]
        source: FeatureError,
    },
    #[error("line {line}: feature `{feature}` appears in more than one of AND/OR/NEG")]
    Overlap { line: usize, feature: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Label {
    Cause,
    Effect,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Cause => "CAUSE",
            Label::Effect => "EFFECT",
        })
    }
}

impl FromStr for Label {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.to_ascii_uppercase().as_str() {
            "CAUSE" => Ok(Label::Cause),
            "EFFECT" => Ok(Label::Effect),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub label: Label,
    pub and_set: BTreeSet<String>,
    pub or_set: BTreeSet<String>,
    pub neg_set: BTreeSet<String>,
    pub priority: usize,
}

impl Rule {
    /// All AND features present, at least one OR feature present when the OR
    /// set is non-empty, and no NEG feature present.
    pub fn matches(&self, f: &FeatureSet) -> bool {
        self.and_set.iter().all(|x| f.contains(x))
            && (self.or_set.is_empty() || self.or_set.iter().any(|x| f.contains(x)))
            && !self.neg_set.iter().any(|x| f.contains(x))
    }

    pub fn features(&self) -> impl Iterator<Item = &str> {
        self.and_set
            .iter()
            .chain(&self.or_set)
            .chain(&self.neg_set)
            .map(String::as_str)
    }
}

pub fn rule_matches(r: &Rule, f: &FeatureSet) -> bool {
    r.matches(f)
}

/// Outcome of classifying one pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairLabel {
    Cause(String),
    Effect(String),
    Other,
}

impl PairLabel {
    pub fn label(&self) -> Option<Label> {
        match self {
            PairLabel::Cause(_) => Some(Label::Cause),
            PairLabel::Effect(_) => Some(Label::Effect),
            PairLabel::Other => None,
        }
    }

    pub fn rule_id(&self) -> Option<&str> {
        match self {
            PairLabel::Cause(id) | PairLabel::Effect(id) => Some(id),
            PairLabel::Other => None,
        }
    }
}

/// A priority-ordered decision list with per-rule hit counters.
///
/// Counters are atomic so one `RuleSet` can be shared by concurrent workers.
#[derive(Debug)]
pub struct RuleSet {
    rules: Vec<Rule>,
    counters: Vec<AtomicU64>,
    compiled: Compiled,
}

/// Rules as bitmasks over the vocabulary of features they mention.
#[derive(Debug, Clone, Default)]
struct Compiled {
    vocab: HashMap<String, usize>,
    words: usize,
    // and, or, neg masks per rule, `words` u64s each
    masks: Vec<[Vec<u64>; 3]>,
}

impl Compiled {
    fn new(rules: &[Rule]) -> Self {
        let mut vocab = HashMap::new();
        for f in rules.iter().flat_map(Rule::features) {
            let next = vocab.len();
            vocab.entry(f.to_string()).or_insert(next);
        }
        let words = vocab.len().div_ceil(64).max(1);
        let mask = |set: &BTreeSet<String>| {
            let mut m = vec![0u64; words];
            for f in set {
                let i = vocab[f.as_str()];
                m[i / 64] |= 1 << (i % 64);
            }
            m
        };
        let masks = rules
            .iter()
            .map(|r| [mask(&r.and_set), mask(&r.or_set), mask(&r.neg_set)])
            .collect();
        Compiled {
            vocab,
            words,
            masks,
        }
    }

    fn decide(&self, f: &FeatureSet) -> Option<usize> {
        let mut present = vec![0u64; self.words];
        for x in f.iter() {
            if let Some(&i) = self.vocab.get(x) {
                present[i / 64] |= 1 << (i % 64);
            }
        }
        self.masks.iter().position(|[and, or, neg]| {
            let mut any_or = false;
            let mut has_or = false;
            for w in 0..self.words {
                if present[w] & and[w] != and[w] || present[w] & neg[w] != 0 {
                    return false;
                }
                has_or |= or[w] != 0;
                any_or |= present[w] & or[w] != 0;
            }
            !has_or || any_or
        })
    }
}

impl Clone for RuleSet {
    fn clone(&self) -> Self {
        RuleSet {
            rules: self.rules.clone(),
            counters: self
                .counters
                .iter()
                .map(|c| AtomicU64::new(c.load(Ordering::Relaxed)))
                .collect(),
            compiled: self.compiled.clone(),
        }
    }
}

impl PartialEq for RuleSet {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules
    }
}

impl RuleSet {
    /// Builds a rule set, reassigning priorities to list order.
    pub fn new(mut rules: Vec<Rule>) -> Result<Self, RuleError> {
        let mut ids = HashSet::new();
        for (i, r) in rules.iter_mut().enumerate() {
            if !ids.insert(r.id.clone()) {
                return Err(RuleError::DuplicateId {
                    line: 0,
                    id: r.id.clone(),
                });
            }
            if r.and_set.is_empty() {
                return Err(RuleError::EmptyAnd {
                    line: 0,
                    id: r.id.clone(),
                });
            }
            r.priority = i;
        }
        let counters = rules.iter().map(|_| AtomicU64::new(0)).collect();
        let compiled = Compiled::new(&rules);
        Ok(RuleSet {
            rules,
            counters,
            compiled,
        })
    }

    /// The decision list compiled into the crate.
    pub fn builtin() -> Self {
        load_rules(DEFAULT_RULES).expect("shipped rules are valid")
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// First matching rule, without touching the counters.
    pub fn decide(&self, f: &FeatureSet) -> Option<&Rule> {
        self.compiled.decide(f).map(|i| &self.rules[i])
    }

    /// Labels a pair and counts the hit against the deciding rule.
    pub fn classify(&self, f: &FeatureSet) -> PairLabel {
        match self.decide(f) {
            Some(r) => {
                self.counters[r.priority].fetch_add(1, Ordering::Relaxed);
                match r.label {
                    Label::Cause => PairLabel::Cause(r.id.clone()),
                    Label::Effect => PairLabel::Effect(r.id.clone()),
                }
            }
            None => PairLabel::Other,
        }
    }

    pub fn count(&self, id: &str) -> u64 {
        self.rules
            .iter()
            .position(|r| r.id == id)
            .map_or(0, |i| self.counters[i].load(Ordering::Relaxed))
    }

    pub fn counts(&self) -> Vec<(String, Label, u64)> {
        self.rules
            .iter()
            .zip(&self.counters)
            .map(|(r, c)| (r.id.clone(), r.label, c.load(Ordering::Relaxed)))
            .collect()
    }

    pub fn reset_counts(&self) {
        for c in &self.counters {
            c.store(0, Ordering::Relaxed);
        }
    }

    /// Adds externally collected counts (e.g. from another run) by rule id.
    /// Ids not in this set are ignored and returned.
    pub fn add_counts<'a>(&self, counts: impl IntoIterator<Item = (&'a str, u64)>) -> Vec<String> {
        let mut unknown = Vec::new();
        for (id, n) in counts {
            match self.rules.iter().position(|r| r.id == id) {
                Some(i) => {
                    self.counters[i].fetch_add(n, Ordering::Relaxed);
                }
                None => unknown.push(id.to_string()),
            }
        }
        unknown
    }

    /// Serializes in the rule-file format.
    pub fn to_rule_file(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&format!("RULE {} {}\n", r.id, r.label));
            let join = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(", ");
            out.push_str(&format!("AND: {}\n", join(&r.and_set)));
            if !r.or_set.is_empty() {
                out.push_str(&format!("OR: {}\n", join(&r.or_set)));
            }
            if !r.neg_set.is_empty() {
                out.push_str(&format!("NEG: {}\n", join(&r.neg_set)));
            }
        }
        out
    }
}

pub fn classify_pair(rs: &RuleSet, f: &FeatureSet) -> PairLabel {
    rs.classify(f)
}

struct Pending {
    line: usize,
    id: String,
    label: Label,
    and_set: Option<BTreeSet<String>>,
    or_set: Option<BTreeSet<String>>,
    neg_set: Option<BTreeSet<String>>,
}

impl Pending {
    fn finish(self, priority: usize) -> Result<Rule, RuleError> {
        let and_set = self.and_set.unwrap_or_default();
        if and_set.is_empty() {
            return Err(RuleError::EmptyAnd {
                line: self.line,
                id: self.id,
            });
        }
        let or_set = self.or_set.unwrap_or_default();
        let neg_set = self.neg_set.unwrap_or_default();
        if let Some(f) = and_set
            .intersection(&or_set)
            .chain(and_set.intersection(&neg_set))
            .chain(or_set.intersection(&neg_set))
            .next()
        {
            return Err(RuleError::Overlap {
                line: self.line,
                feature: f.clone(),
            });
        }
        Ok(Rule {
            id: self.id,
            label: self.label,
            and_set,
            or_set,
            neg_set,
            priority,
        })
    }
}

fn parse_feature_list(list: &str, line: usize) -> Result<BTreeSet<String>, RuleError> {
    let list = list.trim();
    // `{ }` is accepted for an explicitly empty set
    let list = list
        .strip_prefix('{')
        .and_then(|l| l.strip_suffix('}'))
        .unwrap_or(list);
    list.split(',')
        .map(str::trim)
        .filter(|f| !f.is_empty())
        .map(|f| normalize_feature(f).map_err(|source| RuleError::Feature { line, source }))
        .collect()
}

/// Parses a rule file. Feature strings are normalized to canonical spelling
/// and unknown feature families are rejected.
pub fn load_rules(input: &str) -> Result<RuleSet, RuleError> {
    let mut rules = Vec::new();
    let mut ids: HashSet<String> = HashSet::new();
    let mut current: Option<Pending> = None;

    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        let text = raw.trim();
        if text.starts_with('#') {
            continue;
        }
        if text.is_empty() {
            if let Some(p) = current.take() {
                rules.push(p.finish(rules.len())?);
            }
            continue;
        }
        if let Some(rest) = text
            .strip_prefix("RULE ")
            .or_else(|| text.strip_prefix("RULE\t"))
        {
            if let Some(p) = current.take() {
                rules.push(p.finish(rules.len())?);
            }
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let [id, label] = parts.as_slice() else {
                return Err(RuleError::Syntax {
                    line,
                    message: "expected `RULE <id> <CAUSE|EFFECT>`".into(),
                });
            };
            let label = label
                .parse::<Label>()
                .map_err(|_| RuleError::UnknownLabel {
                    line,
                    label: label.to_string(),
                })?;
            if !ids.insert(id.to_string()) {
                return Err(RuleError::DuplicateId {
                    line,
                    id: id.to_string(),
                });
            }
            current = Some(Pending {
                line,
                id: id.to_string(),
                label,
                and_set: None,
                or_set: None,
                neg_set: None,
            });
            continue;
        }
        let Some(p) = current.as_mut() else {
            return Err(RuleError::Syntax {
                line,
                message: format!("`{text}` outside a RULE record"),
            });
        };
        let (key, list) = text.split_once(':').ok_or_else(|| RuleError::Syntax {
            line,
            message: format!("expected `AND:`, `OR:` or `NEG:`, got `{text}`"),
        })?;
        let set = parse_feature_list(list, line)?;
        let slot = match key.trim().to_ascii_uppercase().as_str() {
            "AND" => &mut p.and_set,
            "OR" => &mut p.or_set,
            "NEG" => &mut p.neg_set,
            other => {
                return Err(RuleError::Syntax {
                    line,
                    message: format!("unknown set `{other}`"),
                })
            }
        };
        if slot.is_some() {
            return Err(RuleError::Syntax {
                line,
                message: format!("repeated `{}` line", key.trim()),
            });
        }
        *slot = Some(set);
    }
    if let Some(p) = current.take() {
        rules.push(p.finish(rules.len())?);
    }
    RuleSet::new(rules)
}

/// One row of a coverage report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub id: String,
    pub label: Label,
    pub count: u64,
    /// Share of all assignments of the same label.
    pub fraction: f64,
}

/// Per-rule hit counts with each rule's share of its label's assignments,
/// sorted by count (descending), ties in priority order.
pub fn coverage_report(counts: &[(String, Label, u64)]) -> Vec<CoverageRow> {
    let total = |l: Label| -> u64 {
        counts
            .iter()
            .filter(|(_, lab, _)| *lab == l)
            .map(|(_, _, c)| c)
            .sum()
    };
    let (causes, effects) = (total(Label::Cause), total(Label::Effect));
    let mut rows: Vec<(usize, CoverageRow)> = counts
        .iter()
        .enumerate()
        .map(|(i, (id, label, count))| {
            let denom = match label {
                Label::Cause => causes,
                Label::Effect => effects,
            };
            let fraction = if denom == 0 {
                0.0
            } else {
                *count as f64 / denom as f64
            };
            (
                i,
                CoverageRow {
                    id: id.clone(),
                    label: *label,
                    count: *count,
                    fraction,
                },
            )
        })
        .collect();
    rows.sort_by(|a, b| b.1.count.cmp(&a.1.count).then(a.0.cmp(&b.0)));
    rows.into_iter().map(|(_, r)| r).collect()
}

pub fn rule_coverage_report(rs: &RuleSet) -> Vec<CoverageRow> {
    coverage_report(&rs.counts())
}

/// Renders rows as an aligned text table.
pub fn format_coverage(rows: &[CoverageRow]) -> String {
    let mut out = format!(
        "{:<8} {:<7} {:>10} {:>8}\n",
        "Rule", "Label", "Coverage", "Share"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<8} {:<7} {:>10} {:>7.1}%\n",
            r.id,
            r.label.to_string(),
            r.count,
            r.fraction * 100.0
        ));
    }
    out
}

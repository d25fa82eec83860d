//! Candidate headwords and the feature strings describing a (trigger, candidate)
//! pair.
//!
//! Feature strings are the contract between this module and rule files. The
//! families, with `x` standing for either `v` (trigger) or `u` (candidate):
//!
//! | family | shape |
//! |---|---|
//! | lexical | `x.text.W`, `x.rootword.L` |
//! | POS | `x.POS.TAG`, `x.POS_gen.TAG` |
//! | parent | `x.parent.text.W`, `x.parent.dep.D` (`root` at the root) |
//! | ancestry | `ancestor.v.u`, `ancestor.u.v` |
//! | LCA | `lca.rootword.L` |
//! | path | `dep.path.u<a<LCA>b>v` |
//! | direct edge | `edge.v.u.D`, `edge.u.v.D` |
//! | path relation | `path.v.u.D` for each label on the path |
//! | path word | `path.W` for each node strictly between `u` and `v` |
//! | unlabelled edge | `edge.v.u`, `edge.u.v` |
//! | trigger children | `v.child.W`, `v.child.D.W` |
//! | parent word | `dep.path.len.1.W>D>u` |
//! | copula | `u.copula_verb_with_object` |
//!
//! Words, lemmas and dependency labels are lowercased; POS tags are uppercased.
//! The first group (down to path word) is the core grammar; the rest are the
//! additional families the shipped rules rely on.

use std::borrow::Cow;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::tree::{DepPath, ParsedSentence, TreeError, ROOT_LABEL};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeatureError {
    #[error("candidate and trigger are the same token ({0})")]
    SameToken(usize),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("unknown feature family in `{0}`")]
    UnknownFamily(String),
    #[error("malformed feature `{0}`")]
    Malformed(String),
}

/// Which endpoint of a pair a feature talks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Trigger,
    Candidate,
}

impl Role {
    fn prefix(self) -> &'static str {
        match self {
            Role::Trigger => "v",
            Role::Candidate => "u",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureFamily {
    Text(Role),
    Rootword(Role),
    Pos(Role),
    PosGen(Role),
    ParentText(Role),
    ParentDep(Role),
    /// `ancestor.v.u` when the trigger is the ancestor.
    Ancestor(Role),
    LcaRootword,
    DepPath,
    /// Labelled direct edge; the role is the parent side.
    EdgeLabeled(Role),
    PathRelation,
    PathWord,
    /// Unlabelled direct edge; the role is the parent side.
    Edge(Role),
    ChildWord,
    ChildDepWord,
    ParentWord,
    CopulaWithObject,
}

impl FeatureFamily {
    /// True for the families of the core pair grammar, false for the
    /// additional families used by the rule tables.
    pub fn is_core(self) -> bool {
        !matches!(
            self,
            FeatureFamily::Edge(_)
                | FeatureFamily::ChildWord
                | FeatureFamily::ChildDepWord
                | FeatureFamily::ParentWord
                | FeatureFamily::CopulaWithObject
        )
    }

    /// Families of which every generated set has exactly one member.
    pub fn is_singular(self) -> bool {
        matches!(
            self,
            FeatureFamily::Text(_)
                | FeatureFamily::Rootword(_)
                | FeatureFamily::Pos(_)
                | FeatureFamily::PosGen(_)
                | FeatureFamily::ParentText(_)
                | FeatureFamily::ParentDep(_)
                | FeatureFamily::LcaRootword
                | FeatureFamily::DepPath
        )
    }

    /// Classifies a canonical feature string.
    pub fn of(feature: &str) -> Option<FeatureFamily> {
        parse_feature(feature).ok().map(|(fam, _)| fam)
    }
}

fn word(s: &str) -> Cow<'_, str> {
    if s.is_empty() {
        return Cow::Borrowed("_");
    }
    if !s.chars().any(|c| c.is_uppercase() || c.is_whitespace()) {
        return Cow::Borrowed(s);
    }
    let w: String = s
        .to_lowercase()
        .chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect();
    if w.is_empty() {
        Cow::Borrowed("_")
    } else {
        Cow::Owned(w)
    }
}

fn tag(s: &str) -> Cow<'_, str> {
    let t = s.trim();
    if t.is_empty() {
        Cow::Borrowed("_")
    } else if t.chars().any(char::is_lowercase) {
        Cow::Owned(t.to_uppercase())
    } else {
        Cow::Borrowed(t)
    }
}

fn checked_value(raw: &str, value: &str) -> Result<(), FeatureError> {
    if value.is_empty() || value.chars().any(char::is_whitespace) {
        Err(FeatureError::Malformed(raw.to_string()))
    } else {
        Ok(())
    }
}

/// Parses a feature string, accepting aliases and any casing, and returns its
/// family together with the canonical spelling.
pub fn parse_feature(raw: &str) -> Result<(FeatureFamily, String), FeatureError> {
    use FeatureFamily as F;
    let raw = raw.trim();
    let lower = raw.to_lowercase();

    for role in [Role::Trigger, Role::Candidate] {
        let r = role.prefix();
        // longer prefixes first: POS_gen before POS, parent.* before text
        let simple: [(&str, &str, FeatureFamily, bool); 6] = [
            ("pos_gen.", "POS_gen.", F::PosGen(role), true),
            ("pos.", "POS.", F::Pos(role), true),
            ("parent.text.", "parent.text.", F::ParentText(role), false),
            ("parent.dep.", "parent.dep.", F::ParentDep(role), false),
            ("text.", "text.", F::Text(role), false),
            ("rootword.", "rootword.", F::Rootword(role), false),
        ];
        for (key, canon, fam, is_tag) in simple {
            if let Some(v) = lower.strip_prefix(&format!("{r}.{key}")) {
                checked_value(raw, v)?;
                let v = if is_tag {
                    v.to_uppercase()
                } else {
                    v.to_string()
                };
                return Ok((fam, format!("{r}.{canon}{v}")));
            }
        }
    }

    if let Some(rest) = lower.strip_prefix("v.child.") {
        checked_value(raw, rest)?;
        let fam = if rest.contains('.') {
            F::ChildDepWord
        } else {
            F::ChildWord
        };
        return Ok((fam, format!("v.child.{rest}")));
    }
    if lower == "u.copula_verb_with_object" {
        return Ok((F::CopulaWithObject, lower));
    }
    match lower.as_str() {
        "ancestor.v.u" => return Ok((F::Ancestor(Role::Trigger), lower)),
        "ancestor.u.v" => return Ok((F::Ancestor(Role::Candidate), lower)),
        "edge.v.u" => return Ok((F::Edge(Role::Trigger), lower)),
        "edge.u.v" => return Ok((F::Edge(Role::Candidate), lower)),
        _ => {}
    }
    for key in ["lca.rootword.", "lca.root_word."] {
        if let Some(v) = lower.strip_prefix(key) {
            checked_value(raw, v)?;
            return Ok((F::LcaRootword, format!("lca.rootword.{v}")));
        }
    }
    if let Some(rest) = lower.strip_prefix("dep.path.len.1.") {
        let malformed = || FeatureError::Malformed(raw.to_string());
        let body = rest.strip_suffix(">u").ok_or_else(malformed)?;
        let (w, d) = body.rsplit_once('>').ok_or_else(malformed)?;
        checked_value(raw, w)?;
        checked_value(raw, d)?;
        return Ok((F::ParentWord, format!("dep.path.len.1.{w}>{d}>u")));
    }
    if lower.starts_with("dep.path.") {
        let rest = &raw["dep.path.".len()..];
        let fixed = fix_lca_marker(rest);
        let path = DepPath::parse(&fixed).map_err(|_| FeatureError::Malformed(raw.to_string()))?;
        return Ok((F::DepPath, format!("dep.path.{}", path.serialize())));
    }
    for (key, role) in [("edge.v.u.", Role::Trigger), ("edge.u.v.", Role::Candidate)] {
        if let Some(d) = lower.strip_prefix(key) {
            checked_value(raw, d)?;
            return Ok((F::EdgeLabeled(role), format!("{key}{d}")));
        }
    }
    if let Some(d) = lower.strip_prefix("path.v.u.") {
        checked_value(raw, d)?;
        return Ok((F::PathRelation, format!("path.v.u.{d}")));
    }
    if let Some(w) = lower.strip_prefix("path.") {
        checked_value(raw, w)?;
        return Ok((F::PathWord, format!("path.{w}")));
    }
    Err(FeatureError::UnknownFamily(raw.to_string()))
}

fn fix_lca_marker(path: &str) -> String {
    let lower = path.to_lowercase();
    match lower.find("<lca>") {
        Some(pos) => format!("{}<LCA>{}", &path[..pos], &path[pos + 5..]),
        None => path.to_string(),
    }
}

/// Canonical spelling of a feature string.
pub fn normalize_feature(raw: &str) -> Result<String, FeatureError> {
    parse_feature(raw).map(|(_, canon)| canon)
}

/// The feature strings generated for one pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureSet {
    features: BTreeSet<String>,
}

impl FeatureSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, f: impl Into<String>) -> bool {
        self.features.insert(f.into())
    }

    pub fn contains(&self, f: &str) -> bool {
        self.features.contains(f)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(String::as_str)
    }

    pub fn as_set(&self) -> &BTreeSet<String> {
        &self.features
    }

    /// Members belonging to the core pair grammar.
    pub fn core(&self) -> BTreeSet<&str> {
        self.iter()
            .filter(|f| FeatureFamily::of(f).is_some_and(FeatureFamily::is_core))
            .collect()
    }

    /// Members belonging to the additional rule-table families.
    pub fn extended(&self) -> BTreeSet<&str> {
        self.iter()
            .filter(|f| FeatureFamily::of(f).is_some_and(|fam| !fam.is_core()))
            .collect()
    }
}

impl<S: Into<String>> FromIterator<S> for FeatureSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        FeatureSet {
            features: iter.into_iter().map(Into::into).collect(),
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, feat) in self.features.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{feat}")?;
        }
        write!(f, "}}")
    }
}

/// A trigger anchor, a candidate headword and the features of the pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePair {
    pub v: usize,
    pub u: usize,
    pub features: FeatureSet,
}

const NOUN_LIKE_DEPS: [&str; 4] = ["nsubj", "nsubjpass", "dobj", "pobj"];

/// Tokens that may head a cause or effect phrase: non-auxiliary verbs, nouns
/// that are not compound modifiers, and anything in a subject or object slot.
pub fn candidate_headwords(s: &ParsedSentence) -> BTreeSet<usize> {
    s.tokens()
        .iter()
        .filter(|t| {
            let dep = t.dep_lower();
            let upos = t.pos_gen.to_uppercase();
            (upos == "VERB" && dep != "aux")
                || ((upos == "NOUN" || upos == "PROPN") && dep != "compound")
                || NOUN_LIKE_DEPS.contains(&dep.as_str())
        })
        .map(|t| t.index)
        .collect()
}

/// Generates the feature set for trigger `v` and candidate `u`.
pub fn generate_features(
    s: &ParsedSentence,
    v: usize,
    u: usize,
) -> Result<FeatureSet, FeatureError> {
    let tv = s.token(v)?;
    let tu = s.token(u)?;
    if u == v {
        return Err(FeatureError::SameToken(u));
    }
    let mut fs: Vec<String> = Vec::with_capacity(48);

    for (r, t) in [("v", tv), ("u", tu)] {
        fs.push([r, ".text.", &word(&t.text)].concat());
        fs.push([r, ".rootword.", &word(&t.lemma)].concat());
        fs.push([r, ".POS.", &tag(&t.pos)].concat());
        fs.push([r, ".POS_gen.", &tag(&t.pos_gen)].concat());
        match t.head {
            Some(h) => {
                fs.push([r, ".parent.text.", &word(&s.tokens()[h].text)].concat());
                fs.push([r, ".parent.dep.", &word(&t.dep)].concat());
            }
            None => {
                fs.push([r, ".parent.text.", ROOT_LABEL].concat());
                fs.push([r, ".parent.dep.", ROOT_LABEL].concat());
            }
        }
    }

    if s.is_ancestor(v, u)? {
        fs.push("ancestor.v.u".into());
    }
    if s.is_ancestor(u, v)? {
        fs.push("ancestor.u.v".into());
    }

    let lca = s.lca(u, v)?;
    fs.push(["lca.rootword.", &word(&s.tokens()[lca].lemma)].concat());

    let path = s.dep_path(u, v)?;
    fs.push(["dep.path.", &path.serialize()].concat());
    for label in path.up_edges.iter().chain(path.down_edges.iter()) {
        fs.push(["path.v.u.", &word(label)].concat());
    }
    for &n in &path.intermediate_nodes {
        fs.push(["path.", &word(&s.tokens()[n].text)].concat());
    }

    if tu.head == Some(v) {
        fs.push(["edge.v.u.", &word(&tu.dep)].concat());
        fs.push("edge.v.u".into());
    }
    if tv.head == Some(u) {
        fs.push(["edge.u.v.", &word(&tv.dep)].concat());
        fs.push("edge.u.v".into());
    }

    for &c in s.children(v)? {
        let tc = &s.tokens()[c];
        fs.push(["v.child.", &word(&tc.text)].concat());
        fs.push(["v.child.", &word(&tc.dep), ".", &word(&tc.text)].concat());
    }

    if let Some(h) = tu.head {
        fs.push(
            [
                "dep.path.len.1.",
                &word(&s.tokens()[h].text),
                ">",
                &word(&tu.dep),
                ">u",
            ]
            .concat(),
        );
    }

    if is_copula_with_complement(s, u)? {
        fs.push("u.copula_verb_with_object".into());
    }

    Ok(FeatureSet {
        features: fs.into_iter().collect(),
    })
}

/// A form of "be" governing a predicate complement (`attr` or `acomp`).
fn is_copula_with_complement(s: &ParsedSentence, u: usize) -> Result<bool, TreeError> {
    let t = s.token(u)?;
    if t.lemma_lower() != "be" {
        return Ok(false);
    }
    Ok(s.children(u)?.iter().any(|&c| {
        let d = s.tokens()[c].dep.to_lowercase();
        d == "attr" || d == "acomp"
    }))
}

/// Candidate pairs for trigger anchor `v`, skipping `v` itself and any token
/// in `exclude` (the rest of the trigger span).
pub fn candidate_pairs(
    s: &ParsedSentence,
    v: usize,
    exclude: &[usize],
) -> Result<Vec<CandidatePair>, FeatureError> {
    candidate_headwords(s)
        .into_iter()
        .filter(|&u| u != v && !exclude.contains(&u))
        .map(|u| generate_features(s, v, u).map(|features| CandidatePair { v, u, features }))
        .collect()
}

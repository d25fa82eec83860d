//! Rule-based extraction of ⟨cause, trigger, effect⟩ triplets from
//! dependency-parsed sentences, with an evaluation harness.
//!
//! Pipeline: [`conllu`] ingest → [`lexicon`] trigger lookup →
//! [`features`] pair features → [`rules`] decision list →
//! [`extract`] phrase expansion and triplet assembly → [`eval`].

pub mod conllu;
pub mod eval;
pub mod extract;
pub mod features;
pub mod lexicon;
pub mod rules;
pub mod tree;

pub use conllu::{parse_conllu, parse_conllu_str, Corpus, Diagnostic, ReadOptions};
pub use eval::{
    content_words, evaluate, kb_novel_triplets, strict_lenient_precision, triplet_matches_gold,
    EvalReport, GoldPredication, ScoreRecord,
};
pub use extract::{
    expand_phrase, extract_negation, extract_sentence, extract_uncertainty, form_triplets,
    CETriplet, ExpansionConfig, Extractor, Phrase, RunSummary,
};
pub use features::{candidate_headwords, generate_features, FeatureSet};
pub use lexicon::{Lexicon, LexiconEntry, TriggerClass, TriggerMatch};
pub use rules::{classify_pair, load_rules, rule_matches, Label, PairLabel, Rule, RuleSet};
pub use tree::{DepPath, ParsedSentence, Token};

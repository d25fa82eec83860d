//! Reading and writing CoNLL-U.
//!
//! Token IDs are converted to 0-based indices on read and back to 1-based on
//! write. Multiword-token ranges (`3-4`) and empty nodes (`5.1`) are skipped.
//! Comment lines of the form `# sent_id = ...`, `# newdoc id = ...` and
//! `# text = ...` populate sentence metadata. A `# parser = ...` comment
//! records the label scheme of the file. Other comments are ignored.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::BufRead;

use log::warn;
use thiserror::Error;

use crate::tree::{ParsedSentence, Token, TreeError};

#[derive(Debug, Error)]
pub enum ConlluError {
    #[error("line {line}: expected 10 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: invalid {column} value `{value}`")]
    BadField {
        line: usize,
        column: &'static str,
        value: String,
    },
    #[error("line {line}: HEAD {head} refers to a token that does not exist")]
    DanglingHead { line: usize, head: usize },
    #[error("line {line}: sentence `{sent_id}`: {source}")]
    Tree {
        line: usize,
        sent_id: String,
        source: TreeError,
    },
    #[error("line {line}: duplicate sentence id `{sent_id}` in document `{doc_id}`")]
    DuplicateSentence {
        line: usize,
        doc_id: String,
        sent_id: String,
    },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// A sentence that failed tree validation and was dropped in lenient mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub doc_id: String,
    pub sent_id: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub sentences: Vec<ParsedSentence>,
}

/// An ordered collection of documents, as read from one or more files.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub source_path: String,
    /// Value of the first `# parser =` comment, if any.
    pub parser: Option<String>,
}

impl Corpus {
    pub fn sentences(&self) -> impl Iterator<Item = &ParsedSentence> {
        self.documents.iter().flat_map(|d| d.sentences.iter())
    }

    pub fn sentence_count(&self) -> usize {
        self.documents.iter().map(|d| d.sentences.len()).sum()
    }

    /// Appends another corpus. Sentence identity is not re-checked across the
    /// two; use distinct document ids per file.
    pub fn extend(&mut self, other: Corpus) {
        if self.source_path.is_empty() {
            self.source_path = other.source_path;
        } else if !other.source_path.is_empty() {
            self.source_path.push(';');
            self.source_path.push_str(&other.source_path);
        }
        match (&self.parser, other.parser) {
            (None, p) => self.parser = p,
            (Some(a), Some(b)) if *a != b => {
                warn!("mixing parses from `{a}` and `{b}`");
            }
            _ => {}
        }
        self.documents.extend(other.documents);
    }
}

#[derive(Debug, Clone)]
pub struct ReadOptions {
    /// Turn tree-validation failures into hard errors instead of skipping.
    pub strict: bool,
    /// Document id used until the first `# newdoc` comment.
    pub default_doc_id: String,
    pub source_path: String,
}

impl Default for ReadOptions {
    fn default() -> Self {
        ReadOptions {
            strict: false,
            default_doc_id: "doc".to_string(),
            source_path: String::new(),
        }
    }
}

struct RawRow {
    line: usize,
    id: usize,
    form: String,
    lemma: String,
    upos: String,
    xpos: String,
    head: usize,
    deprel: String,
}

#[derive(Default)]
struct Block {
    first_line: usize,
    sent_id: Option<String>,
    text: Option<String>,
    rows: Vec<RawRow>,
}

struct Reader {
    opts: ReadOptions,
    corpus: Corpus,
    diagnostics: Vec<Diagnostic>,
    seen: HashSet<(String, String)>,
    auto_doc: usize,
}

impl Reader {
    fn current_doc(&mut self) -> &mut Document {
        if self.corpus.documents.is_empty() {
            self.corpus.documents.push(Document {
                doc_id: self.opts.default_doc_id.clone(),
                sentences: Vec::new(),
            });
        }
        self.corpus.documents.last_mut().unwrap()
    }

    fn new_doc(&mut self, id: Option<String>) {
        let doc_id = id.unwrap_or_else(|| {
            self.auto_doc += 1;
            format!("{}-{}", self.opts.default_doc_id, self.auto_doc)
        });
        // An empty default document that never received a sentence is replaced.
        if let Some(last) = self.corpus.documents.last() {
            if last.sentences.is_empty() && last.doc_id == self.opts.default_doc_id {
                self.corpus.documents.pop();
            }
        }
        self.corpus.documents.push(Document {
            doc_id,
            sentences: Vec::new(),
        });
    }

    fn finish_block(&mut self, block: Block) -> Result<(), ConlluError> {
        if block.rows.is_empty() {
            return Ok(());
        }
        let position = self.current_doc().sentences.len() + 1;
        let doc_id = self.current_doc().doc_id.clone();
        let sent_id = block.sent_id.unwrap_or_else(|| format!("s{position}"));

        if !self.seen.insert((doc_id.clone(), sent_id.clone())) {
            return Err(ConlluError::DuplicateSentence {
                line: block.first_line,
                doc_id,
                sent_id,
            });
        }

        match build_sentence(&block.rows, &sent_id, &doc_id) {
            Ok(mut s) => {
                s.raw_text = block.text;
                self.current_doc().sentences.push(s);
                Ok(())
            }
            Err(e) => {
                if self.opts.strict {
                    return Err(e);
                }
                let (line, message) = match &e {
                    ConlluError::DanglingHead { line, .. } | ConlluError::Tree { line, .. } => {
                        (*line, e.to_string())
                    }
                    _ => (block.first_line, e.to_string()),
                };
                warn!("skipping sentence {doc_id}/{sent_id}: {message}");
                self.diagnostics.push(Diagnostic {
                    line,
                    doc_id,
                    sent_id,
                    message,
                });
                Ok(())
            }
        }
    }
}

fn build_sentence(
    rows: &[RawRow],
    sent_id: &str,
    doc_id: &str,
) -> Result<ParsedSentence, ConlluError> {
    let n = rows.len();
    let mut tokens = Vec::with_capacity(n);
    for (pos, row) in rows.iter().enumerate() {
        if row.id != pos + 1 {
            return Err(ConlluError::BadField {
                line: row.line,
                column: "ID",
                value: format!("{} (expected {})", row.id, pos + 1),
            });
        }
        if row.head > n {
            return Err(ConlluError::DanglingHead {
                line: row.line,
                head: row.head,
            });
        }
        let head = if row.head == 0 {
            None
        } else {
            Some(row.head - 1)
        };
        let lemma = if row.lemma == "_" {
            row.form.to_lowercase()
        } else {
            row.lemma.clone()
        };
        let pos_fine = if row.xpos == "_" {
            row.upos.clone()
        } else {
            row.xpos.clone()
        };
        tokens.push(Token::new(
            pos,
            row.form.clone(),
            lemma,
            pos_fine,
            row.upos.clone(),
            head,
            row.deprel.clone(),
        ));
    }
    ParsedSentence::new(tokens, sent_id, doc_id).map_err(|source| {
        let line = match &source {
            TreeError::SelfLoop { index }
            | TreeError::Cycle { index }
            | TreeError::DanglingHead { index, .. }
            | TreeError::NonContiguous {
                position: index, ..
            } => rows[*index].line,
            TreeError::MultipleRoots(r) => rows[r[1]].line,
            _ => rows[0].line,
        };
        ConlluError::Tree {
            line,
            sent_id: sent_id.to_string(),
            source,
        }
    })
}

fn comment_value<'a>(comment: &'a str, key: &str) -> Option<&'a str> {
    let rest = comment.strip_prefix(key)?;
    let rest = rest.trim_start();
    if rest.is_empty() {
        return Some("");
    }
    rest.strip_prefix('=').map(str::trim)
}

/// Reads a CoNLL-U stream. Returns the corpus plus diagnostics for sentences
/// skipped in lenient mode.
pub fn parse_conllu<R: BufRead>(
    input: R,
    opts: &ReadOptions,
) -> Result<(Corpus, Vec<Diagnostic>), ConlluError> {
    let mut reader = Reader {
        opts: opts.clone(),
        corpus: Corpus {
            documents: Vec::new(),
            source_path: opts.source_path.clone(),
            parser: None,
        },
        diagnostics: Vec::new(),
        seen: HashSet::new(),
        auto_doc: 0,
    };
    let mut block = Block::default();

    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            let done = std::mem::take(&mut block);
            reader.finish_block(done)?;
            continue;
        }
        if block.first_line == 0 {
            block.first_line = line_no;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(id) = comment_value(comment, "newdoc id") {
                reader.new_doc(Some(id.to_string()).filter(|s| !s.is_empty()));
            } else if comment == "newdoc" {
                reader.new_doc(None);
            } else if let Some(id) = comment_value(comment, "sent_id") {
                block.sent_id = Some(id.to_string());
            } else if let Some(text) = comment_value(comment, "text") {
                block.text = Some(text.to_string());
            } else if let Some(p) = comment_value(comment, "parser") {
                reader.corpus.parser.get_or_insert_with(|| p.to_string());
            }
            continue;
        }

        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(ConlluError::ColumnCount {
                line: line_no,
                found: cols.len(),
            });
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let id: usize = cols[0].parse().map_err(|_| ConlluError::BadField {
            line: line_no,
            column: "ID",
            value: cols[0].to_string(),
        })?;
        let head: usize = cols[6].parse().map_err(|_| ConlluError::BadField {
            line: line_no,
            column: "HEAD",
            value: cols[6].to_string(),
        })?;
        block.rows.push(RawRow {
            line: line_no,
            id,
            form: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos: cols[3].to_string(),
            xpos: cols[4].to_string(),
            head,
            deprel: cols[7].to_string(),
        });
    }
    reader.finish_block(block)?;

    let Reader {
        corpus,
        diagnostics,
        ..
    } = reader;
    Ok((corpus, diagnostics))
}

/// Convenience wrapper for in-memory text.
pub fn parse_conllu_str(
    input: &str,
    opts: &ReadOptions,
) -> Result<(Corpus, Vec<Diagnostic>), ConlluError> {
    parse_conllu(input.as_bytes(), opts)
}

/// Serializes one sentence as a CoNLL-U block (no trailing blank line).
pub fn write_sentence(s: &ParsedSentence) -> String {
    let mut out = String::new();
    writeln!(out, "# sent_id = {}", s.sent_id).unwrap();
    if let Some(text) = &s.raw_text {
        writeln!(out, "# text = {text}").unwrap();
    }
    for t in s.tokens() {
        let head = t.head.map_or(0, |h| h + 1);
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t_\t{}\t{}\t_\t_",
            t.index + 1,
            t.text,
            t.lemma,
            t.pos_gen,
            t.pos,
            head,
            t.dep
        )
        .unwrap();
    }
    out
}

/// Serializes a corpus so that [`parse_conllu`] reproduces it.
pub fn write_conllu(corpus: &Corpus) -> String {
    let mut out = String::new();
    if let Some(p) = &corpus.parser {
        writeln!(out, "# parser = {p}").unwrap();
    }
    for doc in &corpus.documents {
        writeln!(out, "# newdoc id = {}", doc.doc_id).unwrap();
        for s in &doc.sentences {
            out.push_str(&write_sentence(s));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "# sent_id = a\n\
1\tPEDV\tPEDV\tPROPN\tNNP\t_\t2\tnsubj\t_\t_\n\
2\tspreads\tspread\tVERB\tVBZ\t_\t0\tROOT\t_\t_\n";

    #[test]
    fn maps_columns() {
        let (c, d) = parse_conllu_str(TWO, &ReadOptions::default()).unwrap();
        assert!(d.is_empty());
        let s = &c.documents[0].sentences[0];
        assert_eq!(s.sent_id, "a");
        assert_eq!(s.doc_id, "doc");
        let t = &s.tokens()[0];
        assert_eq!(
            (
                t.index,
                t.text.as_str(),
                t.pos.as_str(),
                t.pos_gen.as_str(),
                t.head
            ),
            (0, "PEDV", "NNP", "PROPN", Some(1))
        );
        assert_eq!(t.dep, "nsubj");
        assert_eq!(s.children(1).unwrap(), &[0]);
    }

    #[test]
    fn skips_ranges_and_empty_nodes() {
        let src = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n\
1\tdo\tdo\tAUX\tVBP\t_\t2\taux\t_\t_\n\
2\tn't\tnot\tPART\tRB\t_\t0\troot\t_\t_\n\
2.1\tgo\tgo\tVERB\tVB\t_\t_\t_\t_\t_\n";
        let (c, _) = parse_conllu_str(src, &ReadOptions::default()).unwrap();
        assert_eq!(c.documents[0].sentences[0].len(), 2);
    }

    #[test]
    fn missing_lemma_falls_back_to_lowercased_form() {
        let src = "1\tCells\t_\tNOUN\tNNS\t_\t0\troot\t_\t_\n";
        let (c, _) = parse_conllu_str(src, &ReadOptions::default()).unwrap();
        assert_eq!(c.documents[0].sentences[0].tokens()[0].lemma, "cells");
    }

    #[test]
    fn column_count_error_has_line() {
        let src = "# sent_id = x\n1\tA\ta\tNOUN\n";
        match parse_conllu_str(src, &ReadOptions::default()) {
            Err(ConlluError::ColumnCount { line: 2, found: 4 }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dangling_head_strict_and_lenient() {
        let src = "# sent_id = bad\n\
1\ta\ta\tNOUN\tNN\t_\t2\tnsubj\t_\t_\n\
2\tb\tb\tVERB\tVB\t_\t0\troot\t_\t_\n\
3\tc\tc\tNOUN\tNN\t_\t9\tdobj\t_\t_\n\
4\td\td\tNOUN\tNN\t_\t2\tdobj\t_\t_\n\
5\te\te\tNOUN\tNN\t_\t2\tdobj\t_\t_\n\
\n\
# sent_id = good\n\
1\tx\tx\tNOUN\tNN\t_\t0\troot\t_\t_\n";
        let strict = ReadOptions {
            strict: true,
            ..ReadOptions::default()
        };
        match parse_conllu_str(src, &strict) {
            Err(ConlluError::DanglingHead { line: 4, head: 9 }) => {}
            other => panic!("{other:?}"),
        }
        let (c, d) = parse_conllu_str(src, &ReadOptions::default()).unwrap();
        assert_eq!(c.sentence_count(), 1);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].line, 4);
        assert_eq!(d[0].sent_id, "bad");
    }

    #[test]
    fn cycle_reported_with_line() {
        let src = "1\ta\ta\tNOUN\tNN\t_\t0\troot\t_\t_\n\
2\tb\tb\tNOUN\tNN\t_\t3\tdep\t_\t_\n\
3\tc\tc\tNOUN\tNN\t_\t2\tdep\t_\t_\n";
        let strict = ReadOptions {
            strict: true,
            ..ReadOptions::default()
        };
        match parse_conllu_str(src, &strict) {
            Err(ConlluError::Tree {
                line: 2,
                source: TreeError::Cycle { .. },
                ..
            }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_sent_id_is_error_even_when_lenient() {
        let src = format!("{TWO}\n{TWO}");
        match parse_conllu_str(&src, &ReadOptions::default()) {
            Err(ConlluError::DuplicateSentence { line: 5, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn newdoc_and_auto_ids() {
        let body = "1\tx\tx\tNOUN\tNN\t_\t0\troot\t_\t_\n";
        let src = format!("# newdoc id = d1\n{body}\n{body}\n# newdoc id = d2\n{body}");
        let (c, _) = parse_conllu_str(&src, &ReadOptions::default()).unwrap();
        let ids: Vec<(String, Vec<String>)> = c
            .documents
            .iter()
            .map(|d| {
                (
                    d.doc_id.clone(),
                    d.sentences.iter().map(|s| s.sent_id.clone()).collect(),
                )
            })
            .collect();
        assert_eq!(
            ids,
            vec![
                ("d1".to_string(), vec!["s1".to_string(), "s2".to_string()]),
                ("d2".to_string(), vec!["s1".to_string()])
            ]
        );
        assert_eq!(c.documents[1].sentences[0].doc_id, "d2");
    }

    #[test]
    fn empty_input_is_empty_corpus() {
        let (c, d) = parse_conllu_str("", &ReadOptions::default()).unwrap();
        assert_eq!(c.sentence_count(), 0);
        assert!(d.is_empty());
    }
}

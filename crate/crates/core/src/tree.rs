//! Dependency-parsed sentences and the tree algebra the extractor is built on.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Label reported for the parent of the root token.
pub const ROOT_LABEL: &str = "root";

/// Marker used in serialized paths for a lowest common ancestor that is
/// neither endpoint.
pub const LCA_MARKER: &str = "LCA";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("token index {index} out of range for sentence of {len} tokens")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("token at position {position} has index {index}; indices must be 0..n-1 in order")]
    NonContiguous { position: usize, index: usize },
    #[error("token {index} has head {head}, which does not exist")]
    DanglingHead { index: usize, head: usize },
    #[error("token {index} is its own head")]
    SelfLoop { index: usize },
    #[error("sentence has no root token")]
    NoRoot,
    #[error("sentence has multiple roots: {0:?}")]
    MultipleRoots(Vec<usize>),
    #[error("head chain starting at token {index} contains a cycle")]
    Cycle { index: usize },
    #[error("sentence has no tokens")]
    Empty,
    #[error("path endpoints coincide at token {0}")]
    SamePathEndpoints(usize),
}

/// One token of a dependency-parsed sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub index: usize,
    pub text: String,
    pub lower: String,
    pub lemma: String,
    /// Fine-grained (PTB-style) tag.
    pub pos: String,
    /// Coarse (universal) tag.
    pub pos_gen: String,
    /// `None` for the root token.
    pub head: Option<usize>,
    pub dep: String,
}

impl Token {
    pub fn new(
        index: usize,
        text: impl Into<String>,
        lemma: impl Into<String>,
        pos: impl Into<String>,
        pos_gen: impl Into<String>,
        head: Option<usize>,
        dep: impl Into<String>,
    ) -> Self {
        let text = text.into();
        let lower = text.to_lowercase();
        Token {
            index,
            text,
            lower,
            lemma: lemma.into(),
            pos: pos.into(),
            pos_gen: pos_gen.into(),
            head,
            dep: dep.into(),
        }
    }

    pub fn is_root(&self) -> bool {
        self.head.is_none()
    }

    pub fn lemma_lower(&self) -> String {
        self.lemma.to_lowercase()
    }

    /// Dependency label to the parent, lowercased; `root` for the root.
    pub fn dep_lower(&self) -> String {
        if self.is_root() {
            ROOT_LABEL.to_string()
        } else {
            self.dep.to_lowercase()
        }
    }
}

/// A validated dependency tree over one sentence. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSentence {
    tokens: Vec<Token>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    // lowercased dependency labels
    labels: Vec<String>,
    root: usize,
    pub sent_id: String,
    pub doc_id: String,
    pub raw_text: Option<String>,
}

impl ParsedSentence {
    /// Builds a sentence, rejecting anything that is not a single rooted tree.
    pub fn new(
        tokens: Vec<Token>,
        sent_id: impl Into<String>,
        doc_id: impl Into<String>,
    ) -> Result<Self, TreeError> {
        if tokens.is_empty() {
            return Err(TreeError::Empty);
        }
        let n = tokens.len();
        let mut roots = Vec::new();
        for (position, tok) in tokens.iter().enumerate() {
            if tok.index != position {
                return Err(TreeError::NonContiguous {
                    position,
                    index: tok.index,
                });
            }
            match tok.head {
                None => roots.push(position),
                Some(h) if h >= n => {
                    return Err(TreeError::DanglingHead {
                        index: position,
                        head: h,
                    })
                }
                Some(h) if h == position => return Err(TreeError::SelfLoop { index: position }),
                Some(_) => {}
            }
        }
        let root = match roots.as_slice() {
            [] => return Err(TreeError::NoRoot),
            [r] => *r,
            _ => return Err(TreeError::MultipleRoots(roots)),
        };

        // With exactly one root, every head chain either reaches it or cycles.
        const UNKNOWN: usize = usize::MAX;
        let mut depth = vec![UNKNOWN; n];
        depth[root] = 0;
        for start in 0..n {
            let mut chain = Vec::new();
            let mut cur = start;
            while depth[cur] == UNKNOWN {
                if chain.len() > n {
                    return Err(TreeError::Cycle { index: start });
                }
                chain.push(cur);
                cur = tokens[cur].head.expect("only the root lacks a head");
            }
            let mut d = depth[cur];
            for &node in chain.iter().rev() {
                d += 1;
                depth[node] = d;
            }
        }

        let mut children = vec![Vec::new(); n];
        for tok in &tokens {
            if let Some(h) = tok.head {
                children[h].push(tok.index);
            }
        }

        let labels = tokens.iter().map(|t| t.dep.to_lowercase()).collect();
        Ok(ParsedSentence {
            tokens,
            children,
            depth,
            labels,
            root,
            sent_id: sent_id.into(),
            doc_id: doc_id.into(),
            raw_text: None,
        })
    }

    pub fn with_raw_text(mut self, raw: impl Into<String>) -> Self {
        self.raw_text = Some(raw.into());
        self
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn token(&self, i: usize) -> Result<&Token, TreeError> {
        self.tokens.get(i).ok_or(TreeError::IndexOutOfRange {
            index: i,
            len: self.tokens.len(),
        })
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn head(&self, i: usize) -> Result<Option<usize>, TreeError> {
        Ok(self.token(i)?.head)
    }

    /// Distance from the root (root has depth 0).
    pub fn depth(&self, i: usize) -> Result<usize, TreeError> {
        self.check(i)?;
        Ok(self.depth[i])
    }

    fn check(&self, i: usize) -> Result<(), TreeError> {
        self.token(i).map(|_| ())
    }

    /// Dependents of `i` in ascending index order.
    pub fn children(&self, i: usize) -> Result<&[usize], TreeError> {
        self.check(i)?;
        Ok(&self.children[i])
    }

    /// True iff `a` is a strict ancestor of `d`.
    pub fn is_ancestor(&self, a: usize, d: usize) -> Result<bool, TreeError> {
        self.check(a)?;
        self.check(d)?;
        if self.depth[a] >= self.depth[d] {
            return Ok(false);
        }
        let mut cur = d;
        while self.depth[cur] > self.depth[a] {
            cur = self.tokens[cur].head.expect("non-root has head");
        }
        Ok(cur == a)
    }

    /// Lowest common ancestor, inclusive of the endpoints themselves.
    pub fn lca(&self, a: usize, b: usize) -> Result<usize, TreeError> {
        self.check(a)?;
        self.check(b)?;
        let (mut x, mut y) = (a, b);
        while self.depth[x] > self.depth[y] {
            x = self.tokens[x].head.expect("non-root has head");
        }
        while self.depth[y] > self.depth[x] {
            y = self.tokens[y].head.expect("non-root has head");
        }
        while x != y {
            x = self.tokens[x].head.expect("non-root has head");
            y = self.tokens[y].head.expect("non-root has head");
        }
        Ok(x)
    }

    /// `i` plus its descendants, not descending through any edge whose label
    /// (lowercased) is in `excluded_deps`. `i` itself is never pruned.
    pub fn subtree(
        &self,
        i: usize,
        excluded_deps: &BTreeSet<String>,
    ) -> Result<BTreeSet<usize>, TreeError> {
        self.check(i)?;
        let mut out = BTreeSet::new();
        let mut stack = vec![i];
        while let Some(node) = stack.pop() {
            out.insert(node);
            for &c in &self.children[node] {
                if !excluded_deps.contains(&self.labels[c]) {
                    stack.push(c);
                }
            }
        }
        Ok(out)
    }

    /// The unique tree path from `u` to `v`.
    pub fn dep_path(&self, u: usize, v: usize) -> Result<DepPath, TreeError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(TreeError::SamePathEndpoints(u));
        }
        let lca = self.lca(u, v)?;

        let (up, down) = (
            self.depth[u] - self.depth[lca],
            self.depth[v] - self.depth[lca],
        );
        let mut up_edges = Vec::with_capacity(up);
        let mut up_nodes = Vec::with_capacity(up + down);
        let mut cur = u;
        while cur != lca {
            up_edges.push(self.labels[cur].clone());
            if cur != u {
                up_nodes.push(cur);
            }
            cur = self.tokens[cur].head.expect("below lca");
        }

        let mut down_edges = Vec::with_capacity(down);
        let mut down_nodes = Vec::with_capacity(down);
        let mut cur = v;
        while cur != lca {
            down_edges.push(self.labels[cur].clone());
            if cur != v {
                down_nodes.push(cur);
            }
            cur = self.tokens[cur].head.expect("below lca");
        }
        down_edges.reverse();
        down_nodes.reverse();

        let mut intermediate_nodes = up_nodes;
        if lca != u && lca != v {
            intermediate_nodes.push(lca);
        }
        intermediate_nodes.extend(down_nodes);

        Ok(DepPath {
            up_edges,
            down_edges,
            intermediate_nodes,
        })
    }
}

/// A path between two tokens as the labels climbed from `u` up to the
/// lowest common ancestor, then descended to `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DepPath {
    pub up_edges: Vec<String>,
    pub down_edges: Vec<String>,
    /// Tokens strictly between `u` and `v`, in path order.
    pub intermediate_nodes: Vec<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed dependency path `{0}`")]
pub struct PathSyntaxError(pub String);

impl DepPath {
    /// True when the lowest common ancestor is neither endpoint.
    pub fn has_inner_lca(&self) -> bool {
        !self.up_edges.is_empty() && !self.down_edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.up_edges.len() + self.down_edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Serializes as `u<a<b<LCA>c>d>v`; the `LCA` marker only appears when
    /// both directions are present. Labels are lowercased.
    pub fn serialize(&self) -> String {
        let mut s = String::from("u");
        if !self.up_edges.is_empty() {
            s.push('<');
            for e in &self.up_edges {
                push_lower(&mut s, e);
                s.push('<');
            }
        }
        if self.has_inner_lca() {
            s.push_str(LCA_MARKER);
        }
        if !self.down_edges.is_empty() {
            s.push('>');
            for e in &self.down_edges {
                push_lower(&mut s, e);
                s.push('>');
            }
        }
        s.push('v');
        s
    }

    /// Inverse of [`DepPath::serialize`] for the edge-label sequences.
    /// Intermediate nodes are not recoverable and come back empty.
    pub fn parse(s: &str) -> Result<DepPath, PathSyntaxError> {
        let err = || PathSyntaxError(s.to_string());
        let middle = s
            .strip_prefix('u')
            .and_then(|m| m.strip_suffix('v'))
            .ok_or_else(err)?;
        let labels = |part: &str, sep: char| -> Result<Vec<String>, PathSyntaxError> {
            // part looks like `<a<b<` (or with `>`)
            let inner = part
                .strip_prefix(sep)
                .and_then(|p| p.strip_suffix(sep))
                .ok_or_else(err)?;
            inner
                .split(sep)
                .map(|l| {
                    if l.is_empty() || l.contains(['<', '>']) {
                        Err(err())
                    } else {
                        Ok(l.to_lowercase())
                    }
                })
                .collect()
        };
        let marker = format!("<{LCA_MARKER}>");
        let (up_edges, down_edges) = if let Some(pos) = middle.find(&marker) {
            let up = &middle[..pos + 1];
            let down = &middle[pos + marker.len() - 1..];
            (labels(up, '<')?, labels(down, '>')?)
        } else if middle.starts_with('<') {
            (labels(middle, '<')?, Vec::new())
        } else if middle.starts_with('>') {
            (Vec::new(), labels(middle, '>')?)
        } else {
            return Err(err());
        };
        Ok(DepPath {
            up_edges,
            down_edges,
            intermediate_nodes: Vec::new(),
        })
    }
}

fn push_lower(s: &mut String, label: &str) {
    if label.chars().any(char::is_uppercase) {
        s.push_str(&label.to_lowercase());
    } else {
        s.push_str(label);
    }
}

impl fmt::Display for DepPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

//! Shared helpers for integration tests: fixture loading, tree enumeration,
//! brute-force oracles, a synthetic corpus generator and the property suites.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::path::PathBuf;

use causex::conllu::{Document, ReadOptions};
use causex::extract::{extract_sentence_detailed, ExpansionConfig};
use causex::features::{candidate_headwords, generate_features, FeatureSet};
use causex::rules::{Label, PairLabel, Rule, RuleSet};
use causex::{parse_conllu_str, Corpus, Lexicon, ParsedSentence, Token};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(format!("{name}.conllu"))
}

/// Reads a fixture in strict mode.
pub fn fixture(name: &str) -> Corpus {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    let opts = ReadOptions {
        strict: true,
        ..ReadOptions::default()
    };
    let (corpus, diags) = parse_conllu_str(&text, &opts).expect("fixture parses");
    assert!(diags.is_empty());
    corpus
}

pub fn fixture_sentence(name: &str) -> ParsedSentence {
    fixture(name).sentences().next().unwrap().clone()
}

pub fn index_of(s: &ParsedSentence, word: &str) -> usize {
    s.tokens()
        .iter()
        .position(|t| t.text == word)
        .unwrap_or_else(|| panic!("`{word}` not in sentence"))
}

pub const FIXTURES: [&str; 7] = [
    "produced_lines",
    "pedv",
    "mmulv",
    "negation",
    "uncertainty",
    "scored_headwords",
    "calcitonin",
];

// ---------------------------------------------------------------------------
// Tree shapes

/// Calls `f` with the parent array of every ordered rooted tree on `n` nodes,
/// numbered in preorder (node 0 is the root).
pub fn for_each_plane_tree(n: usize, f: &mut impl FnMut(&[Option<usize>])) {
    // each tree is a Dyck word of n-1 opening steps
    fn go(
        n: usize,
        parents: &mut Vec<Option<usize>>,
        stack: &mut Vec<usize>,
        f: &mut impl FnMut(&[Option<usize>]),
    ) {
        if parents.len() == n {
            f(parents);
            return;
        }
        // open: new child of the stack top
        let top = *stack.last().unwrap();
        let id = parents.len();
        parents.push(Some(top));
        stack.push(id);
        go(n, parents, stack, f);
        stack.pop();
        parents.pop();
        // close: return to the grandparent, if any
        if stack.len() > 1 {
            let popped = stack.pop().unwrap();
            go(n, parents, stack, f);
            stack.push(popped);
        }
    }
    if n == 0 {
        return;
    }
    let mut parents = vec![None];
    let mut stack = vec![0];
    go(n, &mut parents, &mut stack, f);
}

/// The same shape with node `i` renamed to `n - 1 - i`.
pub fn reversed(parents: &[Option<usize>]) -> Vec<Option<usize>> {
    let n = parents.len();
    (0..n)
        .map(|i| parents[n - 1 - i].map(|p| n - 1 - p))
        .collect()
}

/// Uniform random recursive tree on a random index order.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> Vec<Option<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut parents = vec![None; n];
    for k in 1..n {
        parents[order[k]] = Some(order[rng.gen_range(0..k)]);
    }
    parents
}

pub fn sentence_from(
    parents: &[Option<usize>],
    mut token: impl FnMut(usize) -> (String, String, String, String, String),
) -> ParsedSentence {
    let toks = parents
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let (w, l, pos, upos, dep) = token(i);
            let dep = if h.is_none() { "ROOT".to_string() } else { dep };
            Token::new(i, &w, &l, &pos, &upos, h, &dep)
        })
        .collect();
    ParsedSentence::new(toks, "t", "d").expect("valid tree")
}

// ---------------------------------------------------------------------------
// Oracles

pub fn chain(parents: &[Option<usize>], mut x: usize) -> Vec<usize> {
    let mut out = vec![x];
    while let Some(p) = parents[x] {
        out.push(p);
        x = p;
    }
    out
}

pub fn oracle_lca(parents: &[Option<usize>], a: usize, b: usize) -> usize {
    let up: BTreeSet<usize> = chain(parents, a).into_iter().collect();
    chain(parents, b)
        .into_iter()
        .find(|x| up.contains(x))
        .unwrap()
}

/// Breadth-first predecessor table from `u` over the undirected tree.
pub fn bfs_prev(parents: &[Option<usize>], u: usize) -> Vec<usize> {
    let n = parents.len();
    let mut adj = vec![Vec::new(); n];
    for (c, p) in parents.iter().enumerate() {
        if let Some(p) = *p {
            adj[c].push(p);
            adj[p].push(c);
        }
    }
    let mut prev = vec![usize::MAX; n];
    let mut q = VecDeque::from([u]);
    prev[u] = u;
    while let Some(x) = q.pop_front() {
        for &y in &adj[x] {
            if prev[y] == usize::MAX {
                prev[y] = x;
                q.push_back(y);
            }
        }
    }
    prev
}

fn path_from_prev(
    s: &ParsedSentence,
    parents: &[Option<usize>],
    prev: &[usize],
    u: usize,
    v: usize,
) -> (Vec<String>, Vec<String>, Vec<usize>) {
    let mut nodes = vec![v];
    while *nodes.last().unwrap() != u {
        nodes.push(prev[*nodes.last().unwrap()]);
    }
    nodes.reverse();
    let (mut up, mut down) = (Vec::new(), Vec::new());
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        if parents[a] == Some(b) {
            assert!(down.is_empty(), "path goes up after going down");
            up.push(s.tokens()[a].dep.to_lowercase());
        } else {
            down.push(s.tokens()[b].dep.to_lowercase());
        }
    }
    (up, down, nodes[1..nodes.len() - 1].to_vec())
}

/// Allocation-free comparison of `p` with the search path from `u` to `v`.
fn path_agrees(
    p: &causex::DepPath,
    labels: &[String],
    parents: &[Option<usize>],
    prev: &[usize],
    u: usize,
    v: usize,
) -> bool {
    // walk back from v: down-edges in reverse, then up-edges in reverse
    let (mut down, mut up, mut mid) = (
        p.down_edges.len(),
        p.up_edges.len(),
        p.intermediate_nodes.len(),
    );
    let mut x = v;
    while x != u {
        let y = prev[x];
        if parents[x] == Some(y) {
            // y is x's parent, so walking v -> u this is a down-edge into x
            if up != p.up_edges.len() || down == 0 || p.down_edges[down - 1] != labels[x] {
                return false;
            }
            down -= 1;
        } else {
            if down != 0 || up == 0 || p.up_edges[up - 1] != labels[y] {
                return false;
            }
            up -= 1;
        }
        if y != u {
            if mid == 0 || p.intermediate_nodes[mid - 1] != y {
                return false;
            }
            mid -= 1;
        }
        x = y;
    }
    down == 0 && up == 0 && mid == 0
}

/// Tree path from `u` to `v` found by search rather than by ancestry.
pub fn oracle_path(
    s: &ParsedSentence,
    parents: &[Option<usize>],
    u: usize,
    v: usize,
) -> (Vec<String>, Vec<String>, Vec<usize>) {
    path_from_prev(s, parents, &bfs_prev(parents, u), u, v)
}

/// Descendants of `i` (inclusive) reachable without crossing an excluded label.
pub fn oracle_subtree(
    s: &ParsedSentence,
    parents: &[Option<usize>],
    i: usize,
    excluded: &BTreeSet<String>,
) -> BTreeSet<usize> {
    (0..parents.len())
        .filter(|&x| {
            let c = chain(parents, x);
            match c.iter().position(|&y| y == i) {
                None => false,
                Some(k) => c[..k]
                    .iter()
                    .all(|&y| !excluded.contains(&s.tokens()[y].dep.to_lowercase())),
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Suites. Each returns the number of checks performed.

const ALGEBRA_LABELS: [&str; 8] = [
    "nsubj", "dobj", "prep", "pobj", "punct", "appos", "advcl", "amod",
];

fn algebra_sentence(parents: &[Option<usize>]) -> ParsedSentence {
    sentence_from(parents, |i| {
        let p = parents[i].unwrap_or(0);
        let dep = ALGEBRA_LABELS[(i * 5 + p * 3) % ALGEBRA_LABELS.len()];
        (
            format!("w{i}"),
            format!("w{i}"),
            "NN".into(),
            "NOUN".into(),
            dep.into(),
        )
    })
}

fn exclusion_chain() -> Vec<BTreeSet<String>> {
    let sets: [&[&str]; 4] = [
        &[],
        &["punct"],
        &["punct", "appos", "advcl"],
        &ALGEBRA_LABELS,
    ];
    sets.iter()
        .map(|s| s.iter().map(|x| x.to_string()).collect())
        .collect()
}

/// Packs the edge labels of the u-v path (four bits each, `up` side first,
/// then a 15 separator) so each label sequence is round-tripped once.
fn path_key(cu: &[usize], cv: &[usize], lca: usize, ids: &[u64]) -> u64 {
    let mut key = 0u64;
    for &x in cu.iter().take_while(|&&x| x != lca) {
        key = key << 4 | ids[x];
    }
    key = key << 4 | 15;
    let down: Vec<usize> = cv.iter().copied().take_while(|&x| x != lca).collect();
    for &x in down.iter().rev() {
        key = key << 4 | ids[x];
    }
    key
}

fn check_algebra(
    parents: &[Option<usize>],
    excl: &[BTreeSet<String>],
    verified_paths: Option<&mut HashSet<u64>>,
) -> Result<usize, String> {
    let mut verified_paths = verified_paths;
    let s = algebra_sentence(parents);
    let n = parents.len();
    let chains: Vec<Vec<usize>> = (0..n).map(|x| chain(parents, x)).collect();
    let labels: Vec<String> = s.tokens().iter().map(|t| t.dep.to_lowercase()).collect();
    let label_ids: Vec<u64> = labels
        .iter()
        .map(|l| {
            ALGEBRA_LABELS
                .iter()
                .position(|a| a == l)
                .map_or(0, |k| k as u64 + 1)
        })
        .collect();
    let masks: Vec<Vec<bool>> = excl
        .iter()
        .map(|e| labels.iter().map(|l| e.contains(l)).collect())
        .collect();
    let mut checks = 0;
    for u in 0..n {
        let prev = bfs_prev(parents, u);
        for v in 0..n {
            let want = chains[v]
                .iter()
                .copied()
                .find(|x| chains[u].contains(x))
                .unwrap();
            let got = s.lca(u, v).map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!(
                    "lca({u},{v}) = {got}, oracle {want} in {parents:?}"
                ));
            }
            let anc = s.is_ancestor(u, v).unwrap();
            if anc != (u != v && chains[v].contains(&u)) {
                return Err(format!("is_ancestor({u},{v}) wrong in {parents:?}"));
            }
            checks += 2;
            if u == v {
                continue;
            }
            let p = s.dep_path(u, v).map_err(|e| e.to_string())?;
            if !path_agrees(&p, &labels, parents, &prev, u, v) {
                let oracle = path_from_prev(&s, parents, &prev, u, v);
                return Err(format!("dep_path({u},{v}) = {p:?}, oracle {oracle:?}"));
            }
            let Some(verified_paths) = verified_paths.as_deref_mut() else {
                checks += 1;
                continue;
            };
            if verified_paths.insert(path_key(&chains[u], &chains[v], want, &label_ids)) {
                let text = p.serialize();
                let back = causex::DepPath::parse(&text).map_err(|e| format!("{text}: {e:?}"))?;
                if back.up_edges != p.up_edges
                    || back.down_edges != p.down_edges
                    || back.serialize() != text
                {
                    return Err(format!("path `{text}` does not round-trip"));
                }
            }
            checks += 2;
        }
        let mut prev_set: Option<BTreeSet<usize>> = None;
        for (e, mask) in excl.iter().zip(&masks) {
            let got = s.subtree(u, e).unwrap();
            let want = (0..n).filter(|&x| match chains[x].iter().position(|&y| y == u) {
                None => false,
                Some(k) => chains[x][..k].iter().all(|&y| !mask[y]),
            });
            if !got.iter().copied().eq(want) {
                return Err(format!("subtree({u}, {e:?}) = {got:?} in {parents:?}"));
            }
            if let Some(p) = &prev_set {
                if !got.is_subset(p) {
                    return Err(format!("subtree({u}) grew when excluding {e:?}"));
                }
            }
            prev_set = Some(got);
            checks += 2;
        }
    }
    Ok(checks)
}

/// Tree algebra against the oracles on every tree shape up to `max_n`
/// nodes, under preorder and reversed numbering.
pub fn suite_tree_algebra(max_n: usize) -> Result<usize, String> {
    let excl = exclusion_chain();
    let mut verified = HashSet::new();
    let mut checks = 0;
    let mut err = None;
    for n in 1..=max_n {
        for_each_plane_tree(n, &mut |parents| {
            if err.is_some() {
                return;
            }
            // serialization does not depend on numbering, so round-trip once
            let runs = [
                check_algebra(parents, &excl, Some(&mut verified)),
                check_algebra(&reversed(parents), &excl, None),
            ];
            for r in runs {
                match r {
                    Ok(c) => checks += c,
                    Err(e) => err = Some(e),
                }
            }
        });
    }
    err.map_or(Ok(checks), Err)
}

const FEATURE_POOL: usize = 10;

fn pool_feature(k: usize) -> String {
    format!("v.text.w{k}")
}

fn random_rule(rng: &mut impl Rng, id: usize) -> Rule {
    let mut ids: Vec<usize> = (0..FEATURE_POOL).collect();
    ids.shuffle(rng);
    let (a, o, g) = (
        rng.gen_range(1..=2),
        rng.gen_range(0..=2),
        rng.gen_range(0..=2),
    );
    let take = |r: std::ops::Range<usize>| r.map(|k| pool_feature(ids[k])).collect::<BTreeSet<_>>();
    Rule {
        id: format!("R{id}"),
        label: if rng.gen_bool(0.5) {
            Label::Cause
        } else {
            Label::Effect
        },
        and_set: take(0..a),
        or_set: take(a..a + o),
        neg_set: take(a + o..a + o + g),
        priority: id,
    }
}

fn random_features(rng: &mut impl Rng) -> FeatureSet {
    (0..FEATURE_POOL)
        .filter(|_| rng.gen_bool(0.5))
        .map(pool_feature)
        .collect()
}

fn oracle_match(r: &Rule, f: &FeatureSet) -> bool {
    let has = |x: &String| f.iter().any(|y| y == x);
    r.and_set.iter().all(has)
        && (r.or_set.is_empty() || r.or_set.iter().any(has))
        && r.neg_set.iter().all(|x| !has(x))
}

fn to_pair_label(r: Option<&Rule>) -> PairLabel {
    match r {
        None => PairLabel::Other,
        Some(r) if r.label == Label::Cause => PairLabel::Cause(r.id.clone()),
        Some(r) => PairLabel::Effect(r.id.clone()),
    }
}

/// First-match-wins, determinism, truncation, swap and NEG monotonicity on
/// random decision lists over a small feature pool.
pub fn suite_decision_list(seed: u64, lists: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0;
    for _ in 0..lists {
        let k = rng.gen_range(1..=12);
        let rules: Vec<Rule> = (0..k).map(|i| random_rule(&mut rng, i)).collect();
        let rs = RuleSet::new(rules.clone()).map_err(|e| e.to_string())?;
        let mut non_other = 0u64;
        for _ in 0..20 {
            let f = random_features(&mut rng);
            let got = rs.classify(&f);
            let first = rules.iter().position(|r| oracle_match(r, &f));
            if got != to_pair_label(first.map(|i| &rules[i])) {
                return Err(format!("classify disagrees with first-match scan on {f}"));
            }
            if got != rs.classify(&f) {
                return Err("classification not deterministic".into());
            }
            non_other += 2 * u64::from(got != PairLabel::Other);
            if let Some(i) = first {
                let cut = RuleSet::new(rules[..=i].to_vec()).unwrap();
                if cut.classify(&f) != got {
                    return Err("dropping later rules changed the label".into());
                }
            }
            for i in 0..k.saturating_sub(1) {
                let both = oracle_match(&rules[i], &f) && oracle_match(&rules[i + 1], &f);
                if !both {
                    let mut swapped = rules.clone();
                    swapped.swap(i, i + 1);
                    let sw = RuleSet::new(swapped).unwrap();
                    if sw.decide(&f).map(|r| r.id.clone()) != rs.decide(&f).map(|r| r.id.clone()) {
                        return Err("swapping non-overlapping rules changed the label".into());
                    }
                }
            }
            for add in 0..FEATURE_POOL {
                let feat = pool_feature(add);
                if f.contains(&feat) {
                    continue;
                }
                let mut g = f.clone();
                g.insert(feat.clone());
                for r in &rules {
                    let (before, after) = (r.matches(&f), r.matches(&g));
                    if before && !after && !r.neg_set.contains(&feat) {
                        return Err(format!("{} lost a match without a NEG feature", r.id));
                    }
                    if !before && after && !(r.and_set.contains(&feat) || r.or_set.contains(&feat))
                    {
                        return Err(format!("{} gained a match without an AND/OR feature", r.id));
                    }
                }
            }
            checks += 1;
        }
        let total: u64 = rs.counts().iter().map(|(_, _, c)| c).sum();
        if total != non_other {
            return Err(format!("counters sum to {total}, expected {non_other}"));
        }
    }
    Ok(checks)
}

const EXTRACT_LABELS: [&str; 14] = [
    "nsubj",
    "dobj",
    "prep",
    "pobj",
    "agent",
    "nsubjpass",
    "punct",
    "appos",
    "advcl",
    "relcl",
    "amod",
    "compound",
    "acl",
    "conj",
];
const EXTRACT_POS: [(&str, &str); 4] = [
    ("NN", "NOUN"),
    ("VBD", "VERB"),
    ("NNP", "PROPN"),
    ("IN", "ADP"),
];

/// A labelled sentence over `parents` with a single `cause` trigger at `trigger`.
pub fn extraction_sentence(parents: &[Option<usize>], trigger: usize) -> ParsedSentence {
    sentence_from(parents, |i| {
        let p = parents[i].unwrap_or(0);
        let dep = EXTRACT_LABELS[(i * 3 + p * 7 + parents.len()) % EXTRACT_LABELS.len()];
        if i == trigger {
            return (
                "caused".into(),
                "cause".into(),
                "VBD".into(),
                "VERB".into(),
                dep.into(),
            );
        }
        let (pos, upos) = EXTRACT_POS[(i + p) % EXTRACT_POS.len()];
        (
            format!("w{i}"),
            format!("w{i}"),
            pos.into(),
            upos.into(),
            dep.into(),
        )
    })
}

/// Checks the extraction invariants on one sentence; returns triplet count.
pub fn check_extraction(
    s: &ParsedSentence,
    lex: &Lexicon,
    rs: &RuleSet,
    cfg: &ExpansionConfig,
    rerun: bool,
) -> Result<usize, String> {
    let out = extract_sentence_detailed(s, lex, rs, cfg).map_err(|e| e.to_string())?;
    if rerun && out != extract_sentence_detailed(s, lex, rs, cfg).map_err(|e| e.to_string())? {
        return Err("extraction not deterministic".into());
    }
    let parents: Vec<Option<usize>> = s.tokens().iter().map(|t| t.head).collect();
    for m in lex.find_triggers(s) {
        let v = m.anchor;
        let (mut uc, mut ue) = (Vec::new(), Vec::new());
        for u in candidate_headwords(s) {
            if m.span.contains(&u) {
                continue;
            }
            let f = generate_features(s, v, u).map_err(|e| e.to_string())?;
            match rs.decide(&f).map(|r| r.label) {
                Some(Label::Cause) => uc.push(u),
                Some(Label::Effect) => ue.push(u),
                None => {}
            }
        }
        let expected = uc
            .iter()
            .flat_map(|c| ue.iter().map(move |e| (*c, *e)))
            .filter(|(c, e)| c != e)
            .count();
        let mine: Vec<_> = out
            .triplets
            .iter()
            .filter(|t| t.trigger.anchor_index == v)
            .collect();
        if mine.len() != expected {
            return Err(format!(
                "trigger {v}: {} triplets, expected {expected} in {parents:?}",
                mine.len()
            ));
        }
        for t in mine {
            for (ph, rule_id, label) in [
                (&t.cause, &t.cause_rule_id, Label::Cause),
                (&t.effect, &t.effect_rule_id, Label::Effect),
            ] {
                if ph.token_indices.iter().any(|i| m.span.contains(i)) {
                    return Err(format!(
                        "phrase {:?} contains the trigger",
                        ph.token_indices
                    ));
                }
                for &x in &ph.token_indices {
                    let c = chain(&parents, x);
                    let Some(k) = c.iter().position(|&y| y == ph.head) else {
                        return Err(format!("token {x} is not under head {}", ph.head));
                    };
                    if c[..k].iter().any(|&y| {
                        cfg.excluded_deps
                            .contains(&s.tokens()[y].dep.to_lowercase())
                    }) {
                        return Err(format!("token {x} crosses an excluded relation"));
                    }
                }
                let f = generate_features(s, v, ph.head).map_err(|e| e.to_string())?;
                let rule = rs.get(rule_id).ok_or("unknown rule id")?;
                if rule.label != label
                    || !rule.matches(&f)
                    || rs.decide(&f).map(|r| &r.id) != Some(rule_id)
                {
                    return Err(format!(
                        "rule {rule_id} does not replay on head {}",
                        ph.head
                    ));
                }
            }
        }
    }
    Ok(out.triplets.len())
}

/// Extraction invariants over every tree shape up to `max_n` nodes, with the
/// trigger placed at each node in turn (cycled per tree). Every 16th tree is
/// extracted twice to check determinism.
pub fn suite_extraction(max_n: usize) -> Result<(usize, usize), String> {
    let lex = Lexicon::builtin();
    let rs = RuleSet::builtin();
    let cfg = ExpansionConfig::default();
    let (mut sentences, mut triplets) = (0, 0);
    let mut err = None;
    let mut k = 0usize;
    for n in 2..=max_n {
        for_each_plane_tree(n, &mut |parents| {
            if err.is_some() {
                return;
            }
            k += 1;
            for p in [parents.to_vec(), reversed(parents)] {
                let s = extraction_sentence(&p, k % n);
                match check_extraction(&s, &lex, &rs, &cfg, k.is_multiple_of(16)) {
                    Ok(t) => {
                        sentences += 1;
                        triplets += t;
                    }
                    Err(e) => err = Some(e),
                }
            }
        });
    }
    err.map_or(Ok((sentences, triplets)), Err)
}

// ---------------------------------------------------------------------------
// Synthetic corpus

const VERBS: [(&str, &str); 11] = [
    ("caused", "cause"),
    ("induces", "induce"),
    ("inhibited", "inhibit"),
    ("produced", "produce"),
    ("blocks", "block"),
    ("altered", "alter"),
    ("lead", "lead"),
    ("showed", "show"),
    ("belongs", "belong"),
    ("reported", "report"),
    ("was", "be"),
];
const NOUNS: [&str; 10] = [
    "virus",
    "disease",
    "cells",
    "apoptosis",
    "protein",
    "mice",
    "infection",
    "therapy",
    "patients",
    "expression",
];
const ADPS: [&str; 6] = ["by", "of", "to", "in", "with", "from"];

fn synthetic_sentence(rng: &mut impl Rng, doc: &str, sent: &str) -> ParsedSentence {
    let n = rng.gen_range(3..=16);
    let parents = random_tree(rng, n);
    let kinds: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
    let mut toks = Vec::with_capacity(n);
    for i in 0..n {
        let parent_kind = parents[i].map(|p| kinds[p]);
        let dep: &str = match parent_kind {
            None => "ROOT",
            Some(0) => [
                "nsubj",
                "dobj",
                "nsubjpass",
                "agent",
                "prep",
                "advcl",
                "neg",
                "aux",
                "attr",
                "acomp",
            ][rng.gen_range(0..10)],
            Some(1) => [
                "amod", "compound", "prep", "appos", "relcl", "acl", "det", "punct",
            ][rng.gen_range(0..8)],
            _ => ["pobj", "pcomp"][rng.gen_range(0..2)],
        };
        let (w, l, pos, upos): (String, String, &str, &str) = match (dep, kinds[i]) {
            ("aux", _) => {
                let w = ["might", "can", "may", "did"][rng.gen_range(0..4)];
                (w.into(), w.into(), "MD", "AUX")
            }
            ("neg", _) => ("not".into(), "not".into(), "RB", "PART"),
            ("punct", _) => (",".into(), ",".into(), ",", "PUNCT"),
            ("det", _) => ("the".into(), "the".into(), "DT", "DET"),
            (_, 0) => {
                let (w, l) = VERBS[rng.gen_range(0..VERBS.len())];
                (w.into(), l.into(), "VBD", "VERB")
            }
            (_, 1) => {
                let w = NOUNS[rng.gen_range(0..NOUNS.len())];
                (w.into(), w.trim_end_matches('s').into(), "NN", "NOUN")
            }
            _ => {
                let w = ADPS[rng.gen_range(0..ADPS.len())];
                (w.into(), w.into(), "IN", "ADP")
            }
        };
        toks.push(Token::new(i, &w, &l, pos, upos, parents[i], dep));
    }
    let text = toks
        .iter()
        .map(|t| t.text.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    ParsedSentence::new(toks, sent, doc)
        .unwrap()
        .with_raw_text(text)
}

/// A reproducible corpus of random but plausible parses.
pub fn synthetic_corpus(seed: u64, sentences: usize) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = Corpus::default();
    let per_doc = 10;
    for d in 0..sentences.div_ceil(per_doc) {
        let doc_id = format!("syn{d}");
        let count = per_doc.min(sentences - d * per_doc);
        let sents = (0..count)
            .map(|k| synthetic_sentence(&mut rng, &doc_id, &format!("syn{d}-{}", k + 1)))
            .collect();
        corpus.documents.push(Document {
            doc_id,
            sentences: sents,
        });
    }
    corpus
}

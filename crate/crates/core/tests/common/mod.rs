#![allow(dead_code)]

use std::collections::HashSet;

use glossrole::rolemodel::{Annotation, Role, RoleSpan};
use glossrole::syntree::{Span, SynTree};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

const PHRASE_LABELS: &[&str] = &["NP", "NP", "NP", "VP", "PP", "SBAR", "S", "ADJP", "ADVP"];
const LEAF_TAGS: &[&str] = &["NN", "NNS", "NNP", "DT", "JJ", "IN", "VB", "VBZ", "RB", "CC", "TO", "CD"];
const WORDS: &[&str] = &["dog", "of", "the", "Red", "run", "quickly", "and", "to", "42", "cat's", "x-ray", "a"];

pub fn random_tree(rng: &mut StdRng, depth: usize) -> SynTree {
    if depth == 0 || rng.gen_bool(0.3) {
        let tag = *LEAF_TAGS.choose(rng).unwrap();
        let word = *WORDS.choose(rng).unwrap();
        return SynTree::leaf(tag, word);
    }
    let label = *PHRASE_LABELS.choose(rng).unwrap();
    let n = rng.gen_range(1..=3);
    let children = (0..n).map(|_| random_tree(rng, depth - 1)).collect();
    SynTree::node(label, children)
}

/// A tree flattened into an arena with parent links.
pub struct Flat<'a> {
    pub nodes: Vec<&'a SynTree>,
    pub parent: Vec<Option<usize>>,
}

pub fn flatten(tree: &SynTree) -> Flat<'_> {
    fn go<'a>(n: &'a SynTree, parent: Option<usize>, f: &mut Flat<'a>) {
        let me = f.nodes.len();
        f.nodes.push(n);
        f.parent.push(parent);
        for c in n.children() {
            go(c, Some(me), f);
        }
    }
    let mut f = Flat {
        nodes: Vec::new(),
        parent: Vec::new(),
    };
    go(tree, None, &mut f);
    f
}

impl Flat<'_> {
    pub fn is_ancestor(&self, anc: usize, mut node: usize) -> bool {
        while let Some(p) = self.parent[node] {
            if p == anc {
                return true;
            }
            node = p;
        }
        false
    }

    fn has_noun_below(&self, i: usize) -> bool {
        (0..self.nodes.len()).any(|j| {
            (j == i || self.is_ancestor(i, j))
                && self.nodes[j].is_leaf()
                && self.nodes[j].label().starts_with("NN")
        })
    }
}

/// Brute force: every NP with a noun leaf below it that has no such NP
/// below it, then the leftmost.
pub fn oracle_innermost_np(tree: &SynTree) -> Option<(String, Span)> {
    let f = flatten(tree);
    let qualifying: Vec<usize> = (0..f.nodes.len())
        .filter(|&i| f.nodes[i].label() == "NP" && !f.nodes[i].is_leaf() && f.has_noun_below(i))
        .collect();
    qualifying
        .iter()
        .copied()
        .filter(|&i| !qualifying.iter().any(|&j| j != i && f.is_ancestor(i, j)))
        .min_by_key(|&i| f.nodes[i].span().start)
        .map(|i| (f.nodes[i].label().to_string(), f.nodes[i].span()))
}

/// Brute force: some arena node with `label` is a proper ancestor of the
/// node at arena index `target`.
pub fn oracle_dominated_by(tree: &SynTree, target: usize, label: &str) -> bool {
    let f = flatten(tree);
    (0..f.nodes.len()).any(|a| f.nodes[a].label() == label && f.is_ancestor(a, target))
}

/// Vocabulary free of plural-looking endings, so plain set membership is the
/// complete lookup rule.
pub const LEX_WORDS: &[&str] = &["ab", "Cd", "ef", "gh", "ij", "kl", "MN", "op"];

pub fn random_lexicon(rng: &mut StdRng) -> Vec<String> {
    let n = rng.gen_range(0..12);
    (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=3);
            (0..k).map(|_| *LEX_WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
        })
        .collect()
}

pub fn random_tokens(rng: &mut StdRng) -> Vec<String> {
    let n = rng.gen_range(0..7);
    (0..n).map(|_| LEX_WORDS.choose(rng).unwrap().to_string()).collect()
}

/// Brute force over every window: keep those ending at the last token and
/// present in the entry set; the longest wins.
pub fn oracle_longest_rightmost(entries: &[String], tokens: &[String]) -> Option<usize> {
    let set: HashSet<String> = entries.iter().map(|e| e.to_lowercase()).collect();
    let n = tokens.len();
    let mut best: Option<usize> = None;
    for i in 0..n {
        for j in i + 1..=n {
            let window = tokens[i..j].join(" ").to_lowercase();
            if j == n && set.contains(&window) && best.is_none_or(|b| n - i > n - b) {
                best = Some(i);
            }
        }
    }
    best
}

const GOLD_WORDS: &[&str] = &["a", "coach", "of", "North", "players", "or", "very", "x-ray", "3", "it's"];

/// A random annotation that satisfies every structural constraint.
pub fn random_annotation(rng: &mut StdRng) -> Annotation {
    let n = rng.gen_range(1..10);
    let tokens: Vec<String> = (0..n).map(|_| GOLD_WORDS.choose(rng).unwrap().to_string()).collect();
    let tokens = glossrole::rolemodel::tokenize(&tokens.join(" "));
    let n = tokens.len();
    let ill_formed = rng.gen_bool(0.1);
    let mut spans: Vec<RoleSpan> = Vec::new();
    if !ill_formed {
        let mut i = 0;
        while i < n {
            if rng.gen_bool(0.3) {
                i += 1;
                continue;
            }
            let end = rng.gen_range(i + 1..=n.min(i + 3));
            let span = Span::new(i, end);
            let role = *[
                Role::Supertype,
                Role::DifferentiaQuality,
                Role::DifferentiaEvent,
                Role::Purpose,
                Role::OriginLocation,
                Role::AccessoryDeterminer,
                Role::AssociatedFact,
                Role::AccessoryQuality,
            ]
            .choose(rng)
            .unwrap();
            let previous = spans.len().checked_sub(1);
            match previous.map(|p| spans[p].role) {
                Some(Role::DifferentiaEvent) if rng.gen_bool(0.5) => {
                    let sub = if rng.gen_bool(0.5) { Role::EventTime } else { Role::EventLocation };
                    spans.push(RoleSpan::with_parent(sub, span, previous.unwrap()));
                }
                Some(Role::Supertype) if rng.gen_bool(0.3) => {
                    spans.push(RoleSpan::with_parent(Role::Particle, span, previous.unwrap()));
                }
                _ if end < n && rng.gen_bool(0.1) => {
                    // modifier followed by its quality
                    let q = Span::new(end, (end + 1).min(n));
                    let idx = spans.len();
                    spans.push(RoleSpan::with_parent(Role::QualityModifier, span, idx + 1));
                    spans.push(RoleSpan::new(Role::DifferentiaQuality, q));
                    i = q.end;
                    continue;
                }
                _ => spans.push(RoleSpan::new(role, span)),
            }
            i = end;
        }
        if !spans.iter().any(|s| s.role == Role::Supertype) {
            // Turn the first parentless, non-parent span into the supertype.
            let parents: HashSet<usize> = spans.iter().filter_map(|s| s.parent).collect();
            match (0..spans.len()).find(|&k| spans[k].parent.is_none() && !parents.contains(&k)) {
                Some(k) => spans[k].role = Role::Supertype,
                None => return random_annotation(rng),
            }
        }
    }
    Annotation {
        definition_id: String::new(),
        tokens,
        spans,
        ill_formed,
    }
}

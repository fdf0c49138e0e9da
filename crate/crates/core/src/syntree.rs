//! Penn-Treebank-style bracketed constituency trees.
//!
//! Trees are built once by [`parse_bracketed`] and never mutated afterwards.
//! Every node carries its half-open token span over the leaf sequence, so the
//! labeling rules can reason about positions without re-walking the tree.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Half-open token interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.start <= i && i < self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Unbalanced,
    EmptyLabel,
    EmptyTree,
    UnexpectedToken(String),
    TrailingInput,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("tree parse error at offset {offset}: {kind:?}")]
pub struct TreeParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeQueryError {
    #[error("node is not part of the given tree")]
    NodeNotInTree,
}

/// A constituency tree node. Leaves carry a POS tag and a surface token.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SynTree {
    label: String,
    token: Option<String>,
    children: Vec<SynTree>,
    span: Span,
}

impl SynTree {
    /// Builds a leaf. The span is assigned when the leaf is placed in a tree.
    pub fn leaf(tag: impl Into<String>, token: impl Into<String>) -> Self {
        SynTree {
            label: tag.into(),
            token: Some(token.into()),
            children: Vec::new(),
            span: Span::new(0, 1),
        }
    }

    /// Builds an internal node and renumbers spans below it starting at 0.
    pub fn node(label: impl Into<String>, children: Vec<SynTree>) -> Self {
        let mut t = SynTree {
            label: label.into(),
            token: None,
            children,
            span: Span::default(),
        };
        t.assign_spans(0);
        t
    }

    fn assign_spans(&mut self, start: usize) -> usize {
        if self.is_leaf() {
            self.span = Span::new(start, start + 1);
            return start + 1;
        }
        let mut pos = start;
        for c in &mut self.children {
            pos = c.assign_spans(pos);
        }
        self.span = Span::new(start, pos);
        pos
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn token(&self) -> Option<&str> {
        self.token.as_deref()
    }

    pub fn children(&self) -> &[SynTree] {
        &self.children
    }

    pub fn span(&self) -> Span {
        self.span
    }

    pub fn is_leaf(&self) -> bool {
        self.token.is_some()
    }

    pub fn is_noun_tag(&self) -> bool {
        self.is_leaf() && self.label.starts_with("NN")
    }

    pub fn is_verb_tag(&self) -> bool {
        self.is_leaf() && self.label.starts_with("VB")
    }

    /// Leaves in surface order.
    pub fn leaves(&self) -> Vec<&SynTree> {
        let mut out = Vec::with_capacity(self.span.len());
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a SynTree>) {
        if self.is_leaf() {
            out.push(self);
        } else {
            for c in &self.children {
                c.collect_leaves(out);
            }
        }
    }

    pub fn tokens(&self) -> Vec<String> {
        self.leaves()
            .into_iter()
            .filter_map(|l| l.token.clone())
            .collect()
    }

    /// Pre-order traversal.
    pub fn iter(&self) -> impl Iterator<Item = &SynTree> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let node = stack.pop()?;
            stack.extend(node.children.iter().rev());
            Some(node)
        })
    }

    pub fn contains_noun(&self) -> bool {
        self.iter().any(|n| n.is_noun_tag())
    }

    /// Root-to-node chain of ancestors (excluding `node`), or `None` if
    /// `node` is not a node of this tree. Identity is by address.
    pub fn path_to(&self, node: &SynTree) -> Option<Vec<&SynTree>> {
        fn walk<'a>(cur: &'a SynTree, target: &SynTree, path: &mut Vec<&'a SynTree>) -> bool {
            if std::ptr::eq(cur, target) {
                return true;
            }
            if !cur.span.contains(&target.span) {
                return false;
            }
            path.push(cur);
            for c in &cur.children {
                if walk(c, target, path) {
                    return true;
                }
            }
            path.pop();
            false
        }
        let mut path = Vec::new();
        walk(self, node, &mut path).then_some(path)
    }

    /// Lowest node with the given label whose span contains `span`.
    pub fn lowest_covering(&self, label: &str, span: Span) -> Option<&SynTree> {
        let mut best = None;
        let mut cur = self;
        loop {
            if cur.label == label && cur.span.contains(&span) {
                best = Some(cur);
            }
            match cur.children.iter().find(|c| c.span.contains(&span)) {
                Some(c) => cur = c,
                None => return best,
            }
        }
    }
}

fn strip_functional_tags(label: &str) -> &str {
    // -NONE-, -LRB- and friends are tags in their own right.
    if label.starts_with('-') {
        return label;
    }
    match label.find(['-', '=']) {
        Some(i) if i > 0 => &label[..i],
        _ => label,
    }
}

enum Lexeme<'a> {
    Open(usize),
    Close(usize),
    Atom(usize, &'a str),
}

fn lex(text: &str) -> Vec<Lexeme<'_>> {
    let mut out = Vec::new();
    let mut atom_start: Option<usize> = None;
    for (i, ch) in text.char_indices() {
        let is_delim = ch == '(' || ch == ')' || ch.is_whitespace();
        if is_delim {
            if let Some(s) = atom_start.take() {
                out.push(Lexeme::Atom(s, &text[s..i]));
            }
            match ch {
                '(' => out.push(Lexeme::Open(i)),
                ')' => out.push(Lexeme::Close(i)),
                _ => {}
            }
        } else if atom_start.is_none() {
            atom_start = Some(i);
        }
    }
    if let Some(s) = atom_start {
        out.push(Lexeme::Atom(s, &text[s..]));
    }
    out
}

enum Raw {
    Node { label: String, children: Vec<Raw> },
    Leaf { tag: String, token: String },
}

struct Reader<'a> {
    lexemes: Vec<Lexeme<'a>>,
    pos: usize,
    len: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, offset: usize, kind: ParseErrorKind) -> TreeParseError {
        TreeParseError { offset, kind }
    }

    fn offset(&self) -> usize {
        match self.lexemes.get(self.pos) {
            Some(Lexeme::Open(o)) | Some(Lexeme::Close(o)) | Some(Lexeme::Atom(o, _)) => *o,
            None => self.len,
        }
    }

    // Assumes the current lexeme is an opening bracket.
    fn node(&mut self, allow_unlabeled: bool) -> Result<Raw, TreeParseError> {
        let open_at = self.offset();
        self.pos += 1;
        let label = match self.lexemes.get(self.pos) {
            Some(Lexeme::Atom(_, a)) => {
                self.pos += 1;
                Some(a.to_string())
            }
            Some(Lexeme::Open(_)) if allow_unlabeled => None,
            Some(Lexeme::Open(o)) | Some(Lexeme::Close(o)) => {
                return Err(self.err(*o, ParseErrorKind::EmptyLabel))
            }
            None => return Err(self.err(self.len, ParseErrorKind::Unbalanced)),
        };
        let mut children = Vec::new();
        let mut atoms: Vec<&str> = Vec::new();
        loop {
            match self.lexemes.get(self.pos) {
                Some(Lexeme::Close(_)) => {
                    self.pos += 1;
                    break;
                }
                Some(Lexeme::Open(_)) => {
                    if !atoms.is_empty() {
                        return Err(self.err(self.offset(), ParseErrorKind::UnexpectedToken("(".into())));
                    }
                    children.push(self.node(false)?);
                }
                Some(Lexeme::Atom(o, a)) => {
                    if !children.is_empty() || !atoms.is_empty() {
                        return Err(self.err(*o, ParseErrorKind::UnexpectedToken(a.to_string())));
                    }
                    atoms.push(a);
                    self.pos += 1;
                }
                None => return Err(self.err(self.len, ParseErrorKind::Unbalanced)),
            }
        }
        match (label, atoms.first()) {
            (Some(tag), Some(tok)) => Ok(Raw::Leaf {
                tag,
                token: tok.to_string(),
            }),
            (Some(label), None) => {
                if children.is_empty() {
                    return Err(self.err(open_at, ParseErrorKind::EmptyTree));
                }
                Ok(Raw::Node { label, children })
            }
            // PTB files wrap each sentence in an unlabeled bracket.
            (None, _) => {
                if children.len() != 1 {
                    return Err(self.err(open_at, ParseErrorKind::EmptyLabel));
                }
                Ok(children.pop().unwrap())
            }
        }
    }
}

fn build(raw: Raw) -> Option<SynTree> {
    match raw {
        Raw::Leaf { tag, token } => {
            if tag == "-NONE-" {
                None
            } else {
                Some(SynTree::leaf(strip_functional_tags(&tag), token))
            }
        }
        Raw::Node { label, children } => {
            let kids: Vec<SynTree> = children.into_iter().filter_map(build).collect();
            if kids.is_empty() {
                None
            } else {
                Some(SynTree {
                    label: strip_functional_tags(&label).to_string(),
                    token: None,
                    children: kids,
                    span: Span::default(),
                })
            }
        }
    }
}

/// Parses a bracketed tree such as `(NP (DT a) (NN coach))`.
///
/// Functional suffixes (`NP-SBJ`) are stripped and `-NONE-` elements are
/// dropped, together with any constituent left empty by that removal.
pub fn parse_bracketed(text: &str) -> Result<SynTree, TreeParseError> {
    let mut reader = Reader {
        lexemes: lex(text),
        pos: 0,
        len: text.len(),
    };
    match reader.lexemes.first() {
        None => return Err(reader.err(0, ParseErrorKind::EmptyTree)),
        Some(Lexeme::Open(_)) => {}
        Some(Lexeme::Close(o)) => return Err(reader.err(*o, ParseErrorKind::Unbalanced)),
        Some(Lexeme::Atom(o, a)) => {
            return Err(reader.err(*o, ParseErrorKind::UnexpectedToken(a.to_string())))
        }
    }
    let raw = reader.node(true)?;
    if reader.pos != reader.lexemes.len() {
        let kind = match reader.lexemes[reader.pos] {
            Lexeme::Close(_) => ParseErrorKind::Unbalanced,
            _ => ParseErrorKind::TrailingInput,
        };
        return Err(reader.err(reader.offset(), kind));
    }
    let mut tree = build(raw).ok_or(TreeParseError {
        offset: 0,
        kind: ParseErrorKind::EmptyTree,
    })?;
    tree.assign_spans(0);
    Ok(tree)
}

/// Single-line canonical rendering.
pub fn serialize(tree: &SynTree) -> String {
    let mut out = String::new();
    write_tree(tree, &mut out);
    out
}

fn write_tree(tree: &SynTree, out: &mut String) {
    out.push('(');
    out.push_str(&tree.label);
    if let Some(tok) = &tree.token {
        out.push(' ');
        out.push_str(tok);
    }
    for c in &tree.children {
        out.push(' ');
        write_tree(c, out);
    }
    out.push(')');
}

impl fmt::Display for SynTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

/// NP nodes that dominate at least one noun leaf.
fn is_qualifying_np(node: &SynTree) -> bool {
    node.label == "NP" && node.contains_noun()
}

/// The innermost, leftmost NP containing a noun: among qualifying NPs that
/// dominate no other qualifying NP, the one starting first.
pub fn innermost_leftmost_np(tree: &SynTree) -> Option<&SynTree> {
    innermost_leftmost_np_where(tree, |_| true)
}

/// Same as [`innermost_leftmost_np`], restricted to NPs accepted by `keep`.
/// Innermost-ness is judged among accepted NPs only.
pub fn innermost_leftmost_np_where<F>(tree: &SynTree, keep: F) -> Option<&SynTree>
where
    F: Fn(&SynTree) -> bool,
{
    fn visit<'a, F: Fn(&SynTree) -> bool>(node: &'a SynTree, keep: &F) -> Option<&'a SynTree> {
        let mut best: Option<&'a SynTree> = None;
        for c in &node.children {
            if let Some(found) = visit(c, keep) {
                best = Some(match best {
                    Some(b) if rank(b) <= rank(found) => b,
                    _ => found,
                });
            }
        }
        if best.is_some() {
            return best;
        }
        (is_qualifying_np(node) && keep(node)).then_some(node)
    }
    fn rank(n: &SynTree) -> (usize, usize) {
        (n.span.start, n.span.len())
    }
    visit(tree, &keep)
}

/// Maximal constituents lying entirely at or after token `from`, in surface
/// order. Their spans tile `[from, N)`.
pub fn constituents_after(tree: &SynTree, from: usize) -> Vec<&SynTree> {
    fn visit<'a>(node: &'a SynTree, from: usize, out: &mut Vec<&'a SynTree>) {
        if node.span.end <= from {
            return;
        }
        if node.span.start >= from {
            out.push(node);
            return;
        }
        for c in &node.children {
            visit(c, from, out);
        }
    }
    let mut out = Vec::new();
    visit(tree, from, &mut out);
    out
}

/// True iff some proper ancestor of `node` within `within` (inclusive) has
/// the label `ancestor_label`.
pub fn dominated_by(
    node: &SynTree,
    ancestor_label: &str,
    within: &SynTree,
) -> Result<bool, TreeQueryError> {
    let path = within.path_to(node).ok_or(TreeQueryError::NodeNotInTree)?;
    Ok(path.iter().any(|a| a.label == ancestor_label))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> SynTree {
        parse_bracketed(s).unwrap()
    }

    #[test]
    fn single_leaf() {
        let tree = t("(NP (NN dog))");
        assert_eq!(tree.label(), "NP");
        assert_eq!(tree.span(), Span::new(0, 1));
        assert_eq!(tree.children()[0].token(), Some("dog"));
        assert_eq!(serialize(&tree), "(NP (NN dog))");
    }

    #[test]
    fn two_leaves() {
        let tree = t("(NP (DT a)\n   (NN coach))");
        assert_eq!(tree.span(), Span::new(0, 2));
        let leaves = tree.leaves();
        assert_eq!(leaves[0].label(), "DT");
        assert_eq!(leaves[1].token(), Some("coach"));
        assert_eq!(leaves[1].span(), Span::new(1, 2));
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse_bracketed("(NP (NN dog)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Unbalanced);
        let e = parse_bracketed("(NP (NN dog)))").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Unbalanced);
        assert_eq!(e.offset, 13);
        let e = parse_bracketed("(NP () )").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::EmptyLabel);
        assert_eq!(e.offset, 5);
        assert_eq!(parse_bracketed("   ").unwrap_err().kind, ParseErrorKind::EmptyTree);
        assert_eq!(parse_bracketed("(NP)").unwrap_err().kind, ParseErrorKind::EmptyTree);
    }

    #[test]
    fn strips_functional_tags_and_traces() {
        let tree = t("( (S (NP-SBJ-1 (-NONE- *T*)) (VP=2 (VBZ runs) (-LRB- -LRB-))))");
        assert_eq!(serialize(&tree), "(S (VP (VBZ runs) (-LRB- -LRB-)))");
        assert_eq!(tree.span(), Span::new(0, 2));
    }

    #[test]
    fn only_traces_is_empty() {
        let e = parse_bracketed("(S (-NONE- *))").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::EmptyTree);
    }

    #[test]
    fn innermost_np_of_baseball_coach() {
        let tree = t("(NP (NP (DT a) (NN coach)) (PP (IN of) (NP (NN baseball) (NNS players))))");
        let np = innermost_leftmost_np(&tree).unwrap();
        assert_eq!(np.span(), Span::new(0, 2));
        assert!(innermost_leftmost_np(&t("(VP (VB run))")).is_none());
    }

    #[test]
    fn constituents_after_coach() {
        let tree = t("(NP (NP (DT a) (NN coach)) (PP (IN of) (NP (NN baseball) (NNS players))))");
        let after = constituents_after(&tree, 2);
        assert_eq!(after.len(), 1);
        assert_eq!(after[0].label(), "PP");
        assert_eq!(after[0].span(), Span::new(2, 5));
        assert!(constituents_after(&tree, 5).is_empty());
        let mid = constituents_after(&tree, 1);
        let spans: Vec<_> = mid.iter().map(|n| n.span()).collect();
        assert_eq!(spans, vec![Span::new(1, 2), Span::new(2, 5)]);
    }

    #[test]
    fn dominance() {
        let tree = t("(SBAR (WHNP (WP who)) (S (VP (VBZ lives) (PP (IN on) (NP (NN land))))))");
        let pp = tree.iter().find(|n| n.label() == "PP").unwrap();
        assert_eq!(dominated_by(pp, "SBAR", &tree), Ok(true));
        assert_eq!(dominated_by(pp, "VP", &tree), Ok(true));
        assert_eq!(dominated_by(pp, "NP", &tree), Ok(false));
        assert_eq!(dominated_by(&tree, "SBAR", &tree), Ok(false));
        let other = t("(PP (IN on))");
        assert_eq!(
            dominated_by(&other, "SBAR", &tree),
            Err(TreeQueryError::NodeNotInTree)
        );
    }

    #[test]
    fn lowest_covering_np() {
        let tree = t("(NP (NP (DT any)) (PP (IN of) (NP (NP (JJ several) (NNS plants)) (PP (IN of) (NP (NN genus))))))");
        let np = tree.lowest_covering("NP", Span::new(3, 4)).unwrap();
        assert_eq!(np.span(), Span::new(2, 4));
    }
}

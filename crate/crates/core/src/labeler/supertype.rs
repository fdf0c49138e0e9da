//! Supertype (genus) detection and the pre-supertype roles that depend on it.

use crate::lexicon::{gazetteer_match, longest_rightmost_entry, normalize_phrase};
use crate::syntree::{innermost_leftmost_np_where, SynTree, Span};

use super::LabelerConfig;

/// One supertype found in a noun gloss, with the words of its NP that
/// precede it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupertypeHit {
    pub supertype: Span,
    pub leftover: Option<Span>,
    /// Lexicon entry that matched, if any.
    pub entry: Option<String>,
    /// Set when no lexicon entry matched and the last noun was taken.
    pub low_confidence: bool,
}

const ARTICLES: &[&str] = &["a", "an", "the"];

fn is_article(leaf: &SynTree) -> bool {
    leaf.token()
        .is_some_and(|t| ARTICLES.contains(&t.to_lowercase().as_str()))
}

fn is_cc(node: &SynTree) -> bool {
    node.is_leaf() && node.label() == "CC"
}

/// Splits `node`'s children on coordinating conjunctions. Returns `None`
/// unless there are at least two non-empty groups.
pub(crate) fn cc_groups(node: &SynTree) -> Option<Vec<Vec<&SynTree>>> {
    if !node.children().iter().any(is_cc) {
        return None;
    }
    let mut groups: Vec<Vec<&SynTree>> = vec![Vec::new()];
    for c in node.children() {
        if is_cc(c) || (c.is_leaf() && c.label() == ",") {
            groups.push(Vec::new());
        } else {
            groups.last_mut().unwrap().push(c);
        }
    }
    groups.retain(|g| !g.is_empty());
    (groups.len() >= 2).then_some(groups)
}

fn group_leaves<'a>(group: &[&'a SynTree]) -> Vec<&'a SynTree> {
    if let [single] = group {
        if single.label() == "NP" {
            // A conjunct NP with its own modifiers: take its head NP.
            if let Some(inner) = innermost_leftmost_np_where(single, |_| true) {
                return inner.leaves();
            }
        }
    }
    group.iter().flat_map(|n| n.leaves()).collect()
}

fn resolve_conjunct(leaves: &[&SynTree], config: &LabelerConfig) -> Option<SupertypeHit> {
    let skip = leaves.iter().take_while(|l| l.label() == "DT").count();
    let words = &leaves[skip..];
    if words.is_empty() || !words.iter().any(|l| l.is_noun_tag()) {
        return None;
    }
    let start = words[0].span().start;
    let end = words.last().unwrap().span().end;
    let tokens: Vec<&str> = words.iter().filter_map(|l| l.token()).collect();
    let leftover = |at: usize| (at > start).then(|| Span::new(start, at));

    if let Some(entry) = config.noun_lexicon.lookup(&tokens.join(" ")) {
        return Some(SupertypeHit {
            supertype: Span::new(start, end),
            leftover: None,
            entry: Some(entry),
            low_confidence: false,
        });
    }
    if let Some((i, entry)) = longest_rightmost_entry(&config.noun_lexicon, &tokens) {
        let at = start + i;
        return Some(SupertypeHit {
            supertype: Span::new(at, end),
            leftover: leftover(at),
            entry: Some(entry),
            low_confidence: false,
        });
    }
    let last_noun = words.iter().rev().find(|l| l.is_noun_tag())?;
    let at = last_noun.span().start;
    Some(SupertypeHit {
        supertype: last_noun.span(),
        leftover: leftover(at),
        entry: None,
        low_confidence: true,
    })
}

/// Supertypes of a noun gloss: the innermost, leftmost NP holding a noun,
/// minus leading determiners, resolved against the noun lexicon as a whole
/// or by its longest lexicon suffix. Coordinated NPs yield one hit per
/// conjunct.
pub fn detect_supertype_noun(tree: &SynTree, config: &LabelerConfig) -> Option<Vec<SupertypeHit>> {
    detect_supertype_noun_from(tree, 0, config)
}

/// [`detect_supertype_noun`] restricted to NPs starting at or after `from`.
pub fn detect_supertype_noun_from(
    tree: &SynTree,
    from: usize,
    config: &LabelerConfig,
) -> Option<Vec<SupertypeHit>> {
    let np = innermost_leftmost_np_where(tree, |n| n.span().start >= from)?;
    let parent = tree.path_to(np).and_then(|p| p.last().copied());

    let coordination = cc_groups(np).or_else(|| {
        parent
            .filter(|p| p.label() == "NP" && p.span().start >= from)
            .and_then(cc_groups)
    });
    if let Some(groups) = coordination {
        let hits: Vec<SupertypeHit> = groups
            .iter()
            .map(|g| group_leaves(g))
            .filter_map(|leaves| resolve_conjunct(&leaves, config))
            .collect();
        // Adjective coordination ("perennial and biennial plants") is not a
        // coordination of supertypes.
        if hits.len() == groups.len() {
            return Some(hits);
        }
    }
    resolve_conjunct(&np.leaves(), config).map(|h| vec![h])
}

/// Supertypes of a verb gloss: the leftmost verb, plus each later verb
/// joined to it by a conjunction under the same VP.
pub fn detect_supertype_verb(tree: &SynTree, _config: &LabelerConfig) -> Option<Vec<Span>> {
    let leaves = tree.leaves();
    let first = leaves.iter().position(|l| l.is_verb_tag())?;
    let mut out = vec![leaves[first].span()];
    let mut i = first + 1;
    while i + 1 < leaves.len() && is_cc(leaves[i]) && leaves[i + 1].is_verb_tag() {
        if !shares_vp(tree, leaves[first], leaves[i + 1]) {
            break;
        }
        out.push(leaves[i + 1].span());
        i += 2;
    }
    Some(out)
}

fn shares_vp(tree: &SynTree, a: &SynTree, b: &SynTree) -> bool {
    let (Some(pa), Some(pb)) = (tree.path_to(a), tree.path_to(b)) else {
        return false;
    };
    let lca = pa
        .iter()
        .zip(pb.iter())
        .take_while(|(x, y)| std::ptr::eq(**x, **y))
        .last()
        .map(|(x, _)| *x);
    lca.is_some_and(|n| n.label() == "VP")
}

/// Accessory determiner preceding the supertype starting at
/// `supertype_start`: either a noun-free expression reaching outside the
/// supertype's NP ("any of several"), or a configured phrase such as
/// "a type of". A phrase match may swallow the provisional supertype; the
/// caller then re-detects the supertype after the phrase.
pub fn detect_accessory_determiner(
    tree: &SynTree,
    supertype_start: usize,
    config: &LabelerConfig,
) -> Option<Span> {
    let leaves = tree.leaves();
    let article = usize::from(leaves.first().is_some_and(|l| is_article(l)));

    if supertype_start > article && supertype_start <= leaves.len() {
        let prefix = &leaves[..supertype_start];
        let np_start = tree
            .lowest_covering("NP", Span::new(supertype_start, supertype_start + 1))
            .map_or(0, |np| np.span().start);
        if !prefix.iter().any(|l| l.is_noun_tag()) && np_start > article {
            return Some(Span::new(article, supertype_start));
        }
    }

    let lowered: Vec<String> = leaves
        .iter()
        .filter_map(|l| l.token())
        .map(str::to_lowercase)
        .collect();
    let body = &lowered[article..];
    config
        .accessory_determiner_phrases
        .iter()
        .filter_map(|phrase| {
            let words: Vec<&str> = phrase.split(' ').collect();
            let skip = usize::from(ARTICLES.contains(&words[0]) && words.len() > 1);
            let words = &words[skip..];
            let matches = words.len() < body.len()
                && words.iter().zip(body).all(|(w, t)| *w == t.as_str());
            matches.then_some(article + words.len())
        })
        .max()
        .map(|end| Span::new(0, end))
}

/// Origin location written before the supertype of an instance gloss
/// ("United States feminist").
pub fn detect_instance_origin(tree: &SynTree, config: &LabelerConfig) -> Option<Span> {
    if !config.instance_mode {
        return None;
    }
    let hits = detect_supertype_noun(tree, config)?;
    instance_origin_for(tree, &hits[0], config)
}

pub(crate) fn instance_origin_for(
    tree: &SynTree,
    hit: &SupertypeHit,
    config: &LabelerConfig,
) -> Option<Span> {
    if !config.instance_mode {
        return None;
    }
    let span = hit.leftover?;
    let tokens: Vec<String> = tree.tokens()[span.start..span.end].to_vec();
    gazetteer_match(&config.location_gazetteer, &tokens).then_some(span)
}

pub(crate) fn normalize_phrases<I, S>(phrases: I) -> Vec<String>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out: Vec<String> = phrases
        .into_iter()
        .map(|p| normalize_phrase(p.as_ref()))
        .filter(|p| !p.is_empty())
        .collect();
    out.sort();
    out.dedup();
    out
}

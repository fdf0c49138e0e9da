//! Roles for the constituents that follow the supertype.

use crate::lexicon::{gazetteer_match, PartOfSpeech};
use crate::rolemodel::{Annotation, Role, RoleSpan};
use crate::syntree::{dominated_by, SynTree, Span};

use super::supertype::cc_groups;
use super::{LabelerConfig, TraceEntry, TraceNote};

/// Result of classifying one constituent. Parent indices in `spans` address
/// the context's span list followed by `spans` itself.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Classification {
    pub spans: Vec<RoleSpan>,
    pub trace: Vec<TraceEntry>,
}

impl Classification {
    fn push(&mut self, span: RoleSpan, rule: &str, reason: impl Into<String>, note: Option<TraceNote>) {
        self.trace.push(TraceEntry {
            rule: rule.to_string(),
            span: span.span,
            role: Some(span.role),
            reason: reason.into(),
            note,
        });
        self.spans.push(span);
    }

    fn note(&mut self, span: Span, rule: &str, reason: impl Into<String>, note: TraceNote) {
        self.trace.push(TraceEntry {
            rule: rule.to_string(),
            span,
            role: None,
            reason: reason.into(),
            note: Some(note),
        });
    }
}

const FUNCTION_TAGS: &[&str] = &[
    "CC", "DT", "PDT", "IN", "TO", "POS", "EX", "WDT", "WP", "WRB", ",", ".", ":", "``", "''", "-LRB-",
    "-RRB-", "HYPH", "SYM", "#", "$",
];

fn is_vp_like(node: &SynTree) -> bool {
    node.label() == "VP"
        || (node.label() == "S" && node.children().first().is_some_and(|c| c.label() == "VP"))
}

fn first_token_lower(node: &SynTree) -> Option<String> {
    node.leaves().first().and_then(|l| l.token()).map(str::to_lowercase)
}

/// A PP whose introductory preposition is directly followed by a VP.
fn pp_with_vp(node: &SynTree) -> bool {
    node.label() == "PP"
        && node.children().len() >= 2
        && node.children()[0].is_leaf()
        && is_vp_like(&node.children()[1])
}

fn tokens_of(tree_tokens: &[String], span: Span) -> &[String] {
    &tree_tokens[span.start..span.end]
}

fn non_restrictive_cue(tokens: &[String]) -> bool {
    let lower: Vec<String> = tokens.iter().take(2).map(|t| t.to_lowercase()).collect();
    let first_two: Vec<&str> = lower.iter().map(String::as_str).collect();
    matches!(first_two.as_slice(), ["for", "whom"] | ["which", "was"] | ["whose", ..])
}

/// Assigns roles to a constituent following the supertype. Rules are tried
/// in a fixed order: particle, purpose, clause (event or associated fact),
/// VP event, origin PP, and finally differentia quality.
pub fn classify_post_supertype(
    tree: &SynTree,
    constituent: &SynTree,
    context: &Annotation,
    config: &LabelerConfig,
    pos: PartOfSpeech,
) -> Classification {
    let mut out = Classification::default();
    let span = constituent.span();
    let tokens = &context.tokens;
    let words = tokens_of(tokens, span);
    let base = context.spans.len();
    let label = constituent.label();

    if label == "PRT" || (constituent.is_leaf() && label == "RP") {
        let host = context
            .spans
            .iter()
            .rposition(|s| s.role == Role::Supertype && s.span.end <= span.start);
        match host {
            Some(h) => out.push(
                RoleSpan::with_parent(Role::Particle, span, h),
                "particle",
                "PRT completes the supertype",
                None,
            ),
            None => out.note(span, "particle", "particle with no supertype to host it", TraceNote::Unlabeled),
        }
        return out;
    }

    if is_vp_like(constituent) && constituent.leaves()[0].label() == "TO" {
        out.push(RoleSpan::new(Role::Purpose, span), "purpose", "VP beginning with TO", None);
        return out;
    }
    if pp_with_vp(constituent) && first_token_lower(constituent).as_deref() == Some("for") {
        out.push(
            RoleSpan::new(Role::Purpose, span),
            "purpose",
            "PP headed by \"for\" followed by a VP; purpose and differentia event differ only semantically",
            Some(TraceNote::Divergence),
        );
        return out;
    }

    if label == "SBAR" || pp_with_vp(constituent) {
        let has_differentia = context.spans.iter().any(|s| s.role.is_differentia());
        if has_differentia && non_restrictive_cue(words) {
            out.push(
                RoleSpan::new(Role::AssociatedFact, span),
                "event_or_fact",
                "non-restrictive clause after an identifying role",
                None,
            );
        } else {
            push_event(&mut out, tree, constituent, base, config, "event_or_fact", "clause after the supertype");
        }
        return out;
    }

    if pos == PartOfSpeech::Noun && is_vp_like(constituent) {
        push_event(&mut out, tree, constituent, base, config, "vp_event", "VP after the supertype");
        return out;
    }

    if label == "PP" {
        let inside_clause = dominated_by(constituent, "SBAR", tree).unwrap_or(false)
            || (pos == PartOfSpeech::Noun && dominated_by(constituent, "VP", tree).unwrap_or(false));
        if !inside_clause && gazetteer_match(&config.location_gazetteer, words) {
            out.push(
                RoleSpan::new(Role::OriginLocation, span),
                "origin_pp",
                "PP outside any clause naming a location",
                None,
            );
            return out;
        }
    }

    let content_leaf = constituent.is_leaf() && !FUNCTION_TAGS.contains(&label);
    if matches!(label, "PP" | "NP" | "ADJP" | "ADVP" | "UCP" | "QP" | "VP" | "S" | "PRN") || content_leaf {
        push_qualities(&mut out, constituent, base);
        return out;
    }

    if constituent.is_leaf() {
        out.note(span, "function_word", format!("{label} left uncovered"), TraceNote::Uncovered);
    } else {
        out.note(span, "unmatched", format!("no rule for {label}"), TraceNote::Unlabeled);
    }
    out
}

fn push_event(
    out: &mut Classification,
    tree: &SynTree,
    node: &SynTree,
    base: usize,
    config: &LabelerConfig,
    rule: &str,
    reason: &str,
) {
    let tokens = tree.tokens();
    let (event, subs) = event_subroles(node, &tokens, config);
    let event_index = base + out.spans.len();
    out.push(RoleSpan::new(Role::DifferentiaEvent, event), rule, reason, None);
    for (role, span) in subs {
        let why = match role {
            Role::EventLocation => "trailing PP inside the event naming a location",
            _ => "trailing PP inside the event naming a time",
        };
        out.push(RoleSpan::with_parent(role, span, event_index), "event_subrole", why, None);
    }
}

/// Carves trailing location/time PPs off a differentia event. Returns the
/// shrunken event span and the sub-role spans in surface order.
pub fn event_subroles(
    node: &SynTree,
    tokens: &[String],
    config: &LabelerConfig,
) -> (Span, Vec<(Role, Span)>) {
    let span = node.span();
    let mut end = span.end;
    let mut subs = Vec::new();
    loop {
        let candidate = node
            .iter()
            .filter(|n| {
                n.label() == "PP"
                    && !std::ptr::eq(*n, node)
                    && n.span().end == end
                    && n.span().start > span.start
            })
            .min_by_key(|n| n.span().start);
        let Some(pp) = candidate else { break };
        let in_clause = dominated_by(pp, "VP", node).unwrap_or(false)
            || dominated_by(pp, "SBAR", node).unwrap_or(false);
        if !in_clause {
            break;
        }
        let words = &tokens[pp.span().start..pp.span().end];
        let role = if gazetteer_match(&config.location_gazetteer, words) {
            Role::EventLocation
        } else if gazetteer_match(&config.time_gazetteer, words) {
            Role::EventTime
        } else {
            break;
        };
        subs.push((role, pp.span()));
        end = pp.span().start;
    }
    subs.reverse();
    (Span::new(span.start, end), subs)
}

fn push_qualities(out: &mut Classification, node: &SynTree, base: usize) {
    let groups: Vec<(Span, Option<&SynTree>)> = match cc_groups(node) {
        Some(groups) => groups
            .iter()
            .map(|g| {
                let s = Span::new(g[0].span().start, g.last().unwrap().span().end);
                let single = (g.len() == 1).then(|| g[0]);
                (s, single)
            })
            .collect(),
        None => vec![(node.span(), Some(node))],
    };
    let split = groups.len() > 1;
    for (span, _) in groups {
        let quality = RoleSpan::new(Role::DifferentiaQuality, span);
        let reason = if split {
            "conjunct of a coordinated quality"
        } else {
            "constituent after the supertype"
        };
        match detect_quality_modifier(node, &quality) {
            Some(carve) => {
                let q_index = base + out.spans.len() + 1;
                out.push(
                    RoleSpan::with_parent(Role::QualityModifier, carve.modifier, q_index),
                    "quality_modifier",
                    "leading modifier of the quality head",
                    None,
                );
                out.push(RoleSpan::new(Role::DifferentiaQuality, carve.quality), "default_quality", reason, None);
            }
            None => out.push(quality, "default_quality", reason, None),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModifierCarve {
    pub modifier: Span,
    pub quality: Span,
}

fn is_modifier_tag(node: &SynTree) -> bool {
    node.is_leaf() && (node.label().starts_with("RB") || node.label().starts_with("JJ"))
}

/// A degree or manner premodifier inside an ADJP/ADVP quality, such as
/// "very" in "very quickly": a leading RB/JJ followed by a sibling RB/JJ.
pub fn detect_quality_modifier(constituent: &SynTree, quality: &RoleSpan) -> Option<ModifierCarve> {
    if quality.role != Role::DifferentiaQuality || quality.span.len() < 2 {
        return None;
    }
    let phrase = constituent
        .iter()
        .filter(|n| matches!(n.label(), "ADJP" | "ADVP") && n.span().contains(&quality.span))
        .min_by_key(|n| n.span().len())?;
    let kids = phrase.children();
    let at = kids.iter().position(|k| k.span().start == quality.span.start)?;
    let (first, next) = (kids.get(at)?, kids.get(at + 1)?);
    if is_modifier_tag(first) && is_modifier_tag(next) && quality.span.contains(&next.span()) {
        Some(ModifierCarve {
            modifier: first.span(),
            quality: Span::new(first.span().end, quality.span.end),
        })
    } else {
        None
    }
}

/// Reclassifies a single-word quality as an accessory quality when the word
/// is a known accessory word and another identifying role is present.
pub fn detect_accessory_quality(
    span: &RoleSpan,
    context: &Annotation,
    config: &LabelerConfig,
) -> Option<Role> {
    if span.role != Role::DifferentiaQuality || span.span.len() != 1 {
        return None;
    }
    let word = context.tokens.get(span.span.start)?.to_lowercase();
    if !config.accessory_quality_words.contains(&word) {
        return None;
    }
    let other_identifier = context
        .spans
        .iter()
        .any(|s| s.role.is_differentia() && s.span != span.span);
    other_identifier.then_some(Role::AccessoryQuality)
}

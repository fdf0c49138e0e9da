//! The rule engine that turns a gloss parse tree into a role annotation.
//!
//! [`label`] runs, in order: supertype detection (verb or noun path), the
//! ill-formedness check, pre-supertype roles (instance origin, accessory
//! determiner, leftover qualities), classification of every constituent after
//! the last supertype, quality-modifier carve-outs, accessory-quality
//! reclassification and a final validation/repair pass. Every decision is
//! recorded in the rule trace.

mod post;
mod preprocess;
mod supertype;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{Gazetteer, GazetteerKind, Lexicon, PartOfSpeech};
use crate::rolemodel::{errors_only, validate, Annotation, Role, RoleSpan, ViolationKind};
use crate::syntree::{constituents_after, SynTree, Span};

pub use post::{
    classify_post_supertype, detect_accessory_quality, detect_quality_modifier, event_subroles,
    Classification, ModifierCarve,
};
pub use preprocess::preprocess_gloss;
pub use supertype::{
    detect_accessory_determiner, detect_instance_origin, detect_supertype_noun,
    detect_supertype_noun_from, detect_supertype_verb, SupertypeHit,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("empty definition")]
    EmptyDefinition,
}

pub const DEFAULT_ACCESSORY_DETERMINERS: &[&str] = &[
    "any of several",
    "a type of",
    "a form of",
    "any of a class of",
    "any of various",
    "any of numerous",
];

pub const DEFAULT_ACCESSORY_QUALITIES: &[&str] = &["large", "small", "common"];

/// Knowledge sources and switches for the rule engine.
#[derive(Debug, Clone)]
pub struct LabelerConfig {
    pub noun_lexicon: Lexicon,
    pub verb_lexicon: Lexicon,
    pub location_gazetteer: Gazetteer,
    pub time_gazetteer: Gazetteer,
    /// Normalized (lowercase, single-spaced) phrases.
    pub accessory_determiner_phrases: Vec<String>,
    pub accessory_quality_words: BTreeSet<String>,
    /// The definiendum denotes an instance rather than a class.
    pub instance_mode: bool,
}

impl LabelerConfig {
    pub fn new(
        noun_lexicon: Lexicon,
        verb_lexicon: Lexicon,
        location_gazetteer: Gazetteer,
        time_gazetteer: Gazetteer,
    ) -> Self {
        LabelerConfig {
            noun_lexicon,
            verb_lexicon,
            location_gazetteer,
            time_gazetteer,
            accessory_determiner_phrases: supertype::normalize_phrases(DEFAULT_ACCESSORY_DETERMINERS),
            accessory_quality_words: DEFAULT_ACCESSORY_QUALITIES.iter().map(|s| s.to_string()).collect(),
            instance_mode: false,
        }
    }

    /// Empty lexicons and gazetteers with the default accessory lists.
    pub fn empty() -> Self {
        LabelerConfig::new(
            Lexicon::new(PartOfSpeech::Noun),
            Lexicon::new(PartOfSpeech::Verb),
            Gazetteer::new(GazetteerKind::Location),
            Gazetteer::new(GazetteerKind::Time),
        )
    }

    pub fn with_accessory_determiners<I, S>(mut self, phrases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.accessory_determiner_phrases = supertype::normalize_phrases(phrases);
        self
    }

    pub fn with_accessory_qualities<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.accessory_quality_words = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        self
    }

    pub fn with_instance_mode(mut self, instance: bool) -> Self {
        self.instance_mode = instance;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceNote {
    /// The rule fired on a shape it does not characterize well.
    LowConfidence,
    /// A syntactic rule whose outcome may disagree with the semantic role.
    Divergence,
    /// Tokens deliberately left outside any role.
    Uncovered,
    /// Tokens no rule could label.
    Unlabeled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub rule: String,
    pub span: Span,
    pub role: Option<Role>,
    pub reason: String,
    pub note: Option<TraceNote>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelOutcome {
    pub annotation: Annotation,
    pub rule_trace: Vec<TraceEntry>,
}

impl LabelOutcome {
    pub fn divergences(&self) -> impl Iterator<Item = &TraceEntry> {
        self.rule_trace
            .iter()
            .filter(|t| t.note == Some(TraceNote::Divergence))
    }
}

struct Draft {
    tokens: Vec<String>,
    spans: Vec<RoleSpan>,
    trace: Vec<TraceEntry>,
}

impl Draft {
    fn push(&mut self, span: RoleSpan, rule: &str, reason: impl Into<String>, note: Option<TraceNote>) -> usize {
        self.trace.push(TraceEntry {
            rule: rule.to_string(),
            span: span.span,
            role: Some(span.role),
            reason: reason.into(),
            note,
        });
        self.spans.push(span);
        self.spans.len() - 1
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

    fn context(&self) -> Annotation {
        Annotation {
            definition_id: String::new(),
            tokens: self.tokens.clone(),
            spans: self.spans.clone(),
            ill_formed: false,
        }
    }
}

/// Labels a gloss tree. The returned annotation is sorted, covers each token
/// at most once and has no error-severity violations.
pub fn label(tree: &SynTree, pos: PartOfSpeech, config: &LabelerConfig) -> Result<LabelOutcome, LabelError> {
    if tree.span().is_empty() {
        return Err(LabelError::EmptyDefinition);
    }
    let mut draft = Draft {
        tokens: tree.tokens(),
        spans: Vec::new(),
        trace: Vec::new(),
    };

    let mut from = None;
    if pos == PartOfSpeech::Verb {
        match detect_supertype_verb(tree, config) {
            Some(verbs) => {
                for s in &verbs {
                    draft.push(RoleSpan::new(Role::Supertype, *s), "supertype.verb", "leftmost verb or conjoined verb", None);
                }
                from = verbs.last().map(|s| s.end);
            }
            None => draft.note(
                tree.span(),
                "supertype.verb",
                "no verb leaf; falling back to the noun rules",
                TraceNote::LowConfidence,
            ),
        }
    }
    if from.is_none() {
        from = noun_prefix(tree, config, &mut draft);
    }

    let Some(from) = from else {
        draft.spans.clear();
        draft.trace.push(TraceEntry {
            rule: "supertype".into(),
            span: tree.span(),
            role: None,
            reason: "no supertype found; definition is ill-formed".into(),
            note: Some(TraceNote::Unlabeled),
        });
        return Ok(finish(draft, true));
    };

    for constituent in constituents_after(tree, from) {
        let context = draft.context();
        let c = classify_post_supertype(tree, constituent, &context, config, pos);
        draft.spans.extend(c.spans);
        draft.trace.extend(c.trace);
    }

    let context = draft.context();
    let leaves = tree.leaves();
    let mut reclassified = Vec::new();
    for (i, s) in draft.spans.iter().enumerate() {
        let is_adjective = leaves[s.span.start].label().starts_with("JJ");
        let is_parent = draft.spans.iter().any(|o| o.parent == Some(i));
        if !is_adjective || is_parent {
            continue;
        }
        if let Some(role) = detect_accessory_quality(s, &context, config) {
            reclassified.push((i, role));
        }
    }
    for (i, role) in reclassified {
        let span = draft.spans[i].span;
        draft.spans[i].role = role;
        draft.trace.push(TraceEntry {
            rule: "accessory_quality".into(),
            span,
            role: Some(role),
            reason: "known accessory word beside another identifying role; essential and incidental qualities differ only semantically".into(),
            note: Some(TraceNote::Divergence),
        });
    }

    Ok(finish(draft, false))
}

/// Noun-path supertype plus the roles written before it. Returns the token
/// index after the last supertype.
fn noun_prefix(tree: &SynTree, config: &LabelerConfig, draft: &mut Draft) -> Option<usize> {
    let mut hits = detect_supertype_noun(tree, config)?;
    let mut accessory = detect_accessory_determiner(tree, hits[0].supertype.start, config);
    if let Some(acc) = accessory {
        if acc.end > hits[0].supertype.start {
            match detect_supertype_noun_from(tree, acc.end, config) {
                Some(again) => hits = again,
                None => accessory = None,
            }
        }
    }
    if let Some(acc) = accessory {
        draft.push(
            RoleSpan::new(Role::AccessoryDeterminer, acc),
            "accessory_determiner",
            "expression before the supertype that does not restrict it",
            None,
        );
    }
    let floor = accessory.map_or(0, |a| a.end);

    for (k, hit) in hits.iter().enumerate() {
        let leftover = hit
            .leftover
            .map(|l| Span::new(l.start.max(floor), l.end))
            .filter(|l| !l.is_empty());
        if let Some(left) = leftover {
            let clipped = SupertypeHit {
                leftover: Some(left),
                ..hit.clone()
            };
            let origin = if k == 0 {
                supertype::instance_origin_for(tree, &clipped, config)
            } else {
                None
            };
            match origin {
                Some(o) => {
                    draft.push(
                        RoleSpan::new(Role::OriginLocation, o),
                        "instance_origin",
                        "location before the supertype of an instance",
                        None,
                    );
                }
                None => {
                    draft.push(
                        RoleSpan::new(Role::DifferentiaQuality, left),
                        "leftover_quality",
                        "NP words before the lexicon supertype",
                        None,
                    );
                }
            }
        }
        let (reason, note) = match &hit.entry {
            Some(e) => (format!("innermost leftmost NP resolved to lexicon entry {e:?}"), None),
            None => (
                "no lexicon entry in the NP; last noun taken".to_string(),
                Some(TraceNote::LowConfidence),
            ),
        };
        draft.push(RoleSpan::new(Role::Supertype, hit.supertype), "supertype.noun", reason, note);
    }
    hits.iter().map(|h| h.supertype.end).max()
}

/// Sorts spans, remaps parents, repairs invalid attachments and records
/// residue so every token is accounted for in the trace.
fn finish(mut draft: Draft, ill_formed: bool) -> LabelOutcome {
    let mut order: Vec<usize> = (0..draft.spans.len()).collect();
    order.sort_by_key(|&i| (draft.spans[i].span.start, draft.spans[i].span.end));
    let mut new_index = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        new_index[old] = new;
    }
    let spans: Vec<RoleSpan> = order
        .iter()
        .map(|&old| {
            let s = &draft.spans[old];
            RoleSpan {
                role: s.role,
                span: s.span,
                parent: s.parent.map(|p| new_index[p]),
            }
        })
        .collect();

    let mut annotation = Annotation {
        definition_id: String::new(),
        tokens: std::mem::take(&mut draft.tokens),
        spans,
        ill_formed,
    };

    for _ in 0..annotation.spans.len() + 1 {
        let errors = errors_only(&validate(&annotation));
        let Some(v) = errors.first() else { break };
        match (v.kind, v.span) {
            (ViolationKind::OrphanSubRole, Some(i)) | (ViolationKind::UnexpectedParent, Some(i)) => {
                let s = &mut annotation.spans[i];
                let demoted = s.role.demoted();
                draft.trace.push(TraceEntry {
                    rule: "repair".into(),
                    span: s.span,
                    role: Some(demoted),
                    reason: format!("{} demoted from {}", v.kind, s.role),
                    note: Some(TraceNote::LowConfidence),
                });
                s.role = demoted;
                s.parent = None;
            }
            (_, Some(i)) => {
                let removed = annotation.spans.remove(i);
                for s in &mut annotation.spans {
                    s.parent = match s.parent {
                        Some(p) if p == i => None,
                        Some(p) if p > i => Some(p - 1),
                        other => other,
                    };
                }
                draft.trace.push(TraceEntry {
                    rule: "repair".into(),
                    span: removed.span,
                    role: None,
                    reason: format!("{} removed", v.kind),
                    note: Some(TraceNote::Unlabeled),
                });
            }
            (_, None) => {
                annotation.ill_formed = !annotation.has_supertype();
            }
        }
    }

    let mut accounted = vec![false; annotation.tokens.len()];
    let covered = annotation
        .spans
        .iter()
        .map(|s| s.span)
        .chain(draft.trace.iter().map(|t| t.span));
    for span in covered {
        for flag in &mut accounted[span.start..span.end.min(annotation.tokens.len())] {
            *flag = true;
        }
    }
    let mut i = 0;
    while i < accounted.len() {
        if accounted[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < accounted.len() && !accounted[i] {
            i += 1;
        }
        draft.trace.push(TraceEntry {
            rule: "residue".into(),
            span: Span::new(start, i),
            role: None,
            reason: "function words outside any role".into(),
            note: Some(TraceNote::Uncovered),
        });
    }

    LabelOutcome {
        annotation,
        rule_trace: draft.trace,
    }
}

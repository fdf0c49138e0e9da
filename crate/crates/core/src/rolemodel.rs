//! The definition role taxonomy, annotations over definition tokens, and the
//! inline gold annotation format.
//!
//! Inline format: role-tagged segments `{role|tok tok}` interleaved with
//! untagged tokens. A sub-role names its parent segment by 0-based index,
//! `{event_time@1|at formal occasions}`. An annotation flagged ill-formed
//! starts with the marker `{ill_formed}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntree::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Supertype,
    DifferentiaQuality,
    DifferentiaEvent,
    EventLocation,
    EventTime,
    OriginLocation,
    QualityModifier,
    Purpose,
    AssociatedFact,
    AccessoryDeterminer,
    AccessoryQuality,
    Particle,
}

impl Role {
    pub const ALL: [Role; 12] = [
        Role::Supertype,
        Role::DifferentiaQuality,
        Role::DifferentiaEvent,
        Role::EventLocation,
        Role::EventTime,
        Role::OriginLocation,
        Role::QualityModifier,
        Role::Purpose,
        Role::AssociatedFact,
        Role::AccessoryDeterminer,
        Role::AccessoryQuality,
        Role::Particle,
    ];

    /// Identifier used in the inline gold format.
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Supertype => "supertype",
            Role::DifferentiaQuality => "differentia_quality",
            Role::DifferentiaEvent => "differentia_event",
            Role::EventLocation => "event_location",
            Role::EventTime => "event_time",
            Role::OriginLocation => "origin_location",
            Role::QualityModifier => "quality_modifier",
            Role::Purpose => "purpose",
            Role::AssociatedFact => "associated_fact",
            Role::AccessoryDeterminer => "accessory_determiner",
            Role::AccessoryQuality => "accessory_quality",
            Role::Particle => "particle",
        }
    }

    /// Human-readable name, as used in pattern strings.
    pub fn display_name(self) -> &'static str {
        match self {
            Role::Supertype => "supertype",
            Role::DifferentiaQuality => "differentia quality",
            Role::DifferentiaEvent => "differentia event",
            Role::EventLocation => "event location",
            Role::EventTime => "event time",
            Role::OriginLocation => "origin location",
            Role::QualityModifier => "quality modifier",
            Role::Purpose => "purpose",
            Role::AssociatedFact => "associated fact",
            Role::AccessoryDeterminer => "accessory determiner",
            Role::AccessoryQuality => "accessory quality",
            Role::Particle => "particle",
        }
    }

    pub fn from_display_name(s: &str) -> Option<Role> {
        Role::ALL.into_iter().find(|r| r.display_name() == s)
    }

    /// Roles that must hang off another span.
    pub fn requires_parent(self) -> bool {
        matches!(
            self,
            Role::QualityModifier | Role::EventTime | Role::EventLocation | Role::Particle
        )
    }

    /// Whether `parent` is an admissible attachment target for this role.
    pub fn accepts_parent(self, parent: Role) -> bool {
        match self {
            Role::QualityModifier => parent == Role::DifferentiaQuality,
            Role::EventTime | Role::EventLocation => parent == Role::DifferentiaEvent,
            Role::Particle => parent != Role::Particle,
            _ => false,
        }
    }

    /// Role a sub-role falls back to when its attachment is invalid.
    pub fn demoted(self) -> Role {
        match self {
            Role::QualityModifier => Role::DifferentiaQuality,
            Role::EventTime | Role::EventLocation => Role::DifferentiaEvent,
            Role::Particle => Role::DifferentiaQuality,
            other => other,
        }
    }

    pub fn is_differentia(self) -> bool {
        matches!(self, Role::DifferentiaQuality | Role::DifferentiaEvent)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Role::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown role {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoleSpan {
    pub role: Role,
    pub span: Span,
    /// Index of the parent span within the annotation's span list.
    pub parent: Option<usize>,
}

impl RoleSpan {
    pub fn new(role: Role, span: Span) -> Self {
        RoleSpan { role, span, parent: None }
    }

    pub fn with_parent(role: Role, span: Span, parent: usize) -> Self {
        RoleSpan { role, span, parent: Some(parent) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Annotation {
    pub definition_id: String,
    pub tokens: Vec<String>,
    pub spans: Vec<RoleSpan>,
    pub ill_formed: bool,
}

impl Annotation {
    pub fn has_supertype(&self) -> bool {
        self.spans.iter().any(|s| s.role == Role::Supertype)
    }

    pub fn span_text(&self, span: Span) -> String {
        self.tokens[span.start..span.end.min(self.tokens.len())].join(" ")
    }

    /// Token indices covered by spans of `role`.
    pub fn token_set(&self, role: Role) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .spans
            .iter()
            .filter(|s| s.role == role)
            .flat_map(|s| s.span.start..s.span.end)
            .collect();
        out.sort_unstable();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    EmptySpan,
    OutOfRange,
    Unsorted,
    Overlap,
    MissingSupertype,
    OrphanSubRole,
    UnexpectedParent,
    MissingIdentifyingRole,
}

impl ViolationKind {
    pub fn severity(self) -> Severity {
        match self {
            ViolationKind::MissingIdentifyingRole => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::EmptySpan => "empty span",
            ViolationKind::OutOfRange => "span out of range",
            ViolationKind::Unsorted => "spans not sorted",
            ViolationKind::Overlap => "overlapping spans",
            ViolationKind::MissingSupertype => "missing supertype",
            ViolationKind::OrphanSubRole => "orphan sub-role",
            ViolationKind::UnexpectedParent => "unexpected parent",
            ViolationKind::MissingIdentifyingRole => "missing identifying role",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Offending span index; `None` for annotation-level breaches.
    pub span: Option<usize>,
}

impl Violation {
    pub fn severity(&self) -> Severity {
        self.kind.severity()
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(i) => write!(f, "{} (span {i})", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

/// Checks every annotation and role-attachment invariant. One record per
/// breach; warnings flag purposes and associated facts with no differentia.
pub fn validate(annotation: &Annotation) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = annotation.tokens.len();
    let spans = &annotation.spans;
    let v = |kind, span| Violation { kind, span };

    for (i, s) in spans.iter().enumerate() {
        if s.span.is_empty() {
            out.push(v(ViolationKind::EmptySpan, Some(i)));
        } else if s.span.end > n {
            out.push(v(ViolationKind::OutOfRange, Some(i)));
        }
    }
    for i in 1..spans.len() {
        let (a, b) = (spans[i - 1].span, spans[i].span);
        if b.start < a.start {
            out.push(v(ViolationKind::Unsorted, Some(i)));
        }
    }
    for i in 0..spans.len() {
        for j in (i + 1)..spans.len() {
            if spans[i].span.overlaps(&spans[j].span) {
                out.push(v(ViolationKind::Overlap, Some(j)));
            }
        }
    }
    if !annotation.ill_formed && !annotation.has_supertype() {
        out.push(v(ViolationKind::MissingSupertype, None));
    }
    for (i, s) in spans.iter().enumerate() {
        match (s.role.requires_parent(), s.parent) {
            (true, None) => out.push(v(ViolationKind::OrphanSubRole, Some(i))),
            (true, Some(p)) => {
                let ok = p != i && spans.get(p).is_some_and(|ps| s.role.accepts_parent(ps.role));
                if !ok {
                    out.push(v(ViolationKind::OrphanSubRole, Some(i)));
                }
            }
            (false, Some(_)) => out.push(v(ViolationKind::UnexpectedParent, Some(i))),
            (false, None) => {}
        }
    }
    let has_identifier = spans.iter().any(|s| s.role.is_differentia());
    if !has_identifier {
        for (i, s) in spans.iter().enumerate() {
            if matches!(s.role, Role::Purpose | Role::AssociatedFact) {
                out.push(v(ViolationKind::MissingIdentifyingRole, Some(i)));
            }
        }
    }
    out
}

pub fn errors_only(violations: &[Violation]) -> Vec<Violation> {
    violations
        .iter()
        .filter(|v| v.severity() == Severity::Error)
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GoldError {
    #[error("offset {offset}: unknown role {role:?}")]
    UnknownRole { offset: usize, role: String },
    #[error("offset {offset}: malformed braces")]
    MalformedBraces { offset: usize },
    #[error("offset {offset}: empty segment")]
    EmptySegment { offset: usize },
    #[error("segment {segment}: bad parent index {parent}")]
    BadParent { segment: usize, parent: String },
    #[error("segment {segment}: parent {parent} has role {parent_role}, not an admissible target")]
    WrongParentRole {
        segment: usize,
        parent: usize,
        parent_role: Role,
    },
    #[error("annotation is not valid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "))]
    Invalid(Vec<Violation>),
}

/// Splits on whitespace and detaches a trailing possessive `'s` clitic, as
/// treebank tokenization does.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for w in text.split_whitespace() {
        match w.strip_suffix("'s") {
            Some(stem) if !stem.is_empty() => {
                out.push(stem.to_string());
                out.push("'s".to_string());
            }
            _ => out.push(w.to_string()),
        }
    }
    out
}

const ILL_FORMED_MARKER: &str = "{ill_formed}";

struct RawSegment {
    role: Role,
    parent: Option<usize>,
    span: Span,
}

/// Parses the inline gold format into an annotation with an empty id.
pub fn parse_gold(text: &str) -> Result<Annotation, GoldError> {
    let mut rest = text.trim_start();
    let mut offset = text.len() - rest.len();
    let mut ill_formed = false;
    if let Some(r) = rest.strip_prefix(ILL_FORMED_MARKER) {
        ill_formed = true;
        offset += ILL_FORMED_MARKER.len();
        rest = r;
    }

    let mut tokens = Vec::new();
    let mut segments: Vec<RawSegment> = Vec::new();
    let bytes = rest.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'}' || c == b'|' {
            return Err(GoldError::MalformedBraces { offset: offset + i });
        }
        if c == b'{' {
            let close = rest[i..]
                .find('}')
                .map(|k| i + k)
                .ok_or(GoldError::MalformedBraces { offset: offset + i })?;
            let inner = &rest[i + 1..close];
            if inner.contains('{') {
                return Err(GoldError::MalformedBraces { offset: offset + i });
            }
            let (head, body) = inner
                .split_once('|')
                .ok_or(GoldError::MalformedBraces { offset: offset + i })?;
            if body.contains('|') {
                return Err(GoldError::MalformedBraces { offset: offset + i });
            }
            let (role_name, parent) = match head.split_once('@') {
                Some((r, p)) => {
                    let idx = p.parse::<usize>().map_err(|_| GoldError::BadParent {
                        segment: segments.len(),
                        parent: p.to_string(),
                    })?;
                    (r, Some(idx))
                }
                None => (head, None),
            };
            let role = role_name.parse::<Role>().map_err(|_| GoldError::UnknownRole {
                offset: offset + i,
                role: role_name.to_string(),
            })?;
            let seg_tokens = tokenize(body);
            if seg_tokens.is_empty() {
                return Err(GoldError::EmptySegment { offset: offset + i });
            }
            let start = tokens.len();
            tokens.extend(seg_tokens);
            segments.push(RawSegment {
                role,
                parent,
                span: Span::new(start, tokens.len()),
            });
            i = close + 1;
        } else {
            let end = rest[i..]
                .find(|ch: char| ch.is_whitespace() || ch == '{' || ch == '}' || ch == '|')
                .map_or(rest.len(), |k| i + k);
            tokens.extend(tokenize(&rest[i..end]));
            i = end;
        }
    }

    let mut spans = Vec::with_capacity(segments.len());
    for (k, seg) in segments.iter().enumerate() {
        if let Some(p) = seg.parent {
            let target = segments.get(p).filter(|_| p != k).ok_or(GoldError::BadParent {
                segment: k,
                parent: p.to_string(),
            })?;
            if !seg.role.accepts_parent(target.role) {
                return Err(GoldError::WrongParentRole {
                    segment: k,
                    parent: p,
                    parent_role: target.role,
                });
            }
        }
        spans.push(RoleSpan {
            role: seg.role,
            span: seg.span,
            parent: seg.parent,
        });
    }
    Ok(Annotation {
        definition_id: String::new(),
        tokens,
        spans,
        ill_formed,
    })
}

/// Canonical single-line inline rendering. Refuses annotations with
/// error-severity violations.
pub fn serialize_gold(annotation: &Annotation) -> Result<String, GoldError> {
    let errors = errors_only(&validate(annotation));
    if !errors.is_empty() {
        return Err(GoldError::Invalid(errors));
    }
    let mut parts: Vec<String> = Vec::new();
    if annotation.ill_formed {
        parts.push(ILL_FORMED_MARKER.to_string());
    }
    let mut pos = 0;
    for s in &annotation.spans {
        parts.extend(annotation.tokens[pos..s.span.start].iter().cloned());
        let head = match s.parent {
            Some(p) => format!("{}@{p}", s.role),
            None => s.role.to_string(),
        };
        parts.push(format!("{{{head}|{}}}", annotation.span_text(s.span)));
        pos = s.span.end;
    }
    parts.extend(annotation.tokens[pos..].iter().cloned());
    Ok(parts.join(" "))
}

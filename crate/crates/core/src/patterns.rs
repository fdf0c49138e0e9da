//! Role-sequence patterns in the `(role) (role)+ OR(role)+` notation.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::rolemodel::{Annotation, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Repetition {
    Single,
    /// Two or more consecutive instances.
    Plus,
    /// Two or more instances joined by "or".
    OrPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternElement {
    pub role: Role,
    pub repetition: Repetition,
}

/// Ordered role sequence. No two adjacent elements share a role.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Pattern {
    elements: Vec<PatternElement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("offset {offset}: unknown role {role:?}")]
    UnknownRole { offset: usize, role: String },
    #[error("offset {offset}: malformed element")]
    Malformed { offset: usize },
    #[error("offset {offset}: repeated role {role} must be collapsed")]
    NotCollapsed { offset: usize, role: Role },
}

impl Pattern {
    /// Fails if two adjacent elements share a role.
    pub fn new(elements: Vec<PatternElement>) -> Result<Self, PatternError> {
        for (i, w) in elements.windows(2).enumerate() {
            if w[0].role == w[1].role {
                return Err(PatternError::NotCollapsed {
                    offset: i + 1,
                    role: w[1].role,
                });
            }
        }
        Ok(Pattern { elements })
    }

    pub fn elements(&self) -> &[PatternElement] {
        &self.elements
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let name = e.role.display_name();
            match e.repetition {
                Repetition::Single => write!(f, "({name})")?,
                Repetition::Plus => write!(f, "({name})+")?,
                Repetition::OrPlus => write!(f, "OR({name})+")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pattern(s)
    }
}

fn counts_in_pattern(role: Role) -> bool {
    !matches!(role, Role::Particle | Role::QualityModifier)
}

/// The annotation's role pattern. Consecutive same-role spans collapse to
/// `(role)+`, or to `OR(role)+` when every gap between them contains "or".
pub fn pattern_of(annotation: &Annotation) -> Pattern {
    let spans: Vec<_> = annotation
        .spans
        .iter()
        .filter(|s| counts_in_pattern(s.role))
        .collect();
    let mut elements = Vec::new();
    let mut i = 0;
    while i < spans.len() {
        let role = spans[i].role;
        let mut j = i + 1;
        let mut all_or = true;
        while j < spans.len() && spans[j].role == role {
            let gap = spans[j - 1].span.end..spans[j].span.start;
            let has_or = annotation.tokens[gap]
                .iter()
                .any(|t| t.eq_ignore_ascii_case("or"));
            all_or &= has_or;
            j += 1;
        }
        let repetition = match (j - i, all_or) {
            (1, _) => Repetition::Single,
            (_, true) => Repetition::OrPlus,
            (_, false) => Repetition::Plus,
        };
        elements.push(PatternElement { role, repetition });
        i = j;
    }
    Pattern { elements }
}

/// Parses `(role)`, `(role)+` and `OR(role)+` elements separated by
/// whitespace. Role names use spaces, e.g. `(differentia quality)`.
pub fn parse_pattern(text: &str) -> Result<Pattern, PatternError> {
    let mut elements = Vec::new();
    let mut i = 0;
    let bytes = text.as_bytes();
    while i < bytes.len() {
        if bytes[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let or = text[i..].starts_with("OR(");
        if or {
            i += 2;
        }
        if bytes.get(i) != Some(&b'(') {
            return Err(PatternError::Malformed { offset: start });
        }
        let close = text[i..]
            .find(')')
            .map(|k| i + k)
            .ok_or(PatternError::Malformed { offset: start })?;
        let name = &text[i + 1..close];
        let role = Role::from_display_name(name).ok_or_else(|| PatternError::UnknownRole {
            offset: i + 1,
            role: name.to_string(),
        })?;
        i = close + 1;
        let plus = bytes.get(i) == Some(&b'+');
        if plus {
            i += 1;
        }
        if i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            return Err(PatternError::Malformed { offset: start });
        }
        let repetition = match (or, plus) {
            (true, true) => Repetition::OrPlus,
            (true, false) => return Err(PatternError::Malformed { offset: start }),
            (false, true) => Repetition::Plus,
            (false, false) => Repetition::Single,
        };
        if let Some(prev) = elements.last() {
            let prev: &PatternElement = prev;
            if prev.role == role {
                return Err(PatternError::NotCollapsed { offset: start, role });
            }
        }
        elements.push(PatternElement { role, repetition });
    }
    Ok(Pattern { elements })
}

//! Lexical-entry lookup and named-entity gazetteers.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::{self, BufRead};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartOfSpeech {
    Noun,
    Verb,
}

impl fmt::Display for PartOfSpeech {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartOfSpeech::Noun => "noun",
            PartOfSpeech::Verb => "verb",
        })
    }
}

impl FromStr for PartOfSpeech {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "noun" | "n" => Ok(PartOfSpeech::Noun),
            "verb" | "v" => Ok(PartOfSpeech::Verb),
            other => Err(format!("unknown part of speech {other:?}")),
        }
    }
}

/// Lowercases and joins whitespace-separated words with underscores.
pub fn normalize_entry(s: &str) -> String {
    s.split_whitespace()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join("_")
}

/// Lowercases and collapses whitespace; underscores become spaces.
pub fn normalize_phrase(s: &str) -> String {
    s.replace('_', " ")
        .split_whitespace()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

fn is_well_formed_entry(e: &str) -> bool {
    !e.is_empty() && !e.starts_with('_') && !e.ends_with('_') && !e.contains("__")
}

// WordNet-style noun detachment rules, tried in order.
const NOUN_SUFFIXES: &[(&str, &str)] = &[
    ("ses", "s"),
    ("xes", "x"),
    ("zes", "z"),
    ("ches", "ch"),
    ("shes", "sh"),
    ("men", "man"),
    ("ies", "y"),
    ("s", ""),
];

/// Candidate base forms of a (possibly multiword) noun entry. Only the last
/// word is inflected.
pub fn noun_base_forms(entry: &str) -> Vec<String> {
    let (head, last) = match entry.rfind('_') {
        Some(i) => (&entry[..=i], &entry[i + 1..]),
        None => ("", entry),
    };
    let mut out = Vec::new();
    if last.ends_with("ss") {
        return out;
    }
    for (suffix, repl) in NOUN_SUFFIXES {
        if let Some(stem) = last.strip_suffix(suffix) {
            if !stem.is_empty() || !repl.is_empty() {
                out.push(format!("{head}{stem}{repl}"));
            }
        }
    }
    out
}

/// A set of normalized lemma entries for one part of speech.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pos: PartOfSpeech,
    entries: HashSet<String>,
}

impl Lexicon {
    pub fn new(pos: PartOfSpeech) -> Self {
        Lexicon {
            pos,
            entries: HashSet::new(),
        }
    }

    /// Builds a lexicon from raw entries, normalizing each one. Entries that
    /// normalize to an ill-formed lemma are rejected.
    pub fn from_entries<I, S>(pos: PartOfSpeech, entries: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lex = Lexicon::new(pos);
        for (i, e) in entries.into_iter().enumerate() {
            lex.insert(e.as_ref())
                .map_err(|message| LexiconError::Format { line: i + 1, message })?;
        }
        Ok(lex)
    }

    fn insert(&mut self, raw: &str) -> Result<(), String> {
        let e = normalize_entry(raw);
        if !is_well_formed_entry(&e) {
            return Err(format!("malformed entry {raw:?}"));
        }
        self.entries.insert(e);
        Ok(())
    }

    pub fn pos(&self) -> PartOfSpeech {
        self.pos
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact membership after normalization.
    pub fn contains(&self, s: &str) -> bool {
        self.entries.contains(&normalize_entry(s))
    }

    /// Membership with the plural fallback for noun lexicons. Returns the
    /// entry that matched.
    pub fn lookup(&self, s: &str) -> Option<String> {
        let norm = normalize_entry(s);
        if self.entries.contains(&norm) {
            return Some(norm);
        }
        if self.pos == PartOfSpeech::Noun {
            return noun_base_forms(&norm)
                .into_iter()
                .find(|b| self.entries.contains(b));
        }
        None
    }

    pub fn entries(&self) -> BTreeSet<&str> {
        self.entries.iter().map(String::as_str).collect()
    }
}

/// Loads a one-entry-per-line word list. Blank lines and `#` comments are
/// skipped.
pub fn load_wordlist<R: BufRead>(source: R, pos: PartOfSpeech) -> Result<Lexicon, LexiconError> {
    let mut lex = Lexicon::new(pos);
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        lex.insert(trimmed)
            .map_err(|message| LexiconError::Format { line: i + 1, message })?;
    }
    Ok(lex)
}

/// Loads a WordNet `index.noun` / `index.verb` file. License header lines
/// start with two spaces; every other line starts with the lemma.
pub fn load_wndb_index<R: BufRead>(source: R, pos: PartOfSpeech) -> Result<Lexicon, LexiconError> {
    let mut lex = Lexicon::new(pos);
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        if line.starts_with("  ") || line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let lemma = fields.next().unwrap_or_default();
        if fields.next().is_none() {
            return Err(LexiconError::Format {
                line: i + 1,
                message: format!("expected lemma followed by fields, got {line:?}"),
            });
        }
        lex.insert(lemma)
            .map_err(|message| LexiconError::Format { line: i + 1, message })?;
    }
    Ok(lex)
}

/// The longest suffix `tokens[i..]` found in the lexicon, with its start
/// offset and the matching entry.
pub fn longest_rightmost_entry<S: AsRef<str>>(
    lexicon: &Lexicon,
    tokens: &[S],
) -> Option<(usize, String)> {
    (0..tokens.len()).find_map(|i| {
        let joined = tokens[i..]
            .iter()
            .map(|t| t.as_ref())
            .collect::<Vec<_>>()
            .join(" ");
        lexicon.lookup(&joined).map(|e| (i, e))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GazetteerKind {
    Location,
    Time,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gazetteer {
    kind: GazetteerKind,
    entries: HashSet<String>,
    longest: usize,
}

const MONTHS: &[&str] = &[
    "January", "February", "March", "April", "May", "June", "July", "August", "September",
    "October", "November", "December",
];

const ORDINAL_WORDS: &[&str] = &[
    "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth",
    "eleventh", "twelfth", "thirteenth", "fourteenth", "fifteenth", "sixteenth", "seventeenth",
    "eighteenth", "nineteenth", "twentieth", "twenty-first",
];

fn is_year(tok: &str) -> bool {
    tok.len() == 4 && tok.bytes().all(|b| b.is_ascii_digit())
}

fn is_ordinal(tok: &str) -> bool {
    let lower = tok.to_lowercase();
    if ORDINAL_WORDS.contains(&lower.as_str()) {
        return true;
    }
    let digits = lower.trim_end_matches(|c: char| c.is_ascii_alphabetic());
    let suffix = &lower[digits.len()..];
    !digits.is_empty()
        && digits.bytes().all(|b| b.is_ascii_digit())
        && matches!(suffix, "st" | "nd" | "rd" | "th")
}

impl Gazetteer {
    pub fn new(kind: GazetteerKind) -> Self {
        Gazetteer {
            kind,
            entries: HashSet::new(),
            longest: 0,
        }
    }

    pub fn from_entries<I, S>(kind: GazetteerKind, entries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut g = Gazetteer::new(kind);
        for e in entries {
            g.insert(e.as_ref());
        }
        g
    }

    fn insert(&mut self, raw: &str) {
        let e = normalize_phrase(raw);
        if e.is_empty() {
            return;
        }
        self.longest = self.longest.max(e.split(' ').count());
        self.entries.insert(e);
    }

    pub fn load<R: BufRead>(source: R, kind: GazetteerKind) -> Result<Self, LexiconError> {
        let mut g = Gazetteer::new(kind);
        for line in source.lines() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            g.insert(trimmed);
        }
        Ok(g)
    }

    pub fn kind(&self) -> GazetteerKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, phrase: &str) -> bool {
        self.entries.contains(&normalize_phrase(phrase))
    }

    fn heuristic_hit<S: AsRef<str>>(&self, tokens: &[S]) -> bool {
        match self.kind {
            GazetteerKind::Time => tokens.iter().enumerate().any(|(i, t)| {
                let t = t.as_ref();
                is_year(t)
                    || MONTHS.contains(&t)
                    || (is_ordinal(t)
                        && tokens
                            .get(i + 1)
                            .is_some_and(|n| n.as_ref().eq_ignore_ascii_case("century")))
            }),
            GazetteerKind::Location => tokens.iter().enumerate().skip(1).any(|(_, t)| {
                let t = t.as_ref();
                t.chars().next().is_some_and(char::is_uppercase) && self.contains(t)
            }),
        }
    }
}

/// True iff some contiguous run of `tokens` is a gazetteer entry, or a
/// closed-class heuristic for the gazetteer's kind fires.
pub fn gazetteer_match<S: AsRef<str>>(gazetteer: &Gazetteer, tokens: &[S]) -> bool {
    let lowered: Vec<String> = tokens.iter().map(|t| t.as_ref().to_lowercase()).collect();
    let max_len = gazetteer.longest.min(lowered.len());
    for len in 1..=max_len {
        for window in lowered.windows(len) {
            if gazetteer.entries.contains(&window.join(" ")) {
                return true;
            }
        }
    }
    gazetteer.heuristic_hit(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wordlist_basics() {
        let lex = load_wordlist("clothing\nfootwear\n".as_bytes(), PartOfSpeech::Noun).unwrap();
        assert_eq!(lex.len(), 2);
        assert!(lex.contains("clothing"));
        let lex = load_wordlist("# comment\n\nWater Faucet\n".as_bytes(), PartOfSpeech::Noun).unwrap();
        assert!(lex.contains("water_faucet"));
        assert!(lex.contains("WATER faucet"));
        assert_eq!(lex.len(), 1);
    }

    #[test]
    fn wordlist_rejects_bad_lines() {
        let err = load_wordlist("ok\n_bad\n".as_bytes(), PartOfSpeech::Noun).unwrap_err();
        assert!(matches!(err, LexiconError::Format { line: 2, .. }));
        let err = load_wordlist("a__b\n".as_bytes(), PartOfSpeech::Noun).unwrap_err();
        assert!(matches!(err, LexiconError::Format { line: 1, .. }));
    }

    #[test]
    fn wndb_index() {
        let text = "  1 This software and database is being provided\n  2 header\nbaseball_coach n 1 1 @ 1 0 09841188\n";
        let lex = load_wndb_index(text.as_bytes(), PartOfSpeech::Noun).unwrap();
        assert_eq!(lex.len(), 1);
        assert!(lex.contains("baseball_coach"));
        let err = load_wndb_index("  hdr\nlonely\n".as_bytes(), PartOfSpeech::Noun).unwrap_err();
        assert!(matches!(err, LexiconError::Format { line: 2, .. }));
    }

    #[test]
    fn plural_fallback() {
        let lex = Lexicon::from_entries(PartOfSpeech::Noun, ["plant", "church", "man", "city"]).unwrap();
        assert_eq!(lex.lookup("plants").as_deref(), Some("plant"));
        assert_eq!(lex.lookup("churches").as_deref(), Some("church"));
        assert_eq!(lex.lookup("men").as_deref(), Some("man"));
        assert_eq!(lex.lookup("cities").as_deref(), Some("city"));
        assert_eq!(lex.lookup("glass"), None);
        let verbs = Lexicon::from_entries(PartOfSpeech::Verb, ["plant"]).unwrap();
        assert_eq!(verbs.lookup("plants"), None);
    }

    #[test]
    fn rightmost_entry() {
        let lex = Lexicon::from_entries(PartOfSpeech::Noun, ["sandpiper"]).unwrap();
        assert_eq!(
            longest_rightmost_entry(&lex, &["large", "plover-like", "sandpiper"]),
            Some((2, "sandpiper".to_string()))
        );
        let lex = Lexicon::from_entries(PartOfSpeech::Noun, ["coach"]).unwrap();
        assert_eq!(longest_rightmost_entry(&lex, &["coach"]), Some((0, "coach".to_string())));
        assert_eq!(longest_rightmost_entry(&lex, &["coach", "house"]), None);
    }

    #[test]
    fn gazetteers() {
        let loc = Gazetteer::from_entries(GazetteerKind::Location, ["frontier"]);
        assert!(gazetteer_match(&loc, &["on", "the", "frontier"]));
        let time = Gazetteer::new(GazetteerKind::Time);
        assert!(!gazetteer_match(&time, &["at", "formal", "occasions"]));
        assert!(gazetteer_match(&time, &["in", "the", "19th", "century"]));
        assert!(gazetteer_match(&time, &["in", "1848"]));
        assert!(gazetteer_match(&time, &["every", "March"]));
        assert!(!gazetteer_match(&time, &["they", "march"]));
        let multi = Gazetteer::from_entries(GazetteerKind::Location, ["Lake District"]);
        assert!(gazetteer_match(&multi, &["in", "the", "lake", "district"]));
        assert!(!gazetteer_match(&multi, &["lake"]));
    }

    proptest! {
        #[test]
        fn normalization_idempotent(s in "[ a-zA-Z_]{0,20}") {
            let once = normalize_entry(&s);
            prop_assert_eq!(normalize_entry(&once), once.clone());
            let p = normalize_phrase(&s);
            prop_assert_eq!(normalize_phrase(&p), p.clone());
        }

        #[test]
        fn membership_ignores_case_and_separators(words in proptest::collection::vec("[a-z]{1,6}", 1..4)) {
            let lex = Lexicon::from_entries(PartOfSpeech::Verb, [words.join(" ")]).unwrap();
            let upper = words.iter().map(|w| w.to_uppercase()).collect::<Vec<_>>();
            prop_assert!(lex.contains(&upper.join("   ")));
            prop_assert!(lex.contains(&words.join("_")));
        }
    }
}

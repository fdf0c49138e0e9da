//! Built-in lexicons, gazetteers and the worked-example corpus.
//!
//! These are small hand-written resources; a full WordNet index can be
//! loaded at run time instead.

use crate::corpus::{read_corpus, DefinitionRecord};
use crate::labeler::LabelerConfig;
use crate::lexicon::{load_wordlist, Gazetteer, GazetteerKind, PartOfSpeech};

pub const NOUN_LEXICON: &str = include_str!("../data/noun_lexicon.txt");
pub const VERB_LEXICON: &str = include_str!("../data/verb_lexicon.txt");
pub const LOCATION_GAZETTEER: &str = include_str!("../data/location_gazetteer.txt");
pub const TIME_GAZETTEER: &str = include_str!("../data/time_gazetteer.txt");
pub const EXAMPLES_JSONL: &str = include_str!("../data/worked_examples.jsonl");

/// Labeler configuration backed by the built-in resources.
pub fn default_config() -> LabelerConfig {
    LabelerConfig::new(
        load_wordlist(NOUN_LEXICON.as_bytes(), PartOfSpeech::Noun).expect("built-in noun lexicon"),
        load_wordlist(VERB_LEXICON.as_bytes(), PartOfSpeech::Verb).expect("built-in verb lexicon"),
        Gazetteer::load(LOCATION_GAZETTEER.as_bytes(), GazetteerKind::Location).expect("built-in gazetteer"),
        Gazetteer::load(TIME_GAZETTEER.as_bytes(), GazetteerKind::Time).expect("built-in gazetteer"),
    )
}

/// The fifteen worked examples, each with a tree and a gold annotation.
pub fn worked_examples() -> Vec<DefinitionRecord> {
    let read = read_corpus(EXAMPLES_JSONL).expect("built-in examples parse");
    assert!(read.diagnostics.is_empty(), "{:?}", read.diagnostics);
    read.records
}

//! Entity-centered semantic role labeling of dictionary definitions.
//!
//! A definition's constituency parse ([`syntree`]) is labeled by a rule
//! engine ([`labeler`]) with roles such as supertype, differentia quality and
//! purpose ([`rolemodel`]), using lexicons and gazetteers ([`lexicon`]).
//! Annotations are summarized as role patterns ([`patterns`]), read and
//! written as line-delimited corpora ([`corpus`]) and scored against gold
//! annotations ([`metrics`]).

pub mod cli;
pub mod corpus;
pub mod data;
pub mod labeler;
pub mod lexicon;
pub mod metrics;
pub mod patterns;
pub mod rolemodel;
pub mod syntree;

pub use corpus::{read_corpus, write_corpus, DefinitionRecord};
pub use labeler::{label, LabelOutcome, LabelerConfig};
pub use lexicon::{Gazetteer, Lexicon, PartOfSpeech};
pub use metrics::{evaluate, EvalReport, Prf};
pub use patterns::{pattern_of, Pattern};
pub use rolemodel::{parse_gold, serialize_gold, validate, Annotation, Role, RoleSpan};
pub use syntree::{parse_bracketed, Span, SynTree};

pub type EvalReport64 = EvalReport<f64>;
pub type EvalReport32 = EvalReport<f32>;
pub type Prf64 = Prf<f64>;
pub type Prf32 = Prf<f32>;

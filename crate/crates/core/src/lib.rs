//! Address named-entity recognition core.
//!
//! BIO-tagged sentences over four address entity types (street, house
//! number, municipality, postcode), synthetic corpus generation from
//! gazetteers and sentence frames, a linear-chain perceptron tagger with
//! constrained Viterbi decoding, and evaluation utilities.
//!
//! The crate is `no_std` and needs only `alloc`; file formats, model
//! persistence, HTTP and the command line live in the `addrtag` crate.

#![no_std]

extern crate alloc;

pub mod augment;
pub mod error;
pub mod eval;
pub mod gazetteer;
pub mod generate;
pub mod sentence;
pub mod tag;
pub mod tagger;

pub use error::{Error, Result};
pub use gazetteer::{CaseMode, Gazetteer, HouseNumber, NameKind, PostcodeSpec};
pub use sentence::{
    extract_entities, spans_to_tags, tokenize, validate_bio, BioVerdict, Corpus, EntitySpan, TaggedSentence, Token,
};
pub use tag::{EntityType, Tag, NUM_TAGS};

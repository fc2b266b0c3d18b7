//! File formats, model persistence, the template-augmentation client and
//! the `addrtag` command line, on top of [`addrtag_core`].

pub mod cli;
pub mod corpus_io;
pub mod error;
pub mod gazetteer_io;
pub mod llm;
pub mod manifest;
pub mod model_io;
pub mod review;

pub use addrtag_core as core;
pub use error::{Error, Result};

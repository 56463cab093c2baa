//! Toolkit for annotating Central Kurdish (Sorani) text with a fine-grained
//! 97-tag part-of-speech inventory.
//!
//! The crate is organised bottom-up:
//!
//! * [`tagset`] - the closed tag registry, its category tree and the
//!   Universal Dependencies mapping.
//! * [`tokenizer`] - Arabic-script normalisation, tokenisation and sentence
//!   splitting with codepoint offsets.
//! * [`morphology`] - lexicon and affix driven word segmentation.
//! * [`suggestion`] - deterministic, explainable tag suggestion rules.
//! * [`corpus`] - document storage, annotations, CoNLL-U import/export and
//!   statistics.

#[cfg(feature = "corpus")]
pub mod corpus;
pub mod error;
pub mod morphology;
pub mod suggestion;
pub mod tagset;
pub mod tokenizer;

pub use error::{Error, Result};
pub use tagset::{TagCategory, TagDescriptor, TagRegistry, UdMode};

//! Dictionary-based cross-lingual query translation and retrieval.
//!
//! Query terms are looked up in a bilingual dictionary; each term's
//! candidate list is extended with corpus terms one or two edits away from a
//! candidate that co-occur with another term's candidates, and the final
//! translation is chosen by co-occurrence probability. Top-N and structured
//! (synonym-group) translation baselines, BM25 retrieval with pseudo
//! relevance feedback, and TREC-style evaluation complete the pipeline.

pub mod baselines;
pub mod config;
pub mod corpus_index;
pub mod edit_distance;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod mesc_model;
pub mod retrieval;
pub mod text;
pub mod topics;
pub mod translit;

pub use corpus_index::{
    build_index, ingest_corpus, load_index, save_index, CooccurrenceIndex, DocumentCollection,
};
pub use error::{Error, Result};
pub use lexicon::{load_dictionary, BilingualDictionary, Candidate};
pub use mesc_model::{translate_query, MescConfig, TranslationResult};
pub use text::TokenizerConfig;

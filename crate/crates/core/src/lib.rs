//! Data preparation and evaluation toolkit for Sanskrit summarization.
//!
//! * [`devanagari`]: cleaning, tokens and sentences;
//! * [`sandhi`]: two-phase rule-based sandhi/samyoga splitting;
//! * [`corpus`]: LM sentence corpus and document-summary pairs;
//! * [`summetrics`]: corpus counts, novelty, compression, suitability;
//! * [`rouge`]: ROUGE-N and ROUGE-L;
//! * [`ledger`]: loss ledgers, perplexity, early stopping;
//! * [`human_eval`]: scaled-ranking counts and best-worst scores;
//! * [`config`]: flat `key = value` configuration and source manifests.

pub mod config;
pub mod corpus;
pub mod devanagari;
pub mod error;
pub mod human_eval;
pub mod ledger;
pub mod rouge;
pub mod sandhi;
pub mod summetrics;

pub use devanagari::{normalize, segment_sentences, tokenize, CharClass, CleanText};
pub use error::{Error, Result};

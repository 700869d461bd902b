//! Build a 10-K corpus from the SEC EDGAR archive and train word vectors on it.
//!
//! The pipeline has four stages, each usable on its own:
//!
//! 1. [`edgar`] reads quarterly master indices, selects 10-K filings and
//!    downloads them politely (rate limited, cached, retried).
//! 2. [`clean`] unwraps the SGML envelope, drops numeric tables and strips
//!    HTML down to plain text.
//! 3. [`items`] segments the text into the twenty 10-K item sections and
//!    produces one [`items::FilingRecord`] per filing.
//! 4. [`stats`], [`embeddings`] and [`eval`] summarize the corpus, train
//!    skip-gram vectors on it and score those vectors on hypernym
//!    classification.
//!
//! [`cli`] wires everything into the `edgar-corpus` binary.

pub mod clean;
pub mod cli;
pub mod edgar;
pub mod embeddings;
pub mod eval;
pub mod items;
pub mod stats;

/// Version of the JSON record layout written by `extract`.
pub const RECORD_SCHEMA_VERSION: u32 = 1;

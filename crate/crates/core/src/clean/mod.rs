//! Raw EDGAR submission to plain text: SGML envelope handling, numeric
//! table removal, HTML stripping and whitespace normalization.

mod decode;
mod markup;
mod sgml;
mod tables;

use std::collections::HashMap;

use chrono::{Datelike, NaiveDate};

use crate::edgar::FilingMetadata;

pub use decode::{decode_document, Decoded};
pub use markup::{
    normalize_whitespace, strip_markup, strip_markup_with_mode, StrippedText, TextMode, ENTITY_PATTERN,
    TAG_PATTERN,
};
pub use sgml::{SgmlDocument, SgmlHeader};
pub use tables::{numeric_density, remove_tables, TableRemoval, NUMERIC_DENSITY_THRESHOLD};

/// A downloaded submission, full SGML envelope included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawFiling {
    pub bytes: Vec<u8>,
    pub meta: FilingMetadata,
    pub period_of_report: Option<NaiveDate>,
    /// Name of the local file the bytes came from.
    pub filename: String,
}

impl RawFiling {
    /// Wraps downloaded bytes, reading the period of report from the SGML
    /// header when there is one.
    pub fn new(bytes: Vec<u8>, meta: FilingMetadata) -> Self {
        let period_of_report = SgmlHeader::parse(&bytes).period_of_report;
        let filename = meta.download_filename();
        RawFiling { bytes, meta, period_of_report, filename }
    }

    pub fn with_filename(mut self, filename: impl Into<String>) -> Self {
        self.filename = filename.into();
        self
    }

    /// Year the report covers: the period of report when the header has
    /// one, else the filing year.
    pub fn fiscal_year(&self) -> i32 {
        self.period_of_report.map_or(self.meta.date_filed.year(), |d| d.year())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanDocument {
    pub meta: FilingMetadata,
    pub text: String,
    pub fiscal_year: i32,
    pub source_filename: String,
    pub removed_tables: usize,
    pub retained_tables: usize,
    pub removed_markup_bytes: usize,
    pub replaced_chars: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CleanError {
    #[error("{filename}: filing is empty")]
    Empty { filename: String },
    #[error("{filename}: SGML envelope contains no documents")]
    NoDocuments { filename: String },
}

/// Optional normalizations beyond table removal and HTML stripping.
/// Both are off by default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CleanOptions {
    /// Drop lines that are only a page number ("12", "- 12 -", "Page 12").
    pub strip_page_numbers: bool,
    /// Drop short lines repeated on many pages (running headers/footers).
    pub strip_repeated_lines: bool,
}

/// Running headers are lines of at most this many bytes that appear at
/// least [`REPEATED_LINE_MIN_COUNT`] times.
const REPEATED_LINE_MAX_LEN: usize = 80;
const REPEATED_LINE_MIN_COUNT: usize = 3;

/// Splits a submission into its documents. Without an envelope the whole
/// input is one document typed as the filing's form.
pub fn split_sgml_documents(raw: &RawFiling) -> Result<Vec<SgmlDocument>, CleanError> {
    if raw.bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(CleanError::Empty { filename: raw.filename.clone() });
    }
    match sgml::split_blocks(&raw.bytes) {
        None => Ok(vec![SgmlDocument { doc_type: raw.meta.form_type.clone(), content: raw.bytes.clone() }]),
        Some(docs) if docs.is_empty() => Err(CleanError::NoDocuments { filename: raw.filename.clone() }),
        Some(docs) => Ok(docs),
    }
}

/// The first document typed as the filing's form, else the first
/// 10-K-like document, else the first document.
pub fn main_document<'a>(docs: &'a [SgmlDocument], form_type: &str) -> Option<&'a SgmlDocument> {
    docs.iter()
        .find(|d| d.doc_type.eq_ignore_ascii_case(form_type))
        .or_else(|| docs.iter().find(|d| d.doc_type.to_ascii_uppercase().starts_with("10-K")))
        .or_else(|| docs.first())
}

pub fn clean(raw: &RawFiling) -> Result<CleanDocument, CleanError> {
    clean_with(raw, &CleanOptions::default())
}

/// split, select main document, decode, remove numeric tables, strip
/// markup, normalize.
pub fn clean_with(raw: &RawFiling, options: &CleanOptions) -> Result<CleanDocument, CleanError> {
    let docs = split_sgml_documents(raw)?;
    let main = main_document(&docs, &raw.meta.form_type)
        .ok_or_else(|| CleanError::NoDocuments { filename: raw.filename.clone() })?;
    let decoded = decode_document(&main.content);
    let mode = TextMode::detect(&decoded.text);
    let tables = remove_tables(&decoded.text);
    let stripped = strip_markup_with_mode(&tables.text, mode);
    let mut text = stripped.text;
    if options.strip_page_numbers {
        text = drop_page_number_lines(&text);
    }
    if options.strip_repeated_lines {
        text = drop_repeated_lines(&text);
    }
    Ok(CleanDocument {
        meta: raw.meta.clone(),
        text,
        fiscal_year: raw.fiscal_year(),
        source_filename: raw.filename.clone(),
        removed_tables: tables.removed,
        retained_tables: tables.retained,
        removed_markup_bytes: stripped.removed_markup_bytes,
        replaced_chars: decoded.replaced,
    })
}

fn is_page_number_line(line: &str) -> bool {
    let t = line.trim().trim_matches(|c: char| c == '-' || c.is_whitespace());
    let t = t.strip_prefix("Page ").or_else(|| t.strip_prefix("PAGE ")).unwrap_or(t).trim();
    !t.is_empty() && t.len() <= 4 && t.chars().all(|c| c.is_ascii_digit())
}

fn drop_page_number_lines(text: &str) -> String {
    text.lines().filter(|l| !is_page_number_line(l)).collect::<Vec<_>>().join("\n")
}

fn drop_repeated_lines(text: &str) -> String {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for line in text.lines().filter(|l| l.len() <= REPEATED_LINE_MAX_LEN) {
        *counts.entry(line).or_default() += 1;
    }
    text.lines()
        .filter(|l| {
            // Never drop something that reads as an item heading.
            let heading = l.trim_start().to_ascii_lowercase().starts_with("item");
            heading || counts.get(l).is_none_or(|&n| n < REPEATED_LINE_MIN_COUNT)
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#![allow(dead_code)]

pub mod fragments;
pub mod mock;
pub mod pipeline;
pub mod recount;
pub mod synth;
pub mod toy;

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use edgar_corpus::clean::RawFiling;
use edgar_corpus::edgar::FilingMetadata;
use serde::Deserialize;

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// The checked-in JSON schema of extracted records.
pub fn record_schema() -> serde_json::Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/filing_record.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn archive_dir() -> PathBuf {
    fixtures_dir().join("edgar/archive")
}

/// Hand counts written next to each generated filing.
#[derive(Debug, Clone, Deserialize)]
pub struct ExpectedFiling {
    pub filename: String,
    pub archive_path: String,
    pub cik: u64,
    pub company: String,
    pub form_type: String,
    pub date_filed: NaiveDate,
    pub fiscal_year: i32,
    pub style: String,
    pub quirks: Vec<String>,
    pub removed_tables: usize,
    pub retained_tables: usize,
    pub items_with_headings: Vec<String>,
    pub item_7_expected: bool,
}

impl ExpectedFiling {
    pub fn meta(&self) -> FilingMetadata {
        FilingMetadata {
            cik: self.cik,
            company_name: self.company.clone(),
            form_type: self.form_type.clone(),
            date_filed: self.date_filed,
            archive_path: self.archive_path.clone(),
        }
    }

    pub fn raw(&self) -> RawFiling {
        let bytes = std::fs::read(archive_dir().join(&self.archive_path)).unwrap();
        RawFiling::new(bytes, self.meta())
    }
}

pub fn expected_filings() -> Vec<ExpectedFiling> {
    let text = std::fs::read_to_string(fixtures_dir().join("edgar/expected.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Checks that the non-empty items occur in `text` in item order without
/// overlapping. Returns a description of the first violation.
pub fn check_layout(text: &str, items: &[(String, &str)]) -> Result<(), String> {
    let mut cursor = 0;
    for (code, item) in items {
        if item.is_empty() {
            continue;
        }
        match text[cursor..].find(item) {
            Some(p) => cursor += p + item.len(),
            None => return Err(format!("item {code} is not a subsequence after byte {cursor}")),
        }
    }
    Ok(())
}

//! Segmentation of a clean 10-K into its twenty item sections.

mod code;
mod headings;
mod record;
mod sections;

use std::collections::{BTreeMap, BTreeSet};
use std::io;

use serde::Serialize;

use crate::clean::CleanDocument;

pub use code::{ItemCode, UnknownItemCode};
pub use headings::{find_heading_candidates, HeadingCandidate};
pub use record::{FilingRecord, RecordError};
pub use sections::{resolve_sections, toc_like, TOC_MIN_HEADINGS, TOC_WINDOW_BYTES};

/// Which items to fill in a record.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ItemSelection {
    #[default]
    All,
    Only(BTreeSet<ItemCode>),
}

impl ItemSelection {
    pub fn contains(&self, code: ItemCode) -> bool {
        match self {
            ItemSelection::All => true,
            ItemSelection::Only(set) => set.contains(&code),
        }
    }

    /// Parses a comma-separated list such as `1A,7,7A`.
    pub fn parse_list(list: &str) -> Result<ItemSelection, UnknownItemCode> {
        let codes = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<BTreeSet<ItemCode>, _>>()?;
        Ok(if codes.is_empty() { ItemSelection::All } else { ItemSelection::Only(codes) })
    }
}

/// Item text by code for a clean text, every resolved item included.
pub fn split_items(text: &str) -> BTreeMap<ItemCode, &str> {
    let candidates = find_heading_candidates(text);
    resolve_sections(&candidates, text).into_iter().map(|(code, span)| (code, &text[span])).collect()
}

/// Builds the record for one clean document. Items not wanted or not found
/// are empty strings; `year` is the fiscal year.
pub fn extract(doc: &CleanDocument, wanted: &ItemSelection) -> FilingRecord {
    let mut record = FilingRecord::new(doc.source_filename.clone(), doc.meta.cik.to_string(), doc.fiscal_year.to_string());
    for (code, text) in split_items(&doc.text) {
        if wanted.contains(code) {
            record.set_item(code, text);
        }
    }
    record
}

/// Per-item counts for one year partition.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractionStats {
    pub filings_total: usize,
    pub empty_records: usize,
    pub non_empty: [usize; 20],
}

#[derive(Serialize)]
struct StatsRow<'a> {
    item_code: &'a str,
    filings_total: usize,
    filings_with_item_nonempty: usize,
}

impl ExtractionStats {
    pub fn add(&mut self, record: &FilingRecord) {
        self.filings_total += 1;
        if record.is_empty() {
            self.empty_records += 1;
        }
        for code in record.non_empty_items() {
            self.non_empty[code.index()] += 1;
        }
    }

    /// CSV with columns `item_code,filings_total,filings_with_item_nonempty`.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for code in ItemCode::ALL {
            w.serialize(StatsRow {
                item_code: code.code(),
                filings_total: self.filings_total,
                filings_with_item_nonempty: self.non_empty[code.index()],
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

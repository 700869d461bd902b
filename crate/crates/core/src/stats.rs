//! Corpus-level statistics over extracted records: size in tokens, number
//! of companies, year range and how often each item is present.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};

use crate::items::{FilingRecord, ItemCode};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusSummary {
    /// Whitespace-delimited tokens over all item fields.
    pub total_tokens: u64,
    pub filings: u64,
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
    /// Records that could not be parsed, skipped.
    pub malformed: u64,
    ciks: HashSet<String>,
    item_non_empty: [u64; 20],
}

impl CorpusSummary {
    pub fn distinct_ciks(&self) -> usize {
        self.ciks.len()
    }

    /// `None` when no record has been seen.
    pub fn year_range(&self) -> Option<(i32, i32)> {
        self.year_min.zip(self.year_max)
    }

    pub fn item_non_empty(&self, code: ItemCode) -> u64 {
        self.item_non_empty[code.index()]
    }

    /// Share of filings whose item is non-empty; 0 for an empty corpus.
    pub fn coverage(&self, code: ItemCode) -> f64 {
        if self.filings == 0 {
            0.0
        } else {
            self.item_non_empty(code) as f64 / self.filings as f64
        }
    }

    pub fn per_item_coverage(&self) -> BTreeMap<ItemCode, f64> {
        ItemCode::ALL.into_iter().map(|c| (c, self.coverage(c))).collect()
    }

    pub fn add(&mut self, record: &FilingRecord) {
        let Ok(year) = record.year.trim().parse::<i32>() else {
            self.malformed += 1;
            return;
        };
        self.filings += 1;
        self.year_min = Some(self.year_min.map_or(year, |y| y.min(year)));
        self.year_max = Some(self.year_max.map_or(year, |y| y.max(year)));
        if !self.ciks.contains(&record.cik) {
            self.ciks.insert(record.cik.clone());
        }
        for (code, text) in record.items() {
            if !text.is_empty() {
                self.item_non_empty[code.index()] += 1;
                self.total_tokens += text.split_whitespace().count() as u64;
            }
        }
    }

    /// Combines two partial summaries; the result does not depend on how
    /// records were split between them.
    pub fn merge(mut self, other: CorpusSummary) -> CorpusSummary {
        self.total_tokens += other.total_tokens;
        self.filings += other.filings;
        self.malformed += other.malformed;
        self.year_min = match (self.year_min, other.year_min) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.year_max = match (self.year_max, other.year_max) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self.ciks.extend(other.ciks);
        for (mine, theirs) in self.item_non_empty.iter_mut().zip(other.item_non_empty) {
            *mine += theirs;
        }
        self
    }
}

/// One streaming pass over records; errors count as malformed.
pub fn summarize<I, E>(records: I) -> CorpusSummary
where
    I: IntoIterator<Item = Result<FilingRecord, E>>,
{
    let mut summary = CorpusSummary::default();
    for record in records {
        match record {
            Ok(r) => summary.add(&r),
            Err(_) => summary.malformed += 1,
        }
    }
    summary
}

/// `*.jsonl` files directly under `dir`, sorted by name.
pub fn jsonl_files(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    Ok(files)
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

/// Streams every record of every JSONL file in `dir`. Blank lines are
/// skipped; unparsable lines come out as errors.
pub fn read_records(dir: &Path) -> io::Result<impl Iterator<Item = Result<FilingRecord, ReadError>>> {
    let files = jsonl_files(dir)?;
    Ok(files.into_iter().flat_map(|path| {
        let lines: Box<dyn Iterator<Item = Result<FilingRecord, ReadError>>> = match File::open(&path) {
            Ok(f) => {
                let path = path.clone();
                Box::new(BufReader::new(f).lines().enumerate().filter_map(move |(i, line)| match line {
                    Ok(l) if l.trim().is_empty() => None,
                    Ok(l) => Some(serde_json::from_str(&l).map_err(|source| ReadError::Parse {
                        path: path.clone(),
                        line: i + 1,
                        source,
                    })),
                    Err(source) => Some(Err(ReadError::Io { path: path.clone(), source })),
                }))
            }
            Err(source) => Box::new(std::iter::once(Err(ReadError::Io { path, source }))),
        };
        lines
    }))
}

/// Token count in Table-1 style: `6.5B`, `247.7M`, `242M`, below a million
/// with thousands separators.
pub fn format_count(n: u64) -> String {
    let scaled = |value: f64, suffix: &str| {
        let s = format!("{value:.1}");
        format!("{}{suffix}", s.strip_suffix(".0").unwrap_or(&s))
    };
    if n >= 1_000_000_000 {
        scaled(n as f64 / 1e9, "B")
    } else if n >= 1_000_000 {
        scaled(n as f64 / 1e6, "M")
    } else {
        with_separators(n)
    }
}

pub fn with_separators(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// Fixed-width table with the columns of a corpus comparison:
/// corpus, filing type, reports, tokens, companies, years.
pub fn report(summary: &CorpusSummary) -> String {
    let empty = summary.filings == 0;
    let dash = || "-".to_string();
    let row = [
        "edgar-corpus".to_string(),
        "10-K".to_string(),
        if empty { dash() } else { with_separators(summary.filings) },
        if empty { dash() } else { format_count(summary.total_tokens) },
        if empty { dash() } else { with_separators(summary.distinct_ciks() as u64) },
        match summary.year_range() {
            Some((a, b)) => format!("{a}-{b}"),
            None => dash(),
        },
    ];
    let header = ["Corpus", "Filings", "Reports", "Tokens", "Companies", "Years"];
    let widths: Vec<usize> = header.iter().zip(&row).map(|(h, r)| h.len().max(r.len())).collect();
    let line = |cells: &[&str]| {
        cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect::<Vec<_>>()
            .join(" | ")
    };
    let rule: String = widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-");
    let mut out = String::new();
    out.push_str(&line(&header));
    out.push('\n');
    out.push_str(&rule);
    out.push('\n');
    out.push_str(&line(&row.iter().map(String::as_str).collect::<Vec<_>>()));
    out.push('\n');
    if summary.malformed > 0 {
        out.push_str(&format!("({} malformed records skipped)\n", summary.malformed));
    }
    out
}

/// Per-item coverage CSV: `item_code,filings,filings_with_item,coverage`.
pub fn write_coverage_csv<W: io::Write>(summary: &CorpusSummary, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["item_code", "filings", "filings_with_item", "coverage"])?;
    for code in ItemCode::ALL {
        w.write_record([
            code.code().to_string(),
            summary.filings.to_string(),
            summary.item_non_empty(code).to_string(),
            format!("{:.6}", summary.coverage(code)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

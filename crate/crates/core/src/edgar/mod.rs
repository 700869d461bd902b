//! EDGAR archive access: quarterly master indices, filing selection and
//! rate-limited, cached downloads.

mod client;
mod index;
mod ratelimit;
mod transport;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Duration;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

pub use client::{
    CrawlReport, DownloadOutcome, EdgarClient, FailureRecord, ManifestEntry, FAILURES_MANIFEST, FILINGS_SUBDIR,
    METADATA_MANIFEST,
};
pub use index::{parse_master_index, select_filings, IndexListing};
pub use ratelimit::RateLimiter;
pub use transport::{HttpResponse, ReplayTransport, Transport, TransportError, UreqTransport};

/// First year with electronic filings on EDGAR.
pub const FIRST_EDGAR_YEAR: i32 = 1993;

/// SEC fair-access ceiling, requests per second.
pub const MAX_RATE_LIMIT: u32 = 10;

pub const DEFAULT_ARCHIVE_BASE_URL: &str = "https://www.sec.gov/Archives";

/// One row of an EDGAR master index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FilingMetadata {
    pub cik: u64,
    pub company_name: String,
    pub form_type: String,
    pub date_filed: NaiveDate,
    /// Path relative to the archive root, e.g.
    /// `edgar/data/320193/0000320193-20-000096.txt`.
    pub archive_path: String,
}

impl FilingMetadata {
    /// Accession number, the file stem of the archive path.
    pub fn accession(&self) -> &str {
        let name = self.archive_path.rsplit('/').next().unwrap_or(&self.archive_path);
        name.rsplit_once('.').map_or(name, |(stem, _)| stem)
    }

    pub fn year_filed(&self) -> i32 {
        self.date_filed.year()
    }

    /// File name used for the downloaded copy in the output directory,
    /// `{cik}_{form}_{year}_{accession}.txt`.
    pub fn download_filename(&self) -> String {
        let form: String = self
            .form_type
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
            .collect();
        format!("{}_{}_{}_{}.txt", self.cik, form, self.year_filed(), self.accession())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("start_year {0} is before {FIRST_EDGAR_YEAR}, the first EDGAR year")]
    StartYearTooEarly(i32),
    #[error("start_year {start} is after end_year {end}")]
    YearsReversed { start: i32, end: i32 },
    #[error("rate_limit must be between 1 and {MAX_RATE_LIMIT} requests per second, got {0}")]
    RateLimit(u32),
    #[error("user_agent is required (SEC asks for a contact string such as \"Name email@example.com\")")]
    MissingUserAgent,
    #[error("retry_attempts must be at least 1")]
    RetryAttempts,
}

#[derive(Debug, Clone)]
pub struct CrawlConfig {
    pub start_year: i32,
    pub end_year: i32,
    pub cik_filter: Option<BTreeSet<u64>>,
    pub form_types: BTreeSet<String>,
    pub rate_limit: u32,
    pub user_agent: String,
    pub cache_dir: PathBuf,
    pub output_dir: PathBuf,
    pub archive_base_url: String,
    pub retry_attempts: u32,
    /// Delay before the second attempt; doubles for every further attempt.
    pub retry_backoff: Duration,
    pub workers: usize,
}

impl Default for CrawlConfig {
    fn default() -> Self {
        CrawlConfig {
            start_year: FIRST_EDGAR_YEAR,
            end_year: 2020,
            cik_filter: None,
            form_types: ["10-K".to_string()].into_iter().collect(),
            rate_limit: MAX_RATE_LIMIT,
            user_agent: String::new(),
            cache_dir: PathBuf::from("cache"),
            output_dir: PathBuf::from("filings"),
            archive_base_url: DEFAULT_ARCHIVE_BASE_URL.to_string(),
            retry_attempts: 3,
            retry_backoff: Duration::from_secs(1),
            workers: 4,
        }
    }
}

impl CrawlConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.start_year < FIRST_EDGAR_YEAR {
            return Err(ConfigError::StartYearTooEarly(self.start_year));
        }
        if self.start_year > self.end_year {
            return Err(ConfigError::YearsReversed { start: self.start_year, end: self.end_year });
        }
        if self.rate_limit == 0 || self.rate_limit > MAX_RATE_LIMIT {
            return Err(ConfigError::RateLimit(self.rate_limit));
        }
        if self.user_agent.trim().is_empty() {
            return Err(ConfigError::MissingUserAgent);
        }
        if self.retry_attempts == 0 {
            return Err(ConfigError::RetryAttempts);
        }
        Ok(())
    }

    pub fn contains_year(&self, year: i32) -> bool {
        (self.start_year..=self.end_year).contains(&year)
    }

    /// The 10-K variants that the SEC used before 2008 alongside plain 10-K.
    pub fn with_variants(mut self) -> Self {
        for form in ["10-K405", "10-KSB", "10-KSB40", "10-KT", "10-K/A"] {
            self.form_types.insert(form.to_string());
        }
        self
    }

    pub fn index_url(&self, year: i32, quarter: u8) -> String {
        format!(
            "{}/edgar/full-index/{year}/QTR{quarter}/master.idx",
            self.archive_base_url.trim_end_matches('/')
        )
    }

    pub fn filing_url(&self, meta: &FilingMetadata) -> String {
        format!(
            "{}/{}",
            self.archive_base_url.trim_end_matches('/'),
            meta.archive_path.trim_start_matches('/')
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EdgarError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{year} Q{quarter} is outside the configured window or not a quarter")]
    OutOfWindow { year: i32, quarter: u8 },
    #[error("GET {url} failed after {attempts} attempt(s): {source}")]
    Network {
        url: String,
        attempts: u32,
        #[source]
        source: TransportError,
    },
    #[error("GET {url} returned HTTP {status} after {attempts} attempt(s)")]
    Http { url: String, status: u16, attempts: u32 },
    #[error("cache I/O on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl EdgarError {
    /// Whether trying again later may succeed.
    pub fn is_retriable(&self) -> bool {
        match self {
            EdgarError::Network { .. } => true,
            EdgarError::Http { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apple() -> FilingMetadata {
        FilingMetadata {
            cik: 320193,
            company_name: "APPLE INC".into(),
            form_type: "10-K".into(),
            date_filed: NaiveDate::from_ymd_opt(2020, 10, 30).unwrap(),
            archive_path: "edgar/data/320193/0000320193-20-000096.txt".into(),
        }
    }

    #[test]
    fn accession_and_filename() {
        let m = apple();
        assert_eq!(m.accession(), "0000320193-20-000096");
        assert_eq!(m.download_filename(), "320193_10-K_2020_0000320193-20-000096.txt");
        let amended = FilingMetadata { form_type: "10-K/A".into(), ..apple() };
        assert_eq!(amended.download_filename(), "320193_10-K-A_2020_0000320193-20-000096.txt");
    }

    #[test]
    fn config_validation() {
        let ok = CrawlConfig { user_agent: "Jane Doe jane@example.com".into(), ..Default::default() };
        ok.validate().unwrap();
        let early = CrawlConfig { start_year: 1992, ..ok.clone() };
        assert_eq!(early.validate(), Err(ConfigError::StartYearTooEarly(1992)));
        let reversed = CrawlConfig { start_year: 2001, end_year: 2000, ..ok.clone() };
        assert!(matches!(reversed.validate(), Err(ConfigError::YearsReversed { .. })));
        let fast = CrawlConfig { rate_limit: 11, ..ok.clone() };
        assert_eq!(fast.validate(), Err(ConfigError::RateLimit(11)));
        let anon = CrawlConfig { user_agent: "  ".into(), ..ok.clone() };
        assert_eq!(anon.validate(), Err(ConfigError::MissingUserAgent));
        assert!(ConfigError::MissingUserAgent.to_string().contains("user_agent"));
    }

    #[test]
    fn urls() {
        let c = CrawlConfig { archive_base_url: "http://mirror/Archives/".into(), ..Default::default() };
        assert_eq!(c.index_url(2020, 4), "http://mirror/Archives/edgar/full-index/2020/QTR4/master.idx");
        assert_eq!(
            c.filing_url(&apple()),
            "http://mirror/Archives/edgar/data/320193/0000320193-20-000096.txt"
        );
    }

    #[test]
    fn variants_toggle() {
        let c = CrawlConfig::default();
        assert_eq!(c.form_types.len(), 1);
        let c = c.with_variants();
        assert!(c.form_types.contains("10-K405") && c.form_types.contains("10-KSB"));
    }
}

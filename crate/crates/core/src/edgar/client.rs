use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;

use serde::{Deserialize, Serialize};
use tracing::{info, warn};

use super::index::{parse_master_index, select_filings, IndexListing};
use super::ratelimit::RateLimiter;
use super::transport::Transport;
use super::{CrawlConfig, EdgarError, FilingMetadata};
use crate::clean::RawFiling;

pub const METADATA_MANIFEST: &str = "metadata.jsonl";
pub const FAILURES_MANIFEST: &str = "failures.jsonl";
pub const FILINGS_SUBDIR: &str = "filings";

/// One line of the failures manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub cik: u64,
    pub archive_path: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct DownloadOutcome {
    pub raw: RawFiling,
    pub from_cache: bool,
}

#[derive(Debug, Clone, Default)]
pub struct CrawlReport {
    pub indices_fetched: usize,
    pub index_failures: Vec<String>,
    pub skipped_index_lines: usize,
    pub selected: usize,
    pub downloaded: usize,
    pub cache_hits: usize,
    pub failures: Vec<FailureRecord>,
    pub network_requests: usize,
}

impl CrawlReport {
    /// Some index or filing could not be fetched.
    pub fn is_partial(&self) -> bool {
        !self.failures.is_empty() || !self.index_failures.is_empty()
    }
}

/// EDGAR client bound to one crawl configuration.
///
/// Index files and filings are cached under `cache_dir`; cached entries
/// are never fetched again. All requests, from any worker, go through one
/// shared [`RateLimiter`].
pub struct EdgarClient {
    config: CrawlConfig,
    transport: Arc<dyn Transport>,
    limiter: Arc<RateLimiter>,
    requests: AtomicUsize,
}

impl EdgarClient {
    pub fn new(config: CrawlConfig, transport: Arc<dyn Transport>) -> Result<Self, EdgarError> {
        config.validate()?;
        let limiter = Arc::new(RateLimiter::new(config.rate_limit));
        Ok(EdgarClient { config, transport, limiter, requests: AtomicUsize::new(0) })
    }

    pub fn config(&self) -> &CrawlConfig {
        &self.config
    }

    /// Requests issued to the transport by this client, retries included.
    pub fn network_requests(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }

    /// Fetches (or reads from cache) the master index of one quarter and
    /// keeps the rows whose form type is configured.
    pub fn fetch_index(&self, year: i32, quarter: u8) -> Result<IndexListing, EdgarError> {
        if !self.config.contains_year(year) || !(1..=4).contains(&quarter) {
            return Err(EdgarError::OutOfWindow { year, quarter });
        }
        let cache_path = self
            .config
            .cache_dir
            .join("full-index")
            .join(year.to_string())
            .join(format!("QTR{quarter}"))
            .join("master.idx");
        let bytes = match fs::read(&cache_path) {
            Ok(bytes) => bytes,
            Err(_) => {
                let bytes = self.get_with_retries(&self.config.index_url(year, quarter))?;
                write_atomic(&cache_path, &bytes)?;
                bytes
            }
        };
        let text = match String::from_utf8(bytes) {
            Ok(text) => text,
            Err(e) => encoding_rs::WINDOWS_1252.decode(e.as_bytes()).0.into_owned(),
        };
        Ok(parse_master_index(&text, &self.config.form_types))
    }

    /// Downloads one filing, or loads it from the cache keyed by accession.
    pub fn download_filing(&self, meta: &FilingMetadata) -> Result<DownloadOutcome, EdgarError> {
        let cache_path = self.filing_cache_path(meta);
        if let Ok(bytes) = fs::read(&cache_path) {
            if !bytes.is_empty() {
                return Ok(DownloadOutcome { raw: RawFiling::new(bytes, meta.clone()), from_cache: true });
            }
        }
        let bytes = self.get_with_retries(&self.config.filing_url(meta))?;
        write_atomic(&cache_path, &bytes)?;
        Ok(DownloadOutcome { raw: RawFiling::new(bytes, meta.clone()), from_cache: false })
    }

    pub fn filing_cache_path(&self, meta: &FilingMetadata) -> PathBuf {
        self.config
            .cache_dir
            .join("filings")
            .join(meta.cik.to_string())
            .join(format!("{}.txt", meta.accession()))
    }

    /// Downloads every filing on `config.workers` threads. Results are in
    /// input order; failures do not stop the other downloads.
    pub fn download_all(
        &self,
        filings: &[FilingMetadata],
    ) -> Vec<Result<DownloadOutcome, EdgarError>> {
        let next = AtomicUsize::new(0);
        let results: Mutex<Vec<Option<Result<DownloadOutcome, EdgarError>>>> =
            Mutex::new((0..filings.len()).map(|_| None).collect());
        let workers = self.config.workers.clamp(1, filings.len().max(1));
        thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(meta) = filings.get(i) else { break };
                    let result = self.download_filing(meta);
                    results.lock().unwrap_or_else(|e| e.into_inner())[i] = Some(result);
                });
            }
        });
        results
            .into_inner()
            .unwrap_or_else(|e| e.into_inner())
            .into_iter()
            .map(|r| r.expect("every slot is filled by a worker"))
            .collect()
    }

    /// Full crawl: every quarter of the year window, selection, download,
    /// then the output directory is populated with the filings,
    /// `metadata.jsonl` and `failures.jsonl`.
    pub fn crawl(&self) -> Result<CrawlReport, EdgarError> {
        let mut report = CrawlReport::default();
        let mut rows = Vec::new();
        for year in self.config.start_year..=self.config.end_year {
            for quarter in 1..=4u8 {
                match self.fetch_index(year, quarter) {
                    Ok(listing) => {
                        report.indices_fetched += 1;
                        report.skipped_index_lines += listing.skipped_lines;
                        rows.extend(listing.filings);
                    }
                    Err(e) => {
                        warn!(year, quarter, error = %e, "index unavailable");
                        report.index_failures.push(format!("{year} QTR{quarter}: {e}"));
                    }
                }
            }
        }
        let selected = select_filings(&rows, &self.config);
        report.selected = selected.len();
        info!(selected = selected.len(), "downloading filings");

        let out_dir = &self.config.output_dir;
        let filings_dir = out_dir.join(FILINGS_SUBDIR);
        let mut manifest = Vec::new();
        for (meta, result) in selected.iter().zip(self.download_all(&selected)) {
            match result {
                Ok(outcome) => {
                    if outcome.from_cache {
                        report.cache_hits += 1;
                    } else {
                        report.downloaded += 1;
                    }
                    let name = meta.download_filename();
                    write_if_changed(&filings_dir.join(&name), &outcome.raw.bytes)?;
                    let entry = ManifestEntry { filename: name, meta: meta.clone() };
                    manifest.push(serde_json::to_string(&entry).expect("manifest entry serializes"));
                }
                Err(e) => {
                    warn!(cik = meta.cik, path = %meta.archive_path, error = %e, "download failed");
                    report.failures.push(FailureRecord {
                        cik: meta.cik,
                        archive_path: meta.archive_path.clone(),
                        reason: e.to_string(),
                    });
                }
            }
        }
        write_lines(&out_dir.join(METADATA_MANIFEST), &manifest)?;
        let failures: Vec<String> = report
            .failures
            .iter()
            .map(|f| serde_json::to_string(f).expect("failure record serializes"))
            .collect();
        write_lines(&out_dir.join(FAILURES_MANIFEST), &failures)?;
        report.network_requests = self.network_requests();
        Ok(report)
    }

    fn get_with_retries(&self, url: &str) -> Result<Vec<u8>, EdgarError> {
        let attempts = self.config.retry_attempts;
        let mut last_err = None;
        for attempt in 1..=attempts {
            self.limiter.acquire();
            self.requests.fetch_add(1, Ordering::SeqCst);
            match self.transport.get(url, &self.config.user_agent) {
                Ok(resp) if (200..300).contains(&resp.status) => return Ok(resp.body),
                Ok(resp) if resp.status == 429 || resp.status >= 500 => {
                    last_err = Some(EdgarError::Http { url: url.to_string(), status: resp.status, attempts: attempt });
                }
                Ok(resp) => {
                    return Err(EdgarError::Http { url: url.to_string(), status: resp.status, attempts: attempt });
                }
                Err(source) => {
                    last_err = Some(EdgarError::Network { url: url.to_string(), attempts: attempt, source });
                }
            }
            if attempt < attempts {
                let delay = self.config.retry_backoff * 2u32.pow(attempt - 1);
                warn!(url, attempt, ?delay, "retrying");
                thread::sleep(delay);
            }
        }
        Err(last_err.expect("at least one attempt is made"))
    }
}

/// Row of `metadata.jsonl`: the index metadata plus the local file name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub filename: String,
    #[serde(flatten)]
    pub meta: FilingMetadata,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EdgarError + '_ {
    move |source| EdgarError::Io { path: path.to_path_buf(), source }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), EdgarError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let tmp = path.with_extension(format!("part{}", std::process::id()));
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn write_if_changed(path: &Path, bytes: &[u8]) -> Result<(), EdgarError> {
    if fs::read(path).is_ok_and(|existing| existing == bytes) {
        return Ok(());
    }
    write_atomic(path, bytes)
}

fn write_lines(path: &Path, lines: &[String]) -> Result<(), EdgarError> {
    let mut buf = Vec::new();
    for line in lines {
        buf.write_all(line.as_bytes()).and_then(|_| buf.write_all(b"\n")).expect("write to Vec");
    }
    write_if_changed(path, &buf)
}

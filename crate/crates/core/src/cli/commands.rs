use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;
use tracing::{info, warn};

use super::{
    CliError, DownloadArgs, EvalArgs, ExtractArgs, NnArgs, PipelineConfig, StatsArgs, TrainArgs, EXIT_OK,
    EXIT_PARTIAL,
};
use crate::clean::{clean_with, CleanOptions, RawFiling, SgmlHeader};
use crate::edgar::{
    CrawlConfig, EdgarClient, FilingMetadata, ManifestEntry, ReplayTransport, Transport, UreqTransport,
    FILINGS_SUBDIR, METADATA_MANIFEST,
};
use crate::embeddings::{
    export_vectors, import_vectors, to_sentences, tokenize, train as train_sgns, TrainConfig, Vocabulary,
    DEFAULT_MAX_SIZE, DEFAULT_MIN_COUNT,
};
use crate::eval::{cross_validate, ClassifierConfig, HypernymDataset, DEFAULT_FOLDS};
use crate::items::{extract as extract_record, ExtractionStats, FilingRecord, ItemSelection};
use crate::stats::{read_records, report, summarize, write_coverage_csv};

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn required(value: Option<PathBuf>, flag: &str) -> Result<PathBuf, CliError> {
    value.ok_or_else(|| CliError::Config(format!("--{flag} is required (flag or config file)")))
}

fn existing_dir(path: PathBuf, flag: &str) -> Result<PathBuf, CliError> {
    if path.is_dir() {
        Ok(path)
    } else {
        Err(CliError::Config(format!("--{flag} {} is not a directory", path.display())))
    }
}

fn log_resolved<T: Serialize>(command: &str, resolved: &T) {
    let json = serde_json::to_string(resolved).unwrap_or_default();
    info!(command, config = %json, "resolved configuration");
}

fn available_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Serialize)]
struct ResolvedDownload<'a> {
    start_year: i32,
    end_year: i32,
    ciks: Option<&'a BTreeSet<u64>>,
    form_types: &'a BTreeSet<String>,
    rate_limit: u32,
    user_agent: &'a str,
    cache_dir: &'a Path,
    output_dir: &'a Path,
    archive_base_url: &'a str,
    replay_dir: Option<&'a Path>,
    retry_attempts: u32,
    retry_backoff_ms: u128,
    workers: usize,
}

pub(super) fn download(a: DownloadArgs, cfg: &PipelineConfig) -> Result<i32, CliError> {
    let f = &cfg.download;
    let defaults = CrawlConfig::default();
    let mut c = CrawlConfig {
        start_year: a.start_year.or(f.start_year).unwrap_or(defaults.start_year),
        end_year: a.end_year.or(f.end_year).unwrap_or(defaults.end_year),
        cik_filter: a.ciks.or_else(|| f.ciks.clone()).map(|v| v.into_iter().collect()),
        form_types: f.form_types.clone().map_or(defaults.form_types, |v| v.into_iter().collect()),
        rate_limit: a.rate_limit.or(f.rate_limit).unwrap_or(defaults.rate_limit),
        user_agent: a.user_agent.or_else(|| f.user_agent.clone()).unwrap_or_default(),
        cache_dir: a.cache_dir.or_else(|| f.cache_dir.clone()).unwrap_or(defaults.cache_dir),
        output_dir: a.output_dir.or_else(|| f.output_dir.clone()).unwrap_or(defaults.output_dir),
        archive_base_url: a.archive_base_url.or_else(|| f.archive_base_url.clone()).unwrap_or(defaults.archive_base_url),
        retry_attempts: f.retry_attempts.unwrap_or(defaults.retry_attempts),
        retry_backoff: f.retry_backoff_ms.map_or(defaults.retry_backoff, Duration::from_millis),
        workers: 0,
    };
    if a.include_variants || f.include_variants == Some(true) {
        c = c.with_variants();
    }
    // More workers than requests per second only queue on the limiter.
    c.workers = a.workers.or(f.workers).unwrap_or_else(|| available_workers().min(c.rate_limit.max(1) as usize)).max(1);
    let replay_dir = a.replay_dir.or_else(|| f.replay_dir.clone());
    c.validate().map_err(config_err)?;
    log_resolved(
        "download",
        &ResolvedDownload {
            start_year: c.start_year,
            end_year: c.end_year,
            ciks: c.cik_filter.as_ref(),
            form_types: &c.form_types,
            rate_limit: c.rate_limit,
            user_agent: &c.user_agent,
            cache_dir: &c.cache_dir,
            output_dir: &c.output_dir,
            archive_base_url: &c.archive_base_url,
            replay_dir: replay_dir.as_deref(),
            retry_attempts: c.retry_attempts,
            retry_backoff_ms: c.retry_backoff.as_millis(),
            workers: c.workers,
        },
    );
    let transport: Arc<dyn Transport> = match &replay_dir {
        Some(dir) => Arc::new(ReplayTransport::new(existing_dir(dir.clone(), "replay-dir")?, &c.archive_base_url)),
        None => Arc::new(UreqTransport::new(Duration::from_secs(f.timeout_secs.unwrap_or(60)))),
    };
    let client = EdgarClient::new(c, transport).map_err(config_err)?;
    let r = client.crawl().map_err(runtime_err)?;
    info!(
        indices = r.indices_fetched,
        index_failures = r.index_failures.len(),
        selected = r.selected,
        downloaded = r.downloaded,
        cache_hits = r.cache_hits,
        failures = r.failures.len(),
        requests = r.network_requests,
        "download finished"
    );
    println!(
        "selected {} filings: {} downloaded, {} from cache, {} failed ({} index files unavailable)",
        r.selected,
        r.downloaded,
        r.cache_hits,
        r.failures.len(),
        r.index_failures.len()
    );
    Ok(if r.is_partial() { EXIT_PARTIAL } else { EXIT_OK })
}

/// One raw filing waiting for extraction.
struct Job {
    path: PathBuf,
    filename: String,
    meta: Option<FilingMetadata>,
}

/// Filings listed in `metadata.jsonl`, or else every `.txt` file under the
/// input directory (and its `filings/` subdirectory) with metadata read
/// from the SGML header.
fn extraction_jobs(input: &Path) -> Result<Vec<Job>, CliError> {
    let manifest = input.join(METADATA_MANIFEST);
    if manifest.is_file() {
        let text = fs::read_to_string(&manifest).map_err(|e| runtime_err(format!("{}: {e}", manifest.display())))?;
        let mut jobs = Vec::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let entry: ManifestEntry = serde_json::from_str(line)
                .map_err(|e| runtime_err(format!("{}:{}: {e}", manifest.display(), i + 1)))?;
            jobs.push(Job {
                path: input.join(FILINGS_SUBDIR).join(&entry.filename),
                filename: entry.filename,
                meta: Some(entry.meta),
            });
        }
        return Ok(jobs);
    }
    let mut jobs = Vec::new();
    for dir in [input.to_path_buf(), input.join(FILINGS_SUBDIR)] {
        let Ok(entries) = fs::read_dir(&dir) else { continue };
        for entry in entries.flatten() {
            let path = entry.path();
            if path.is_file() && path.extension().is_some_and(|x| x.eq_ignore_ascii_case("txt")) {
                let filename = path.file_name().unwrap().to_string_lossy().into_owned();
                jobs.push(Job { path, filename, meta: None });
            }
        }
    }
    jobs.sort_by(|a, b| a.filename.cmp(&b.filename));
    Ok(jobs)
}

/// Metadata for a filing without a manifest entry: SGML header first, then
/// the `{cik}_{form}_{year}_{accession}.txt` naming of `download`.
fn metadata_from_file(bytes: &[u8], filename: &str) -> Option<FilingMetadata> {
    let header = SgmlHeader::parse(bytes);
    let stem = filename.strip_suffix(".txt").unwrap_or(filename);
    let parts: Vec<&str> = stem.split('_').collect();
    let from_name = (parts.len() == 4).then(|| (parts[0].parse::<u64>().ok(), parts[1], parts[2].parse::<i32>().ok(), parts[3]));
    let cik = header.cik.or_else(|| from_name.and_then(|p| p.0))?;
    let date_filed = header
        .filed_as_of
        .or_else(|| from_name.and_then(|p| p.2).and_then(|y| NaiveDate::from_ymd_opt(y, 1, 1)))?;
    let form_type = header.form_type.clone().unwrap_or_else(|| "10-K".to_string());
    let accession = from_name.map(|p| p.3.to_string()).unwrap_or_else(|| stem.to_string());
    Some(FilingMetadata {
        cik,
        company_name: header.company_name.unwrap_or_default(),
        form_type,
        date_filed,
        archive_path: format!("edgar/data/{cik}/{accession}.txt"),
    })
}

#[derive(Serialize)]
struct ResolvedExtract<'a> {
    input_dir: &'a Path,
    output_dir: &'a Path,
    items: String,
    strip_page_numbers: bool,
    strip_repeated_lines: bool,
}

pub(super) fn extract(a: ExtractArgs, cfg: &PipelineConfig) -> Result<i32, CliError> {
    let f = &cfg.extract;
    let input = existing_dir(required(a.input_dir.or_else(|| f.input_dir.clone()), "input-dir")?, "input-dir")?;
    let output = required(a.output_dir.or_else(|| f.output_dir.clone()), "output-dir")?;
    let items = a.items.or_else(|| f.items.as_ref().map(|v| v.join(","))).unwrap_or_default();
    let selection = ItemSelection::parse_list(&items).map_err(config_err)?;
    let options = CleanOptions {
        strip_page_numbers: a.strip_page_numbers || f.strip_page_numbers == Some(true),
        strip_repeated_lines: a.strip_repeated_lines || f.strip_repeated_lines == Some(true),
    };
    log_resolved(
        "extract",
        &ResolvedExtract {
            input_dir: &input,
            output_dir: &output,
            items: if items.is_empty() { "all".into() } else { items.clone() },
            strip_page_numbers: options.strip_page_numbers,
            strip_repeated_lines: options.strip_repeated_lines,
        },
    );

    let jobs = extraction_jobs(&input)?;
    info!(filings = jobs.len(), "extracting");
    let results: Vec<Result<(i32, FilingRecord), String>> = jobs
        .par_iter()
        .map(|job| {
            let bytes = fs::read(&job.path).map_err(|e| format!("{}: {e}", job.path.display()))?;
            let meta = match &job.meta {
                Some(m) => m.clone(),
                None => metadata_from_file(&bytes, &job.filename)
                    .ok_or_else(|| format!("{}: no CIK or filing date in header or file name", job.filename))?,
            };
            let raw = RawFiling::new(bytes, meta).with_filename(job.filename.clone());
            let doc = clean_with(&raw, &options).map_err(|e| e.to_string())?;
            let record = extract_record(&doc, &selection);
            if record.is_empty() {
                warn!(filename = %job.filename, "no item headings found");
            }
            Ok((doc.fiscal_year, record))
        })
        .collect();

    let mut by_year: BTreeMap<i32, Vec<FilingRecord>> = BTreeMap::new();
    let mut failures = 0;
    for r in results {
        match r {
            Ok((year, record)) => by_year.entry(year).or_default().push(record),
            Err(e) => {
                failures += 1;
                warn!(error = %e, "filing skipped");
            }
        }
    }
    fs::create_dir_all(&output).map_err(|e| runtime_err(format!("{}: {e}", output.display())))?;
    let mut written = 0;
    for (year, records) in &mut by_year {
        records.sort_by(|a, b| a.filename.cmp(&b.filename));
        let path = output.join(format!("{year}.jsonl"));
        let mut w = BufWriter::new(fs::File::create(&path).map_err(|e| runtime_err(format!("{}: {e}", path.display())))?);
        let mut stats = ExtractionStats::default();
        for record in records.iter() {
            serde_json::to_writer(&mut w, record).map_err(runtime_err)?;
            w.write_all(b"\n").map_err(runtime_err)?;
            stats.add(record);
        }
        w.flush().map_err(runtime_err)?;
        let csv_path = output.join(format!("{year}_stats.csv"));
        let csv_file = fs::File::create(&csv_path).map_err(|e| runtime_err(format!("{}: {e}", csv_path.display())))?;
        stats.write_csv(csv_file).map_err(runtime_err)?;
        written += records.len();
    }
    info!(records = written, years = by_year.len(), failures, "extract finished");
    println!("wrote {written} records in {} year files, {failures} filings failed", by_year.len());
    Ok(if failures > 0 { EXIT_PARTIAL } else { EXIT_OK })
}

pub(super) fn stats(a: StatsArgs, cfg: &PipelineConfig) -> Result<i32, CliError> {
    let f = &cfg.stats;
    let input = existing_dir(required(a.input_dir.or_else(|| f.input_dir.clone()), "input-dir")?, "input-dir")?;
    let csv = a.csv.or_else(|| f.csv.clone());
    log_resolved("stats", &serde_json::json!({ "input_dir": input, "csv": csv }));
    let records = read_records(&input).map_err(|e| runtime_err(format!("{}: {e}", input.display())))?;
    let summary = summarize(records.inspect(|r| {
        if let Err(e) = r {
            warn!(error = %e, "malformed record skipped");
        }
    }));
    print!("{}", report(&summary));
    if let Some(path) = csv {
        let file = fs::File::create(&path).map_err(|e| runtime_err(format!("{}: {e}", path.display())))?;
        write_coverage_csv(&summary, file).map_err(runtime_err)?;
    }
    Ok(if summary.malformed > 0 { EXIT_PARTIAL } else { EXIT_OK })
}

#[derive(Serialize)]
struct ResolvedTrain<'a> {
    input_dir: &'a Path,
    out: &'a Path,
    vocab: usize,
    min_count: u64,
    #[serde(flatten)]
    sgns: &'a TrainConfig,
}

fn record_tokens(record: &FilingRecord) -> Vec<String> {
    record.items().filter(|(_, t)| !t.is_empty()).flat_map(|(_, t)| tokenize(t)).collect()
}

/// Reads every record, tokenizing in parallel per file; records that fail
/// to parse are counted.
fn for_each_tokenized(input: &Path, mut f: impl FnMut(Vec<String>)) -> Result<usize, CliError> {
    let mut malformed = 0;
    let files = crate::stats::jsonl_files(input).map_err(runtime_err)?;
    for file in files {
        let records: Vec<FilingRecord> = read_records_of(&file, &mut malformed)?;
        let tokens: Vec<Vec<String>> = records.par_iter().map(record_tokens).collect();
        tokens.into_iter().for_each(&mut f);
    }
    Ok(malformed)
}

fn read_records_of(path: &Path, malformed: &mut usize) -> Result<Vec<FilingRecord>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| runtime_err(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        match serde_json::from_str(line) {
            Ok(r) => out.push(r),
            Err(e) => {
                *malformed += 1;
                warn!(file = %path.display(), line = i + 1, error = %e, "malformed record skipped");
            }
        }
    }
    Ok(out)
}

pub(super) fn train(a: TrainArgs, cfg: &PipelineConfig) -> Result<i32, CliError> {
    let f = &cfg.train;
    let d = TrainConfig::default();
    let input = existing_dir(required(a.input_dir.or_else(|| f.input_dir.clone()), "input-dir")?, "input-dir")?;
    let out = required(a.out.or_else(|| f.out.clone()), "out")?;
    let max_vocab = a.vocab.or(f.vocab).unwrap_or(DEFAULT_MAX_SIZE);
    let min_count = a.min_count.or(f.min_count).unwrap_or(DEFAULT_MIN_COUNT);
    let sgns = TrainConfig {
        dim: a.dim.or(f.dim).unwrap_or(d.dim),
        window: a.window.or(f.window).unwrap_or(d.window),
        negatives: a.negatives.or(f.negatives).unwrap_or(d.negatives),
        epochs: a.epochs.or(f.epochs).unwrap_or(d.epochs),
        initial_lr: a.initial_lr.or(f.initial_lr).unwrap_or(d.initial_lr),
        subsample_t: a.subsample_t.or(f.subsample_t).unwrap_or(d.subsample_t),
        seed: a.seed.or(f.seed).unwrap_or(d.seed),
        deterministic: a.deterministic || f.deterministic == Some(true),
        workers: a.workers.or(f.workers).unwrap_or(d.workers),
    };
    sgns.validate().map_err(config_err)?;
    if max_vocab == 0 {
        return Err(CliError::Config("--vocab must be at least 1".into()));
    }
    log_resolved("train", &ResolvedTrain { input_dir: &input, out: &out, vocab: max_vocab, min_count, sgns: &sgns });

    let mut counts: std::collections::HashMap<String, u64> = std::collections::HashMap::new();
    let malformed = for_each_tokenized(&input, |tokens| {
        for t in tokens {
            *counts.entry(t).or_insert(0) += 1;
        }
    })?;
    let vocab = Vocabulary::from_counts(counts, max_vocab, min_count);
    info!(vocab = vocab.len(), "vocabulary built");
    let mut sentences = Vec::new();
    for_each_tokenized(&input, |tokens| to_sentences(&vocab, &tokens, &mut sentences))?;
    let (model, report) = train_sgns(vocab, &sentences, &sgns).map_err(|e| match e {
        crate::embeddings::TrainError::Config(_) => config_err(e),
        other => runtime_err(other),
    })?;
    export_vectors(&model, &out).map_err(runtime_err)?;
    println!(
        "trained {} vectors of dimension {} on {} pairs; final epoch loss {}",
        model.vocab.len(),
        model.dim,
        report.pairs,
        report.epoch_loss.last().map_or("n/a".to_string(), |l| format!("{l:.4}"))
    );
    Ok(if malformed > 0 { EXIT_PARTIAL } else { EXIT_OK })
}

pub(super) fn nn(a: NnArgs, cfg: &PipelineConfig) -> Result<i32, CliError> {
    let f = &cfg.nn;
    let vectors = required(a.vectors.or_else(|| f.vectors.clone()), "vectors")?;
    let k = a.k.or(f.k).unwrap_or(5);
    let exclude = !a.keep_inflections && f.exclude_inflections != Some(false);
    let query = a.query.to_lowercase();
    log_resolved("nn", &serde_json::json!({ "vectors": vectors, "query": query, "k": k, "exclude_inflections": exclude }));
    let model = import_vectors(&vectors).map_err(config_err)?;
    let neighbors = model.nearest_neighbors(&query, k, exclude).map_err(config_err)?;
    for (token, score) in neighbors {
        println!("{token}\t{score:.4}");
    }
    Ok(EXIT_OK)
}

pub(super) fn eval(a: EvalArgs, cfg: &PipelineConfig) -> Result<i32, CliError> {
    let f = &cfg.eval;
    let vectors = required(a.vectors.or_else(|| f.vectors.clone()), "vectors")?;
    let dataset_path = required(a.dataset.or_else(|| f.dataset.clone()), "dataset")?;
    let folds = a.folds.or(f.folds).unwrap_or(DEFAULT_FOLDS);
    let seed = a.seed.or(f.seed).unwrap_or(13);
    let report_path = a.report.or_else(|| f.report.clone());
    let d = ClassifierConfig::default();
    let classifier = ClassifierConfig {
        c: a.c.or(f.c).unwrap_or(d.c),
        tolerance: f.tolerance.unwrap_or(d.tolerance),
        max_iterations: f.max_iterations.unwrap_or(d.max_iterations),
    };
    log_resolved(
        "eval",
        &serde_json::json!({
            "vectors": vectors, "dataset": dataset_path, "folds": folds, "seed": seed,
            "report": report_path, "classifier": classifier,
        }),
    );
    let model = import_vectors(&vectors).map_err(config_err)?;
    let dataset = HypernymDataset::load(&dataset_path).map_err(config_err)?;
    let report = cross_validate(&dataset, &model, folds, seed, &classifier).map_err(config_err)?;
    println!(
        "accuracy {:.3}  mean rank {:.3}  ({} terms, {} labels, {} folds, {} without vectors)",
        report.accuracy,
        report.mean_rank,
        report.n_examples,
        report.labels.len(),
        report.n_folds,
        report.oov_terms
    );
    if let Some(path) = report_path {
        let json = serde_json::to_string_pretty(&report).map_err(runtime_err)?;
        fs::write(&path, json + "\n").map_err(|e| runtime_err(format!("{}: {e}", path.display())))?;
    }
    Ok(EXIT_OK)
}

//! Runs the CLI in-process over the replay archive and watches which files
//! each subcommand touches.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime};

use super::{archive_dir, fixtures_dir};

pub type Snapshot = BTreeMap<PathBuf, (u64, SystemTime)>;

pub fn snapshot(root: &Path) -> Snapshot {
    let mut out = Snapshot::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let Ok(entries) = std::fs::read_dir(&dir) else { continue };
        for entry in entries.flatten() {
            let path = entry.path();
            let Ok(meta) = entry.metadata() else { continue };
            if meta.is_dir() {
                stack.push(path.clone());
            }
            out.insert(path, (meta.len(), meta.modified().unwrap_or(SystemTime::UNIX_EPOCH)));
        }
    }
    out
}

/// Paths added, removed or modified between two snapshots.
pub fn changes(before: &Snapshot, after: &Snapshot) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = after.iter().filter(|(p, m)| before.get(*p) != Some(m)).map(|(p, _)| p.clone()).collect();
    out.extend(before.keys().filter(|p| !after.contains_key(*p)).cloned());
    out
}

#[derive(Debug)]
pub struct Step {
    pub name: &'static str,
    pub exit_code: i32,
    pub elapsed: Duration,
    /// Files touched outside the step's configured outputs.
    pub stray_writes: Vec<PathBuf>,
}

/// Runs one subcommand and reports any change under `watched` that is not
/// inside one of `allowed`.
pub fn run_step(name: &'static str, args: Vec<OsString>, watched: &[&Path], allowed: &[PathBuf]) -> Step {
    let before: Vec<Snapshot> = watched.iter().map(|w| snapshot(w)).collect();
    let mut argv: Vec<OsString> = vec!["edgar-corpus".into(), name.into(), "--quiet".into()];
    argv.extend(args);
    let start = Instant::now();
    let exit_code = edgar_corpus::cli::run(argv);
    let elapsed = start.elapsed();
    let mut stray_writes = Vec::new();
    for (w, b) in watched.iter().zip(&before) {
        for p in changes(b, &snapshot(w)) {
            let inside = allowed.iter().any(|a| p.starts_with(a) || a.starts_with(&p));
            if !inside {
                stray_writes.push(p);
            }
        }
    }
    Step { name, exit_code, elapsed, stray_writes }
}

pub fn hypernym_dataset() -> PathBuf {
    fixtures_dir().join("hypernyms/toy.jsonl")
}

pub struct Layout {
    pub root: PathBuf,
    pub downloads: PathBuf,
    pub cache: PathBuf,
    pub records: PathBuf,
    pub coverage: PathBuf,
    pub vectors: PathBuf,
    pub report: PathBuf,
}

impl Layout {
    pub fn new(root: &Path) -> Layout {
        Layout {
            root: root.to_path_buf(),
            downloads: root.join("downloads"),
            cache: root.join("cache"),
            records: root.join("records"),
            coverage: root.join("coverage.csv"),
            vectors: root.join("vectors.txt"),
            report: root.join("eval.json"),
        }
    }
}

fn os(parts: &[&dyn AsRef<std::ffi::OsStr>]) -> Vec<OsString> {
    parts.iter().map(|p| p.as_ref().to_os_string()).collect()
}

/// download, extract, stats, train, nn and eval over the replay archive,
/// with `download_args` narrowing the crawl.
pub fn run_pipeline(layout: &Layout, download_args: &[&str]) -> Vec<Step> {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let watched = [layout.root.as_path(), crate_dir];
    let l = layout;
    let mut download = os(&[
        &"--replay-dir", &archive_dir(),
        &"--user-agent", &"Pipeline Test test@example.com",
        &"--output-dir", &l.downloads,
        &"--cache-dir", &l.cache,
    ]);
    download.extend(download_args.iter().map(OsString::from));
    let dataset = hypernym_dataset();
    vec![
        run_step("download", download, &watched, &[l.downloads.clone(), l.cache.clone()]),
        run_step("extract", os(&[&"--input-dir", &l.downloads, &"--output-dir", &l.records]), &watched, std::slice::from_ref(&l.records)),
        run_step("stats", os(&[&"--input-dir", &l.records, &"--csv", &l.coverage]), &watched, std::slice::from_ref(&l.coverage)),
        run_step(
            "train",
            os(&[&"--input-dir", &l.records, &"--out", &l.vectors, &"--dim", &"25", &"--vocab", &"2000", &"--deterministic"]),
            &watched,
            std::slice::from_ref(&l.vectors),
        ),
        run_step("nn", os(&[&"--vectors", &l.vectors, &"--query", &"debt"]), &watched, &[]),
        run_step("eval", os(&[&"--vectors", &l.vectors, &"--dataset", &dataset, &"--report", &l.report]), &watched, std::slice::from_ref(&l.report)),
    ]
}

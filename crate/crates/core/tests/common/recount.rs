//! Corpus statistics recounted from the raw JSON lines.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use edgar_corpus::clean::clean;
use edgar_corpus::items::{extract, ItemSelection};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

/// Counts the sample straight from the JSON lines, without the record type.
pub struct Recount {
    pub tokens: u64,
    pub filings: u64,
    pub malformed: u64,
    pub ciks: BTreeSet<String>,
    pub years: BTreeSet<i32>,
    pub non_empty: BTreeMap<String, u64>,
}

pub fn count_tokens(text: &str) -> u64 {
    let mut n = 0;
    let mut inside = false;
    for c in text.chars() {
        if c.is_whitespace() {
            inside = false;
        } else if !inside {
            inside = true;
            n += 1;
        }
    }
    n
}

pub fn recount(dir: &Path) -> Recount {
    let mut r = Recount { tokens: 0, filings: 0, malformed: 0, ciks: BTreeSet::new(), years: BTreeSet::new(), non_empty: BTreeMap::new() };
    let mut names: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    for path in names.into_iter().filter(|p| p.extension().is_some_and(|e| e == "jsonl")) {
        for line in fs::read_to_string(&path).unwrap().lines() {
            if line.trim().is_empty() {
                continue;
            }
            let Ok(Value::Object(obj)) = serde_json::from_str::<Value>(line) else {
                r.malformed += 1;
                continue;
            };
            let Some(year) = obj.get("year").and_then(Value::as_str).and_then(|y| y.parse::<i32>().ok()) else {
                r.malformed += 1;
                continue;
            };
            r.filings += 1;
            r.years.insert(year);
            r.ciks.insert(obj["cik"].as_str().unwrap().to_string());
            for (key, value) in &obj {
                if let Some(code) = key.strip_prefix("item_") {
                    let text = value.as_str().unwrap();
                    if !text.is_empty() {
                        *r.non_empty.entry(code.to_string()).or_default() += 1;
                        r.tokens += count_tokens(text);
                    }
                }
            }
        }
    }
    r
}

/// 100 synthetic records spread over `{year}.jsonl` files for 1995-2020,
/// plus one truncated line in 2000.jsonl.
pub fn write_sample(dir: &Path, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut files: BTreeMap<i32, fs::File> = BTreeMap::new();
    for serial in 0..100 {
        let mut doc = super::synth::synthetic_10k(&mut rng, serial % 37);
        let year = 1995 + (serial as i32 % 26);
        doc.raw.period_of_report = chrono::NaiveDate::from_ymd_opt(year, 12, 31);
        let record = extract(&clean(&doc.raw).unwrap(), &ItemSelection::All);
        let f = files
            .entry(year)
            .or_insert_with(|| fs::File::create(dir.join(format!("{year}.jsonl"))).unwrap());
        writeln!(f, "{}", serde_json::to_string(&record).unwrap()).unwrap();
    }
    writeln!(files.get_mut(&2000).unwrap(), "{{\"filename\": \"broken").unwrap();
    drop(files);
}

//! Mock EDGAR transport that logs when each request begins.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use edgar_corpus::edgar::{HttpResponse, Transport, TransportError};

/// Answers every request after a short delay and records when each began.
pub struct MockArchive {
    pub started: Mutex<Vec<Instant>>,
    pub per_quarter: usize,
}

impl MockArchive {
    fn index(&self, year: &str, quarter: &str) -> String {
        let mut text = String::from(
            "Description:           Master Index of EDGAR Dissemination Feed\n\
Last Data Received:    December 31, 2019\n\n\
CIK|Company Name|Form Type|Date Filed|Filename\n\
--------------------------------------------------------------------------------\n",
        );
        let q: usize = quarter.trim_start_matches("QTR").parse().unwrap();
        for i in 0..self.per_quarter {
            let cik = 1000 + (q - 1) * self.per_quarter + i;
            text.push_str(&format!(
                "{cik}|COMPANY {cik}|10-K|{year}-{:02}-15|edgar/data/{cik}/{cik:010}-{}-{i:06}.txt\n",
                q * 3 - 2,
                &year[2..]
            ));
            text.push_str(&format!("{cik}|COMPANY {cik}|10-Q|{year}-{:02}-20|edgar/data/{cik}/q{i}.txt\n", q * 3 - 1));
        }
        text
    }
}

impl Transport for MockArchive {
    fn get(&self, url: &str, _user_agent: &str) -> Result<HttpResponse, TransportError> {
        self.started.lock().unwrap().push(Instant::now());
        std::thread::sleep(Duration::from_millis(5));
        let parts: Vec<&str> = url.split('/').collect();
        let body = if url.ends_with("master.idx") {
            let n = parts.len();
            self.index(parts[n - 3], parts[n - 2]).into_bytes()
        } else {
            format!("<DOCUMENT>\n<TYPE>10-K\n<TEXT>\nITEM 1. BUSINESS\n{url}\n</TEXT>\n</DOCUMENT>\n").into_bytes()
        };
        Ok(HttpResponse { status: 200, body })
    }
}

pub fn max_in_any_window(times: &[Instant], window: Duration) -> usize {
    let mut sorted = times.to_vec();
    sorted.sort();
    (0..sorted.len())
        .map(|i| sorted[i..].iter().take_while(|&&t| t - sorted[i] < window).count())
        .max()
        .unwrap_or(0)
}

impl MockArchive {
    pub fn new(per_quarter: usize) -> MockArchive {
        MockArchive { started: Mutex::new(Vec::new()), per_quarter }
    }
}

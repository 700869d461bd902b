use std::collections::BTreeSet;

use chrono::NaiveDate;
use tracing::warn;

use super::{CrawlConfig, FilingMetadata};

/// Parsed rows of one master index file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndexListing {
    pub filings: Vec<FilingMetadata>,
    /// Data lines that could not be parsed as a filing row.
    pub skipped_lines: usize,
}

/// Parses a pipe-delimited EDGAR `master.idx` file
/// (`CIK|Company Name|Form Type|Date Filed|Filename`), keeping the rows
/// whose form type is in `form_types`.
///
/// Everything up to the dashed separator line is treated as the header.
/// Malformed data lines are counted in [`IndexListing::skipped_lines`] and
/// never abort the parse.
pub fn parse_master_index(text: &str, form_types: &BTreeSet<String>) -> IndexListing {
    let lines: Vec<&str> = text.lines().collect();
    let body_start = lines
        .iter()
        .position(|l| {
            let t = l.trim();
            t.len() >= 10 && t.chars().all(|c| c == '-')
        })
        .map_or(0, |i| i + 1);

    let mut listing = IndexListing::default();
    for (lineno, line) in lines.iter().enumerate().skip(body_start) {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with("CIK|") {
            continue;
        }
        match parse_row(line) {
            Some(meta) => {
                if form_types.contains(&meta.form_type) {
                    listing.filings.push(meta);
                }
            }
            None => {
                warn!(line = lineno + 1, "skipping malformed index line");
                listing.skipped_lines += 1;
            }
        }
    }
    listing
}

fn parse_row(line: &str) -> Option<FilingMetadata> {
    let fields: Vec<&str> = line.split('|').collect();
    if fields.len() < 5 {
        return None;
    }
    // Company names occasionally contain a pipe; the other four fields are fixed.
    let n = fields.len();
    let cik: u64 = fields[0].trim().parse().ok().filter(|&c| c > 0)?;
    let company_name = fields[1..n - 3].join("|").trim().to_string();
    let form_type = fields[n - 3].trim().to_string();
    let date_filed = parse_index_date(fields[n - 2].trim())?;
    let archive_path = fields[n - 1].trim().to_string();
    if form_type.is_empty() || !archive_path.ends_with(".txt") || archive_path.len() <= 4 {
        return None;
    }
    Some(FilingMetadata { cik, company_name, form_type, date_filed, archive_path })
}

fn parse_index_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(s, "%Y%m%d"))
        .ok()
}

/// Applies the CIK filter and year window of `config` and sorts by CIK, then
/// filing date, then archive path. Exact duplicate rows are dropped.
pub fn select_filings(indices: &[FilingMetadata], config: &CrawlConfig) -> Vec<FilingMetadata> {
    let mut selected: Vec<FilingMetadata> = indices
        .iter()
        .filter(|m| config.contains_year(m.year_filed()))
        .filter(|m| config.cik_filter.as_ref().is_none_or(|ciks| ciks.contains(&m.cik)))
        .cloned()
        .collect();
    selected.sort_by(|a, b| {
        (a.cik, a.date_filed, &a.archive_path, &a.form_type, &a.company_name)
            .cmp(&(b.cik, b.date_filed, &b.archive_path, &b.form_type, &b.company_name))
    });
    selected.dedup();
    selected
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "Description:           Master Index of EDGAR Dissemination Feed\n\
Last Data Received:    December 31, 2020\n\
Comments:              webmaster@sec.gov\n\
Anonymous FTP:         ftp://ftp.sec.gov/edgar/\n\
Cloud HTTP:            https://www.sec.gov/Archives/\n\
\n\
\n\
\n\
\n\
CIK|Company Name|Form Type|Date Filed|Filename\n\
--------------------------------------------------------------------------------\n";

    fn ten_k() -> BTreeSet<String> {
        ["10-K".to_string()].into_iter().collect()
    }

    fn meta(cik: u64, date: &str) -> FilingMetadata {
        FilingMetadata {
            cik,
            company_name: format!("CO {cik}"),
            form_type: "10-K".into(),
            date_filed: NaiveDate::parse_from_str(date, "%Y-%m-%d").unwrap(),
            archive_path: format!("edgar/data/{cik}/{cik}-{date}.txt"),
        }
    }

    #[test]
    fn parses_rows_and_filters_forms() {
        let text = format!(
            "{HEADER}320193|APPLE INC|10-K|2020-10-30|edgar/data/320193/0000320193-20-000096.txt\n\
             320193|APPLE INC|10-Q|2020-07-31|edgar/data/320193/0000320193-20-000062.txt\n\
             789019|MICROSOFT CORP|8-K|2020-10-27|edgar/data/789019/0001193125-20-278360.txt\n"
        );
        let listing = parse_master_index(&text, &ten_k());
        assert_eq!(listing.skipped_lines, 0);
        assert_eq!(listing.filings.len(), 1);
        let apple = &listing.filings[0];
        assert_eq!(apple.cik, 320193);
        assert_eq!(apple.company_name, "APPLE INC");
        assert_eq!(apple.date_filed, NaiveDate::from_ymd_opt(2020, 10, 30).unwrap());
        assert!(apple.archive_path.starts_with("edgar/data/320193/"));
    }

    #[test]
    fn empty_form_filter_selects_nothing() {
        let text = format!("{HEADER}320193|APPLE INC|10-K|2020-10-30|edgar/data/320193/a.txt\n");
        assert!(parse_master_index(&text, &BTreeSet::new()).filings.is_empty());
    }

    #[test]
    fn garbage_lines_are_counted_not_fatal() {
        let text = format!(
            "{HEADER}1|A CORP|10-K|1999-03-01|edgar/data/1/0000000001-99-000001.txt\n\
             this line is garbage\n\
             2|B CORP|10-K|1999-03-02|edgar/data/2/0000000002-99-000001.txt\n\
             3|C|CORP|10-K|1999-03-03|edgar/data/3/0000000003-99-000001.txt\n"
        );
        let listing = parse_master_index(&text, &ten_k());
        assert_eq!(listing.filings.len(), 3);
        assert_eq!(listing.skipped_lines, 1);
        assert_eq!(listing.filings[2].company_name, "C|CORP");
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(parse_row("0|X|10-K|2000-01-01|edgar/data/0/a.txt").is_none());
        assert!(parse_row("12|X|10-K|2000-13-01|edgar/data/12/a.txt").is_none());
        assert!(parse_row("12|X|10-K|2000-01-01|edgar/data/12/a.htm").is_none());
        assert!(parse_row("12|X|10-K|20000101|edgar/data/12/a.txt").is_some());
    }

    #[test]
    fn select_by_cik_sorted_by_date() {
        let rows = vec![
            meta(789019, "2019-08-01"),
            meta(320193, "2020-10-30"),
            meta(320193, "2019-10-31"),
            meta(1018724, "2020-01-31"),
            meta(320193, "2018-11-05"),
        ];
        let config = CrawlConfig {
            cik_filter: Some([320193].into_iter().collect()),
            ..Default::default()
        };
        let got = select_filings(&rows, &config);
        let dates: Vec<String> = got.iter().map(|m| m.date_filed.to_string()).collect();
        assert!(got.iter().all(|m| m.cik == 320193));
        assert_eq!(dates, ["2018-11-05", "2019-10-31", "2020-10-30"]);
    }

    #[test]
    fn select_without_filter_keeps_window() {
        let rows = vec![meta(5, "1992-12-31"), meta(3, "1993-01-04"), meta(4, "1994-06-01")];
        let config = CrawlConfig { start_year: 1993, end_year: 2020, ..Default::default() };
        let got = select_filings(&rows, &config);
        let ciks: Vec<u64> = got.iter().map(|m| m.cik).collect();
        assert_eq!(ciks, [3, 4]);
    }

    #[test]
    fn selection_is_order_independent() {
        let mut rows = vec![meta(9, "2001-01-01"), meta(2, "2003-01-01"), meta(2, "2002-01-01")];
        let config = CrawlConfig::default();
        let a = select_filings(&rows, &config);
        rows.reverse();
        assert_eq!(a, select_filings(&rows, &config));
    }
}

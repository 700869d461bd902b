use std::sync::LazyLock;

use chrono::NaiveDate;
use regex::bytes::Regex;

/// One `<DOCUMENT>` block of an EDGAR submission.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SgmlDocument {
    pub doc_type: String,
    pub content: Vec<u8>,
}

static DOCUMENT_OPEN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)<DOCUMENT>").unwrap());
static DOCUMENT_CLOSE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)</DOCUMENT>").unwrap());
static TYPE_LINE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?im)^[ \t]*<TYPE>[ \t]*([^\r\n<]*)").unwrap());
static TEXT_OPEN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)<TEXT>").unwrap());
static TEXT_CLOSE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)</TEXT>").unwrap());

/// Splits an SGML submission into its document blocks.
///
/// Returns `None` when the input has no `<DOCUMENT>` envelope at all.
pub(crate) fn split_blocks(bytes: &[u8]) -> Option<Vec<SgmlDocument>> {
    let opens: Vec<usize> = DOCUMENT_OPEN.find_iter(bytes).map(|m| m.end()).collect();
    if opens.is_empty() {
        return None;
    }
    let mut docs = Vec::with_capacity(opens.len());
    for (i, &start) in opens.iter().enumerate() {
        let limit = opens.get(i + 1).map_or(bytes.len(), |&next| next - "<DOCUMENT>".len());
        let block = &bytes[start..limit];
        let block = DOCUMENT_CLOSE.find(block).map_or(block, |m| &block[..m.start()]);

        let doc_type = TYPE_LINE
            .captures(block)
            .map(|c| String::from_utf8_lossy(&c[1]).trim().to_string())
            .unwrap_or_default();
        let content = match TEXT_OPEN.find(block) {
            Some(open) => {
                let body = &block[open.end()..];
                TEXT_CLOSE.find(body).map_or(body, |m| &body[..m.start()])
            }
            None => block,
        };
        docs.push(SgmlDocument { doc_type, content: content.to_vec() });
    }
    Some(docs)
}

/// Header values from the `<SEC-HEADER>` of a submission.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SgmlHeader {
    pub cik: Option<u64>,
    pub company_name: Option<String>,
    pub form_type: Option<String>,
    pub period_of_report: Option<NaiveDate>,
    pub filed_as_of: Option<NaiveDate>,
}

const HEADER_SCAN_BYTES: usize = 64 * 1024;

static PERIOD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)CONFORMED PERIOD OF REPORT:[ \t]*(\d{8})").unwrap());
static FILED: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)FILED AS OF DATE:[ \t]*(\d{8})").unwrap());
static CIK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)CENTRAL INDEX KEY:[ \t]*(\d+)").unwrap());
static NAME: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)COMPANY CONFORMED NAME:[ \t]*([^\r\n]+)").unwrap());
static FORM: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)CONFORMED SUBMISSION TYPE:[ \t]*([^\r\n]+)").unwrap());

impl SgmlHeader {
    pub fn parse(bytes: &[u8]) -> SgmlHeader {
        let head = &bytes[..bytes.len().min(HEADER_SCAN_BYTES)];
        let text = |re: &Regex| {
            re.captures(head).map(|c| String::from_utf8_lossy(&c[1]).trim().to_string())
        };
        let date = |re: &Regex| text(re).and_then(|s| NaiveDate::parse_from_str(&s, "%Y%m%d").ok());
        SgmlHeader {
            cik: text(&CIK).and_then(|s| s.parse().ok()).filter(|&c| c > 0),
            company_name: text(&NAME),
            form_type: text(&FORM),
            period_of_report: date(&PERIOD),
            filed_as_of: date(&FILED),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_fields() {
        let raw = b"<SEC-DOCUMENT>0000320193-20-000096.txt : 20201030\n<SEC-HEADER>\n\
CONFORMED SUBMISSION TYPE:\t10-K\nCONFORMED PERIOD OF REPORT:\t20200926\n\
FILED AS OF DATE:\t\t20201030\n\tCOMPANY DATA:\n\t\tCOMPANY CONFORMED NAME:\t\t\tApple Inc.\n\
\t\tCENTRAL INDEX KEY:\t\t\t0000320193\n</SEC-HEADER>\n";
        let h = SgmlHeader::parse(raw);
        assert_eq!(h.cik, Some(320193));
        assert_eq!(h.company_name.as_deref(), Some("Apple Inc."));
        assert_eq!(h.form_type.as_deref(), Some("10-K"));
        assert_eq!(h.period_of_report, NaiveDate::from_ymd_opt(2020, 9, 26));
        assert_eq!(h.filed_as_of, NaiveDate::from_ymd_opt(2020, 10, 30));
    }

    #[test]
    fn block_without_text_wrapper_or_close() {
        let docs = split_blocks(b"<DOCUMENT>\n<TYPE>10-K\nbody text").unwrap();
        assert_eq!(docs.len(), 1);
        assert_eq!(docs[0].doc_type, "10-K");
        assert!(String::from_utf8_lossy(&docs[0].content).contains("body text"));
        assert!(split_blocks(b"<html>no envelope</html>").is_none());
    }
}

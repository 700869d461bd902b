//! Randomly assembled 10-K submissions with known item texts.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use edgar_corpus::clean::RawFiling;
use edgar_corpus::edgar::FilingMetadata;
use edgar_corpus::items::ItemCode;
use rand::seq::IndexedRandom;
use rand::Rng;

pub struct Synthetic {
    pub raw: RawFiling,
    pub html: bool,
    /// Item text as the extractor must return it, one entry per headed item.
    pub expected: BTreeMap<ItemCode, String>,
}

const WORDS: &[&str] = &[
    "revenue", "margin", "customers", "segment", "growth", "liquidity", "capital", "expenditures", "debt",
    "interest", "rates", "inventory", "supply", "demand", "products", "services", "competition", "markets",
    "operating", "income", "cash", "flows", "dividends", "shares", "pension", "obligations", "leases",
    "goodwill", "impairment", "tax", "credit", "facility", "subsidiaries", "employees", "regulation",
    "research", "development", "quarter", "fiscal", "year", "increase", "decrease", "compared", "primarily",
    "due", "to", "the", "our", "and", "of", "in", "for", "with", "higher", "lower", "net", "sales",
];

const ROMAN: [&str; 4] = ["I", "II", "III", "IV"];

fn sentence(rng: &mut impl Rng) -> String {
    match rng.random_range(0..12) {
        0 => format!("Refer to Item {} for additional detail.", ItemCode::ALL.choose(rng).unwrap().code()),
        1 => format!("Item {} of this report describes the matter further.", ItemCode::ALL.choose(rng).unwrap().code()),
        2 => "Research & development spending rose to $1.2 million.".to_string(),
        3 => "The Company's results in part reflect currency effects.".to_string(),
        4 => format!("Net sales were ${}.{} billion in {}.", rng.random_range(1..90), rng.random_range(0..10), rng.random_range(1995..2021)),
        _ => {
            let n = rng.random_range(4..14);
            let mut words: Vec<String> = (0..n).map(|_| WORDS.choose(rng).unwrap().to_string()).collect();
            let first = &mut words[0];
            *first = first[..1].to_uppercase() + &first[1..];
            format!("{}.", words.join(" "))
        }
    }
}

fn paragraph(rng: &mut impl Rng) -> String {
    let n = rng.random_range(1..6);
    (0..n).map(|_| sentence(rng)).collect::<Vec<_>>().join(" ")
}

fn item_title(code: ItemCode, upper: bool) -> String {
    let t = code.canonical_name();
    if upper {
        t.to_uppercase()
    } else {
        t.to_string()
    }
}

struct Section {
    code: ItemCode,
    heading: Vec<String>,
    body: Vec<String>,
    /// Banner line placed before the heading, outside every item.
    banner: Option<String>,
}

/// Heading lines for `code`; `combined` names a second item sharing it.
fn heading(rng: &mut impl Rng, code: ItemCode, combined: Option<ItemCode>, part_prefix: Option<&str>) -> Vec<String> {
    let keyword = if rng.random_bool(0.5) { "ITEM" } else { "Item" };
    let upper = keyword == "ITEM" || rng.random_bool(0.2);
    let keyword = match combined {
        Some(_) => format!("{keyword}{}", if upper { "S" } else { "s" }),
        None => keyword.to_string(),
    };
    let codes = match combined {
        Some(second) => format!("{} and {}", code.code(), second.code()),
        None => code.code().to_string(),
    };
    let sep = *[". ", ": ", " - ", " \u{2014} ", ".", " "].choose(rng).unwrap();
    let title = item_title(code, upper);
    let prefix = part_prefix.map(|p| format!("{p}. ")).unwrap_or_default();
    if rng.random_bool(0.15) {
        let head = format!("{prefix}{keyword} {codes}{}", sep.trim_end());
        vec![head.trim_end().to_string(), title]
    } else if sep == "." {
        vec![format!("{prefix}{keyword} {codes}.{title}")]
    } else {
        vec![format!("{prefix}{keyword} {codes}{sep}{title}")]
    }
}

fn body(rng: &mut impl Rng) -> Vec<String> {
    if rng.random_bool(0.2) {
        return vec![if rng.random_bool(0.5) { "None." } else { "Not applicable." }.to_string()];
    }
    (0..rng.random_range(1..7)).map(|_| paragraph(rng)).collect()
}

fn sections(rng: &mut impl Rng) -> (Vec<Section>, BTreeMap<ItemCode, String>) {
    let mut codes: Vec<ItemCode> = ItemCode::ALL.into_iter().filter(|_| rng.random_bool(0.75)).collect();
    if codes.len() < 2 {
        codes = vec![ItemCode::Item1, ItemCode::Item7];
    }
    let mut out = Vec::new();
    let mut expected = BTreeMap::new();
    let mut part_seen = 0;
    let mut i = 0;
    while i < codes.len() {
        let code = codes[i];
        let combined = (code == ItemCode::Item7 && codes.get(i + 1) == Some(&ItemCode::Item7A) && rng.random_bool(0.25))
            .then_some(ItemCode::Item7A);
        let mut banner = None;
        let mut prefix = None;
        if code.part() > part_seen {
            part_seen = code.part();
            let roman = ROMAN[usize::from(code.part()) - 1];
            match rng.random_range(0..3) {
                0 => banner = Some(format!("PART {roman}")),
                1 => banner = Some(format!("PART {roman} - {}", ["OTHER INFORMATION", "FINANCIAL INFORMATION"].choose(rng).unwrap())),
                _ if i > 0 && rng.random_bool(0.5) => prefix = Some(format!("PART {roman}")),
                _ => {}
            }
        }
        let heading = heading(rng, code, combined, prefix.as_deref());
        let body = body(rng);
        let text = heading.iter().chain(&body).cloned().collect::<Vec<_>>().join("\n");
        expected.insert(code, text);
        out.push(Section { code, heading, body, banner });
        i += if combined.is_some() { 2 } else { 1 };
    }
    (out, expected)
}

fn toc_lines(rng: &mut impl Rng, sections: &[Section]) -> Vec<String> {
    let mut page = 3;
    sections
        .iter()
        .map(|s| {
            page += rng.random_range(1..9);
            format!("Item {}. {} {page}", s.code.code(), item_title(s.code, false))
        })
        .collect()
}

fn html_escape_line(rng: &mut impl Rng, line: &str) -> String {
    let mut out = String::with_capacity(line.len() * 2);
    for c in line.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '\'' => out.push_str(["&#39;", "&#x27;", "&apos;"].choose(rng).unwrap()),
            '$' if rng.random_bool(0.3) => out.push_str("&#36;"),
            ' ' => match rng.random_range(0..10) {
                0 => out.push_str("&nbsp;"),
                1 => out.push_str("  "),
                2 => out.push('\n'),
                _ => out.push(' '),
            },
            c => out.push(c),
        }
    }
    out
}

fn html_block(rng: &mut impl Rng, line: &str, bold: bool) -> String {
    let inner = html_escape_line(rng, line);
    let inner = if bold { format!("<b>{inner}</b>") } else { inner };
    let inner = if rng.random_bool(0.3) { format!("<font size=\"2\" face=\"Times New Roman\">{inner}</font>") } else { inner };
    match rng.random_range(0..3) {
        0 => format!("<p style=\"margin-top:6pt\">{inner}</p>\n"),
        1 => format!("<div>{inner}</div>\n"),
        _ => format!("<p>{inner}\n</p>\n"),
    }
}

fn render_html(rng: &mut impl Rng, preamble: &[String], toc: &[String], sections: &[Section]) -> String {
    let mut out = String::from("<html>\n<head><title>10-K</title><style>p {margin:0}</style></head>\n<body>\n");
    for line in preamble {
        out.push_str(&html_block(rng, line, true));
    }
    if !toc.is_empty() {
        if rng.random_bool(0.5) {
            out.push_str("<table>\n");
            for line in toc {
                let (head, page) = line.rsplit_once(' ').unwrap();
                out.push_str(&format!("<tr><td>{}</td><td align=\"right\">{page}</td></tr>\n", html_escape_line(rng, head)));
            }
            out.push_str("</table>\n");
        } else {
            for line in toc {
                out.push_str(&html_block(rng, line, false));
            }
        }
    }
    for s in sections {
        if let Some(b) = &s.banner {
            out.push_str(&html_block(rng, b, true));
        }
        for h in &s.heading {
            out.push_str(&html_block(rng, h, true));
        }
        for p in &s.body {
            out.push_str(&html_block(rng, p, false));
        }
        if rng.random_bool(0.2) {
            out.push_str("<hr style=\"page-break-after:always\"/>\n");
        }
    }
    out.push_str("</body>\n</html>\n");
    out
}

fn render_plain(rng: &mut impl Rng, preamble: &[String], toc: &[String], sections: &[Section]) -> String {
    let mut out = String::new();
    let mut push = |rng: &mut dyn rand::RngCore, line: &str| {
        let indent = " ".repeat(rng.random_range(0..6));
        out.push_str(&indent);
        out.push_str(line);
        if rng.random_bool(0.2) {
            out.push_str("   ");
        }
        out.push('\n');
        for _ in 0..rng.random_range(0..3) {
            out.push('\n');
        }
    };
    for line in preamble.iter().chain(toc) {
        push(rng, line);
    }
    for s in sections {
        let lines = s.banner.iter().chain(&s.heading).chain(&s.body);
        for line in lines {
            push(rng, line);
        }
    }
    out
}

/// One random submission in an SGML envelope, HTML or plain text, with a
/// table of contents half of the time.
pub fn synthetic_10k(rng: &mut impl Rng, serial: usize) -> Synthetic {
    let (sections, expected) = sections(rng);
    let preamble = vec![
        "UNITED STATES SECURITIES AND EXCHANGE COMMISSION".to_string(),
        "Washington, D.C. 20549".to_string(),
        "FORM 10-K".to_string(),
        "Annual report pursuant to Section 13 or 15(d) of the Securities Exchange Act of 1934.".to_string(),
    ];
    let toc = if sections.len() >= 4 && rng.random_bool(0.5) { toc_lines(rng, &sections) } else { Vec::new() };
    let html = rng.random_bool(0.5);
    let document = if html {
        render_html(rng, &preamble, &toc, &sections)
    } else {
        render_plain(rng, &preamble, &toc, &sections)
    };
    let cik = 1_000_000 + serial as u64;
    let acc = format!("{cik:010}-20-{serial:06}");
    let envelope = format!(
        "<SEC-DOCUMENT>{acc}.txt : 20200301\n<SEC-HEADER>{acc}.hdr.sgml : 20200301\n\
ACCESSION NUMBER:\t\t{acc}\nCONFORMED SUBMISSION TYPE:\t10-K\nCONFORMED PERIOD OF REPORT:\t20191231\n\
FILED AS OF DATE:\t\t20200301\n</SEC-HEADER>\n\
<DOCUMENT>\n<TYPE>10-K\n<SEQUENCE>1\n<FILENAME>form10k.{}\n<TEXT>\n{document}</TEXT>\n</DOCUMENT>\n\
<DOCUMENT>\n<TYPE>EX-21\n<SEQUENCE>2\n<TEXT>\nSUBSIDIARIES OF THE REGISTRANT\nItem 1. Not a heading of the report\n</TEXT>\n</DOCUMENT>\n\
</SEC-DOCUMENT>\n",
        if html { "htm" } else { "txt" }
    );
    let meta = FilingMetadata {
        cik,
        company_name: format!("SYNTHETIC CORP {serial}"),
        form_type: "10-K".into(),
        date_filed: NaiveDate::from_ymd_opt(2020, 3, 1).unwrap(),
        archive_path: format!("edgar/data/{cik}/{acc}.txt"),
    };
    Synthetic { raw: RawFiling::new(envelope.into_bytes(), meta), html, expected }
}

/// Differences between extracted and expected items, empty when exact.
pub fn mismatches(got: &BTreeMap<ItemCode, String>, expected: &BTreeMap<ItemCode, String>) -> Vec<String> {
    let mut out = Vec::new();
    for code in ItemCode::ALL {
        match (got.get(&code), expected.get(&code)) {
            (None, None) => {}
            (Some(g), Some(e)) if g == e => {}
            (g, e) => out.push(format!("item {code}: got {g:?}, expected {e:?}")),
        }
    }
    out
}

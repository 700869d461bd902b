use std::sync::LazyLock;

use regex::Regex;

/// A table is dropped when digits make up more than this share of its
/// non-whitespace text. Lower-density tables are layout tables holding
/// prose and are kept.
pub const NUMERIC_DENSITY_THRESHOLD: f64 = 0.1;

static TABLE_TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)<(/?)table(?:[\s/>]|$)").unwrap());
static ANY_TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"<[^>]*>").unwrap());

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableRemoval {
    pub text: String,
    pub removed: usize,
    pub retained: usize,
}

/// Share of digit characters among the non-whitespace characters of the
/// table's text content (tags stripped, entities decoded). 0 for an empty
/// table.
pub fn numeric_density(table_markup: &str) -> f64 {
    let stripped = ANY_TAG.replace_all(table_markup, " ");
    let text = html_escape::decode_html_entities(&stripped);
    let (digits, visible) = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .fold((0usize, 0usize), |(d, n), c| (d + c.is_ascii_digit() as usize, n + 1));
    if visible == 0 {
        0.0
    } else {
        digits as f64 / visible as f64
    }
}

/// Deletes every outermost `<table>...</table>` element, HTML or the
/// `<TABLE>` fences of old plain-text filings, whose numeric density
/// exceeds [`NUMERIC_DENSITY_THRESHOLD`]. A removed table leaves a `<br>`
/// so the text on either side stays in separate blocks. Unterminated
/// tables are left alone.
pub fn remove_tables(html: &str) -> TableRemoval {
    let mut out = String::with_capacity(html.len());
    let mut removed = 0;
    let mut retained = 0;
    let mut cursor = 0;
    let mut depth = 0usize;
    let mut open_at = 0;

    for caps in TABLE_TAG.captures_iter(html) {
        let m = caps.get(0).unwrap();
        let closing = !caps[1].is_empty();
        if !closing {
            if depth == 0 {
                open_at = m.start();
            }
            depth += 1;
            continue;
        }
        if depth == 0 {
            continue;
        }
        depth -= 1;
        if depth > 0 {
            continue;
        }
        let close_end = html[m.start()..].find('>').map_or(html.len(), |p| m.start() + p + 1);
        let table = &html[open_at..close_end];
        out.push_str(&html[cursor..open_at]);
        if numeric_density(table) > NUMERIC_DENSITY_THRESHOLD {
            removed += 1;
            out.push_str("<br>");
        } else {
            retained += 1;
            out.push_str(table);
        }
        cursor = close_end;
    }
    out.push_str(&html[cursor..]);
    TableRemoval { text: out, removed, retained }
}

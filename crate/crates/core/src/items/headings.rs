use std::sync::LazyLock;

use regex::Regex;

use super::ItemCode;

/// An item heading found in the clean text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadingCandidate {
    pub item: ItemCode,
    /// Byte offset of the heading (the `I` of `Item`, or the `P` of a
    /// leading `PART II`).
    pub offset: usize,
    /// Byte offset just past the item code(s).
    pub code_end: usize,
    /// Further codes of a combined heading such as "Items 7 and 7A".
    pub also_covers: Vec<ItemCode>,
}

// A heading starts a line or follows a sentence end, so in-sentence
// references ("see Item 7") never match.
static HEADING: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?m)(?:^|[.!?][ \t]+)[ \t]*(?P<h>(?:(?i:part)[ \t]+(?:IV|III|II|I)\b[ \t]*[.,:\-–—]?[ \t]*)?(?i:items?)[ \t]*\.?[ \t]*(?P<num>\d{1,2})(?:[ \t]?(?P<let>[ABab]))?\b)",
    )
    .unwrap()
});

static CONTINUATION: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^[ \t]*(?:,|&|(?i:and)|(?i:through))[ \t]*(?P<num>\d{1,2})(?:[ \t]?(?P<let>[ABab]))?\b").unwrap()
});

const DELIMITERS: &[char] = &['.', ':', '-', '–', '—', '|'];

fn code_from(caps: &regex::Captures<'_>) -> Option<ItemCode> {
    let num: u32 = caps["num"].parse().ok()?;
    let letter = caps.name("let").and_then(|m| m.as_str().chars().next());
    ItemCode::from_parts(num, letter)
}

/// What follows the code must look like a heading: a delimiter, the end of
/// the line, or a capitalized title. "Item 7 of this report" is prose.
fn heading_tail_ok(rest: &str) -> bool {
    let rest = rest.trim_start_matches([' ', '\t']);
    match rest.chars().next() {
        None | Some('\n') | Some('\r') => true,
        Some(c) if DELIMITERS.contains(&c) => true,
        Some(c) => c.is_uppercase() || matches!(c, '"' | '\u{201C}' | '(' | '\''),
    }
}

/// Every item heading in `text`, in offset order, table-of-contents entries
/// included.
pub fn find_heading_candidates(text: &str) -> Vec<HeadingCandidate> {
    let mut out = Vec::new();
    for caps in HEADING.captures_iter(text) {
        let h = caps.name("h").unwrap();
        let Some(item) = code_from(&caps) else { continue };
        let mut code_end = h.end();
        let mut also_covers = Vec::new();
        while let Some(more) = CONTINUATION.captures(&text[code_end..]) {
            match code_from(&more) {
                Some(code) if code > item => {
                    also_covers.push(code);
                    code_end += more.get(0).unwrap().end();
                }
                _ => break,
            }
        }
        if !heading_tail_ok(&text[code_end..]) {
            continue;
        }
        out.push(HeadingCandidate { item, offset: h.start(), code_end, also_covers });
    }
    out
}

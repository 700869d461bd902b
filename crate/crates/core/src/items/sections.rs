use std::collections::BTreeMap;
use std::ops::Range;
use std::sync::LazyLock;

use regex::Regex;
use tracing::debug;

use super::{HeadingCandidate, ItemCode};

/// A heading is treated as a table-of-contents entry when it belongs to a
/// group of at least `TOC_MIN_HEADINGS` headings spanning fewer than
/// `TOC_WINDOW_BYTES` bytes and its item is headed again further on.
pub const TOC_MIN_HEADINGS: usize = 4;
pub const TOC_WINDOW_BYTES: usize = 1000;

// Trailing part banner ("PART II", "PART III - OTHER INFORMATION") that
// belongs to the next part, not to the section it ends.
static PART_BANNER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(?i:part)[ \t]+(?:IV|III|II|I)\b[ \t]*[.:\-–—]?[^a-z\n]*$").unwrap());

/// Marks every candidate that sits inside a dense cluster of headings and
/// is repeated later. Short body sections cluster too, but the last heading
/// of an item is never a table-of-contents entry.
pub fn toc_like(candidates: &[HeadingCandidate]) -> Vec<bool> {
    let n = candidates.len();
    let mut dense = vec![false; n];
    let k = TOC_MIN_HEADINGS;
    if n < k {
        return dense;
    }
    for start in 0..=n - k {
        if candidates[start + k - 1].offset - candidates[start].offset < TOC_WINDOW_BYTES {
            dense[start..start + k].iter_mut().for_each(|f| *f = true);
        }
    }
    (0..n)
        .map(|i| dense[i] && candidates[i + 1..].iter().any(|c| c.item == candidates[i].item))
        .collect()
}

/// Chooses one body heading per item and returns each item's byte span.
///
/// Table-of-contents entries are only considered for an item that has no
/// other heading. The chosen headings must appear in item order; among the
/// orderings that keep the most items, the one whose headings are followed
/// by the most text before the next different heading wins. Each span runs
/// to the next chosen heading (minus a trailing part banner) or to the end
/// of the text.
pub fn resolve_sections(candidates: &[HeadingCandidate], text: &str) -> BTreeMap<ItemCode, Range<usize>> {
    let mut sorted: Vec<&HeadingCandidate> = candidates.iter().collect();
    sorted.sort_by_key(|c| c.offset);
    let owned: Vec<HeadingCandidate> = sorted.iter().map(|c| (*c).clone()).collect();
    let toc = toc_like(&owned);

    let mut has_body = [false; 20];
    for (c, &t) in owned.iter().zip(&toc) {
        if !t {
            has_body[c.item.index()] = true;
        }
    }
    let eligible: Vec<usize> = (0..owned.len())
        .filter(|&i| !toc[i] || !has_body[owned[i].item.index()])
        .collect();

    // Text following each heading up to the next heading of another item.
    let reach: Vec<usize> = (0..owned.len())
        .map(|i| {
            let next = owned[i + 1..]
                .iter()
                .find(|c| c.item != owned[i].item)
                .map_or(text.len(), |c| c.offset);
            next - owned[i].offset
        })
        .collect();

    // Longest chain with strictly increasing offsets and item codes,
    // scored by (items kept, total reach).
    let m = eligible.len();
    let mut best: Vec<(usize, usize)> = vec![(0, 0); m];
    let mut prev: Vec<Option<usize>> = vec![None; m];
    for a in 0..m {
        let ca = &owned[eligible[a]];
        best[a] = (1, reach[eligible[a]]);
        for b in 0..a {
            let cb = &owned[eligible[b]];
            if cb.item < ca.item && cb.offset < ca.offset {
                let score = (best[b].0 + 1, best[b].1 + reach[eligible[a]]);
                if score > best[a] {
                    best[a] = score;
                    prev[a] = Some(b);
                }
            }
        }
    }
    let mut chain = Vec::new();
    let mut cursor = (0..m).max_by_key(|&a| (best[a], std::cmp::Reverse(a)));
    while let Some(a) = cursor {
        chain.push(eligible[a]);
        cursor = prev[a];
    }
    chain.reverse();

    for (i, c) in owned.iter().enumerate() {
        if !toc[i] && !chain.iter().any(|&j| owned[j].item == c.item) {
            debug!(item = %c.item, offset = c.offset, "heading dropped: out of order");
        }
    }

    let mut spans = BTreeMap::new();
    for (pos, &i) in chain.iter().enumerate() {
        let start = owned[i].offset;
        let end = chain.get(pos + 1).map_or(text.len(), |&j| owned[j].offset);
        let end = start + trim_trailing_banner(&text[start..end]);
        for code in &owned[i].also_covers {
            debug!(item = %owned[i].item, merged = %code, "combined heading, second item left empty");
        }
        spans.insert(owned[i].item, start..end);
    }
    spans
}

/// Length of `section` without trailing whitespace and part banners.
fn trim_trailing_banner(section: &str) -> usize {
    let mut s = section.trim_end();
    while let Some(p) = s.rfind('\n') {
        let (head, last) = (&s[..p], &s[p + 1..]);
        if PART_BANNER.is_match(last.trim()) {
            s = head.trim_end();
        } else {
            break;
        }
    }
    s.len()
}

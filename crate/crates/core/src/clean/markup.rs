use std::sync::LazyLock;

use regex::Regex;

/// Pattern that no cleaned text may match: something that reads as a tag.
pub static TAG_PATTERN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"<[A-Za-z/!?][^<>]*>").unwrap());

/// Pattern that no cleaned text may match: a character entity reference.
pub static ENTITY_PATTERN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"&(?:#[0-9]+|#[xX][0-9A-Fa-f]+|[A-Za-z][A-Za-z0-9]*);").unwrap());

static HTML_HINT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)<(?:html|body|p|div|br|tr|td|font|span|h[1-6])[\s>/]").unwrap());

/// How raw line breaks in the source are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextMode {
    /// HTML: source newlines are whitespace; blocks come from tags.
    Html,
    /// Plain-text filings: source newlines are kept.
    Plain,
}

impl TextMode {
    pub fn detect(content: &str) -> TextMode {
        if HTML_HINT.is_match(content) {
            TextMode::Html
        } else {
            TextMode::Plain
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StrippedText {
    pub text: String,
    /// Bytes of tags, comments and script/style bodies that were dropped.
    pub removed_markup_bytes: usize,
    /// Bytes saved by decoding entities (`&nbsp;` is 6 bytes, its result 2).
    pub entity_bytes_saved: usize,
    /// Bytes gained by the rare entities whose decoding is longer.
    pub entity_bytes_added: usize,
    /// Bytes of whitespace dropped during normalization.
    pub whitespace_bytes_removed: usize,
    /// Line breaks and spaces inserted for block and cell tags, before
    /// normalization.
    pub inserted_break_bytes: usize,
    /// Spaces inserted to break up decoded text that reads as markup.
    pub defang_inserted_bytes: usize,
}

impl StrippedText {
    /// Input length reconstructed from the bookkeeping counters.
    pub fn accounted_input_len(&self) -> usize {
        (self.text.len() + self.removed_markup_bytes + self.entity_bytes_saved + self.whitespace_bytes_removed)
            .saturating_sub(self.inserted_break_bytes + self.defang_inserted_bytes + self.entity_bytes_added)
    }
}

const BLOCK_TAGS: &[&str] = &[
    "address", "article", "aside", "blockquote", "body", "br", "caption", "center", "dd", "div", "dl",
    "document", "dt", "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5",
    "h6", "head", "header", "hr", "html", "li", "main", "nav", "ol", "p", "page", "pre", "section", "table",
    "tbody", "text", "tfoot", "thead", "title", "tr", "ul",
];
const CELL_TAGS: &[&str] = &["td", "th"];
const SKIPPED_CONTENT: &[&str] = &["script", "style", "head"];

/// Strips markup, auto-detecting whether the input is HTML or plain text.
pub fn strip_markup(content: &str) -> StrippedText {
    strip_markup_with_mode(content, TextMode::detect(content))
}

/// Removes tags and comments, drops `<script>`, `<style>` and `<head>`
/// contents, decodes character entities and normalizes whitespace: runs of
/// spaces collapse to one, lines are trimmed and blank lines removed.
/// Block-level tags end a line; inline tags vanish without a trace.
pub fn strip_markup_with_mode(content: &str, mode: TextMode) -> StrippedText {
    let bytes = content.as_bytes();
    let mut raw = String::with_capacity(content.len());
    let mut run_start = 0;
    let mut removed_markup = 0;
    let mut entity_saved = (0, 0);
    let mut pre_depth = 0usize;
    let mut inserted = 0;
    let mut i = 0;

    let flush = |raw: &mut String, run: &str, pre: bool, saved: &mut (usize, usize)| {
        if run.is_empty() {
            return;
        }
        let decoded = html_escape::decode_html_entities(&replace_invalid_numeric_refs(run)).into_owned();
        // A few named entities ("&nGt;") decode to more bytes than they span.
        if decoded.len() <= run.len() {
            saved.0 += run.len() - decoded.len();
        } else {
            saved.1 += decoded.len() - run.len();
        }
        if mode == TextMode::Html && !pre {
            raw.extend(decoded.chars().map(|c| if c == '\n' || c == '\r' { ' ' } else { c }));
        } else {
            raw.push_str(&decoded);
        }
    };

    while i < bytes.len() {
        if bytes[i] != b'<' {
            i += 1;
            continue;
        }
        let rest = &content[i..];
        if rest.starts_with("<!--") {
            let end = rest.find("-->").map_or(rest.len(), |p| p + 3);
            flush(&mut raw, &content[run_start..i], pre_depth > 0, &mut entity_saved);
            removed_markup += end;
            i += end;
            run_start = i;
            continue;
        }
        let starts_tag = rest[1..].chars().next().is_some_and(|c| c.is_ascii_alphabetic() || matches!(c, '/' | '!' | '?'));
        let Some(tag_len) = starts_tag.then(|| tag_length(rest)).flatten() else {
            i += 1;
            continue;
        };
        flush(&mut raw, &content[run_start..i], pre_depth > 0, &mut entity_saved);
        let tag = &rest[..tag_len];
        removed_markup += tag_len;
        i += tag_len;
        let (name, closing) = tag_name(tag);

        if !closing && SKIPPED_CONTENT.contains(&name.as_str()) {
            let close = format!("</{name}");
            let skip = find_ascii_ci(&content[i..], &close)
                .map(|p| p + content[i + p..].find('>').map_or(content.len() - i - p, |q| q + 1))
                .unwrap_or(content.len() - i);
            removed_markup += skip;
            i += skip;
        } else if name == "pre" {
            if closing {
                pre_depth = pre_depth.saturating_sub(1);
            } else {
                pre_depth += 1;
            }
        }
        if BLOCK_TAGS.contains(&name.as_str()) {
            raw.push('\n');
            inserted += 1;
        } else if CELL_TAGS.contains(&name.as_str()) {
            raw.push(' ');
            inserted += 1;
        }
        run_start = i;
    }
    flush(&mut raw, &content[run_start..], pre_depth > 0, &mut entity_saved);

    let normalized = normalize_whitespace(&raw);
    let whitespace_removed = raw.len() - normalized.len();
    let text = defang(&normalized);
    let defang_inserted = text.len() - normalized.len();
    StrippedText {
        text,
        removed_markup_bytes: removed_markup,
        entity_bytes_saved: entity_saved.0,
        entity_bytes_added: entity_saved.1,
        whitespace_bytes_removed: whitespace_removed,
        inserted_break_bytes: inserted,
        defang_inserted_bytes: defang_inserted,
    }
}

/// Length of the tag starting at `s[0] == '<'`, honoring quoted attribute
/// values. `None` when there is no closing `>`.
fn tag_length(s: &str) -> Option<usize> {
    let mut quote: Option<u8> = None;
    for (i, &b) in s.as_bytes().iter().enumerate().skip(1) {
        match quote {
            Some(q) if b == q => quote = None,
            Some(_) => {}
            None if b == b'"' || b == b'\'' => {
                // Only quotes that open an attribute value count.
                if s.as_bytes()[i - 1] == b'=' {
                    quote = Some(b);
                }
            }
            None if b == b'>' => return Some(i + 1),
            None if b == b'<' && i > 1 => return None,
            None => {}
        }
    }
    None
}

fn tag_name(tag: &str) -> (String, bool) {
    let inner = tag.trim_start_matches('<');
    let closing = inner.starts_with('/');
    let name: String = inner
        .trim_start_matches('/')
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect();
    (name, closing)
}

fn find_ascii_ci(haystack: &str, needle: &str) -> Option<usize> {
    let h = haystack.as_bytes();
    let n = needle.as_bytes();
    if n.len() > h.len() {
        return None;
    }
    (0..=h.len() - n.len()).find(|&i| h[i..i + n.len()].eq_ignore_ascii_case(n))
}

fn is_inline_space(c: char) -> bool {
    c != '\n' && (c.is_whitespace() || c.is_control())
}

fn is_invisible(c: char) -> bool {
    matches!(c, '\u{200B}' | '\u{200C}' | '\u{200D}' | '\u{2060}' | '\u{FEFF}' | '\u{00AD}')
}

/// Collapses whitespace runs to a single space, trims every line and drops
/// empty lines.
pub fn normalize_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.split('\n') {
        let mut pending_space = false;
        let mut wrote = false;
        for c in line.chars() {
            if is_invisible(c) {
                continue;
            }
            if is_inline_space(c) {
                pending_space = wrote;
                continue;
            }
            if !wrote && !out.is_empty() {
                out.push('\n');
            }
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(c);
            wrote = true;
        }
    }
    out
}

static NUMERIC_REF: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"&#(?:([0-9]{1,10})|[xX]([0-9A-Fa-f]{1,8}));").unwrap());

/// Numeric references to NUL, surrogates or beyond U+10FFFF become U+FFFD,
/// as browsers render them; the entity decoder would leave them verbatim.
fn replace_invalid_numeric_refs(run: &str) -> std::borrow::Cow<'_, str> {
    if !run.contains("&#") {
        return run.into();
    }
    NUMERIC_REF.replace_all(run, |caps: &regex::Captures<'_>| {
        let value = match (caps.get(1), caps.get(2)) {
            (Some(d), _) => d.as_str().parse::<u64>().ok(),
            (_, Some(h)) => u64::from_str_radix(h.as_str(), 16).ok(),
            _ => None,
        };
        match value.and_then(|v| u32::try_from(v).ok()).filter(|&v| v != 0).and_then(char::from_u32) {
            Some(_) => caps[0].to_string(),
            None => "\u{FFFD}".to_string(),
        }
    })
}

/// Breaks up any decoded text that would still read as a tag or entity,
/// e.g. `&lt;b&gt;` decodes to `<b>` and is emitted as `< b>`.
fn defang(text: &str) -> String {
    if !text.contains('<') && !text.contains('&') {
        return text.to_string();
    }
    let mut out = text.to_string();
    loop {
        let hit = TAG_PATTERN.find(&out).or_else(|| ENTITY_PATTERN.find(&out));
        let Some(m) = hit else { return out };
        out.insert(m.start() + 1, ' ');
    }
}

use std::sync::LazyLock;

use encoding_rs::{Encoding, UTF_8, WINDOWS_1252};
use regex::bytes::Regex;

static CHARSET: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"(?i)charset\s*=\s*["']?([A-Za-z0-9_:.\-]+)"#).unwrap());

const CHARSET_SCAN_BYTES: usize = 8 * 1024;

/// Declared UTF-8 that is broken in more than this fraction of bytes is
/// treated as mislabelled and decoded as Latin-1 instead.
const MAX_UTF8_DAMAGE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub text: String,
    /// Invalid byte sequences replaced by U+FFFD.
    pub replaced: usize,
    pub encoding: &'static str,
}

/// Decodes document bytes: the declared charset if there is one, UTF-8 if
/// the bytes are valid UTF-8, otherwise Latin-1 (as windows-1252, the
/// superset browsers use for that label).
pub fn decode_document(bytes: &[u8]) -> Decoded {
    let declared = CHARSET
        .captures(&bytes[..bytes.len().min(CHARSET_SCAN_BYTES)])
        .and_then(|c| Encoding::for_label(&c[1]));

    match declared {
        Some(enc) if enc != UTF_8 => {
            let (text, _, had_errors) = enc.decode(bytes);
            let replaced = if had_errors { text.matches('\u{FFFD}').count() } else { 0 };
            Decoded { text: text.into_owned(), replaced, encoding: enc.name() }
        }
        _ => {
            if let Ok(text) = std::str::from_utf8(bytes) {
                return Decoded { text: text.to_string(), replaced: 0, encoding: UTF_8.name() };
            }
            let (text, replaced) = lossy_utf8(bytes);
            if declared.is_some() && (replaced as f64) <= MAX_UTF8_DAMAGE * bytes.len() as f64 {
                return Decoded { text, replaced, encoding: UTF_8.name() };
            }
            let (text, _, _) = WINDOWS_1252.decode(bytes);
            Decoded { text: text.into_owned(), replaced: 0, encoding: WINDOWS_1252.name() }
        }
    }
}

fn lossy_utf8(bytes: &[u8]) -> (String, usize) {
    let mut out = String::with_capacity(bytes.len());
    let mut replaced = 0;
    for chunk in bytes.utf8_chunks() {
        out.push_str(chunk.valid());
        if !chunk.invalid().is_empty() {
            out.push('\u{FFFD}');
            replaced += 1;
        }
    }
    (out, replaced)
}

/// Rule-based word tokenizer.
///
/// Text is lowercased and split at whitespace. Runs of letters and digits
/// form words; a hyphen between two alphanumerics stays inside the word
/// (`risk-free`), as does a `.` or `,` between two digits (`3.5`,
/// `1,250`). A possessive `'s` becomes its own token. Every other
/// non-space character is a one-character token.
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text
        .chars()
        .flat_map(char::to_lowercase)
        .map(|c| if c == '\u{2019}' { '\'' } else { c })
        .collect();
    let mut tokens = Vec::new();
    let mut word = String::new();
    let flush = |word: &mut String, tokens: &mut Vec<String>| {
        if !word.is_empty() {
            tokens.push(std::mem::take(word));
        }
    };
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let prev = i.checked_sub(1).map(|p| chars[p]);
        let next = chars.get(i + 1).copied();
        if c.is_alphanumeric() {
            word.push(c);
        } else if c.is_whitespace() {
            flush(&mut word, &mut tokens);
        } else if c == '-' && !word.is_empty() && prev.is_some_and(char::is_alphanumeric) && next.is_some_and(char::is_alphanumeric) {
            word.push(c);
        } else if matches!(c, '.' | ',')
            && !word.is_empty()
            && prev.is_some_and(|p| p.is_ascii_digit())
            && next.is_some_and(|n| n.is_ascii_digit())
        {
            word.push(c);
        } else if c == '\''
            && !word.is_empty()
            && next == Some('s')
            && !chars.get(i + 2).copied().is_some_and(char::is_alphanumeric)
        {
            flush(&mut word, &mut tokens);
            tokens.push("'s".to_string());
            i += 1;
        } else {
            flush(&mut word, &mut tokens);
            tokens.push(c.to_string());
        }
        i += 1;
    }
    flush(&mut word, &mut tokens);
    tokens
}

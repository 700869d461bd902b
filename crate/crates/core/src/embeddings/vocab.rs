use std::collections::HashMap;

pub const DEFAULT_MAX_SIZE: usize = 100_000;
pub const DEFAULT_MIN_COUNT: u64 = 5;

/// Token ids are dense and ordered by descending frequency, ties broken
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Keeps the `max_size` most frequent tokens seen at least `min_count`
    /// times.
    pub fn build<I, S>(tokens: I, max_size: usize, min_count: u64) -> Vocabulary
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut counts: HashMap<String, u64> = HashMap::new();
        for t in tokens {
            let t = t.as_ref();
            match counts.get_mut(t) {
                Some(c) => *c += 1,
                None => {
                    counts.insert(t.to_string(), 1);
                }
            }
        }
        Vocabulary::from_counts(counts, max_size, min_count)
    }

    pub fn from_counts(counts: HashMap<String, u64>, max_size: usize, min_count: u64) -> Vocabulary {
        let mut entries: Vec<(String, u64)> = counts.into_iter().filter(|(_, c)| *c >= min_count.max(1)).collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        entries.truncate(max_size);
        let (tokens, counts): (Vec<String>, Vec<u64>) = entries.into_iter().unzip();
        Vocabulary::assemble(tokens, counts)
    }

    /// Vocabulary in the given order with unknown frequencies (zero), as
    /// read back from a vector file.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Vocabulary, String> {
        let counts = vec![0; tokens.len()];
        let v = Vocabulary::assemble(tokens, counts);
        if v.index.len() != v.tokens.len() {
            let dup = v.tokens.iter().enumerate().find(|(i, t)| v.index[*t] as usize != *i).unwrap().1;
            return Err(dup.clone());
        }
        Ok(v)
    }

    fn assemble(tokens: Vec<String>, counts: Vec<u64>) -> Vocabulary {
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            index.entry(t.clone()).or_insert(i as u32);
        }
        Vocabulary { tokens, counts, index }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn count(&self, id: u32) -> u64 {
        self.counts[id as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }
}

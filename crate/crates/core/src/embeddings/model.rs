use super::sgns::dot;
use super::Vocabulary;

/// Word vectors: row `i` of `input` belongs to token id `i`. `output`
/// holds the context vectors when the model came out of training.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub vocab: Vocabulary,
    pub dim: usize,
    pub input: Vec<f64>,
    pub output: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0:?} is not in the vocabulary")]
pub struct NotInVocabulary(pub String);

impl EmbeddingModel {
    pub fn new(vocab: Vocabulary, dim: usize, input: Vec<f64>, output: Option<Vec<f64>>) -> Self {
        assert_eq!(input.len(), vocab.len() * dim, "input matrix shape");
        if let Some(o) = &output {
            assert_eq!(o.len(), vocab.len() * dim, "output matrix shape");
        }
        EmbeddingModel { vocab, dim, input, output }
    }

    pub fn row(&self, id: u32) -> &[f64] {
        let start = id as usize * self.dim;
        &self.input[start..start + self.dim]
    }

    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.vocab.id(token).map(|id| self.row(id))
    }

    pub fn is_finite(&self) -> bool {
        self.input.iter().chain(self.output.iter().flatten()).all(|x| x.is_finite())
    }

    pub fn similarity(&self, a: &str, b: &str) -> Result<f64, NotInVocabulary> {
        let va = self.vector(a).ok_or_else(|| NotInVocabulary(a.to_string()))?;
        let vb = self.vector(b).ok_or_else(|| NotInVocabulary(b.to_string()))?;
        Ok(cosine(va, vb))
    }

    /// Top `k` tokens by cosine similarity to `query`, the query itself
    /// excluded. With `exclude_inflections`, the query with a trailing "s"
    /// added or removed is dropped too. Equal scores keep id order.
    pub fn nearest_neighbors(&self, query: &str, k: usize, exclude_inflections: bool) -> Result<Vec<(String, f64)>, NotInVocabulary> {
        let qid = self.vocab.id(query).ok_or_else(|| NotInVocabulary(query.to_string()))?;
        let q = self.row(qid);
        let plural = format!("{query}s");
        let singular = query.strip_suffix('s');
        let mut scored: Vec<(u32, f64)> = (0..self.vocab.len() as u32)
            .filter(|&id| id != qid)
            .filter(|&id| {
                let t = self.vocab.token(id);
                !(exclude_inflections && (t == plural || Some(t) == singular))
            })
            .map(|id| (id, cosine(q, self.row(id))))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored.into_iter().map(|(id, s)| (self.vocab.token(id).to_string(), s)).collect())
    }
}

/// Cosine similarity; 0 when either vector is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot(a, b) / (na * nb)
    }
}

//! Toy co-occurrence corpus for the skip-gram trainer.

use edgar_corpus::embeddings::{TrainConfig, Vocabulary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 200 sentences: "alpha" and "beta" share one set of context words,
/// "gamma" another, and gamma never meets alpha or beta.
pub fn toy_corpus(seed: u64) -> (Vocabulary, Vec<Vec<u32>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shared = ["market", "price", "stock", "trade", "share"];
    let other = ["river", "tree", "cloud", "stone", "grass"];
    let mut sentences: Vec<Vec<String>> = Vec::new();
    for i in 0..200 {
        let mut s = Vec::new();
        let (pool, heads): (&[&str], &[&str]) = if i % 3 == 2 { (&other, &["gamma"]) } else { (&shared, &["alpha", "beta"]) };
        for _ in 0..8 {
            s.push(pool[rng.random_range(0..pool.len())].to_string());
        }
        for h in heads {
            let at = rng.random_range(0..=s.len());
            s.insert(at, h.to_string());
        }
        sentences.push(s);
    }
    let vocab = Vocabulary::build(sentences.iter().flatten(), 100, 1);
    let ids = sentences.iter().map(|s| s.iter().map(|t| vocab.id(t).unwrap()).collect()).collect();
    (vocab, ids)
}

pub fn toy_config(seed: u64) -> TrainConfig {
    TrainConfig {
        dim: 16,
        window: 3,
        negatives: 5,
        epochs: 10,
        subsample_t: 0.0,
        seed,
        deterministic: true,
        ..TrainConfig::default()
    }
}

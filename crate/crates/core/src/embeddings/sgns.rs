//! Skip-gram with negative sampling.

use std::cell::Cell;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tracing::info;

use super::{EmbeddingModel, NoiseSampler, Vocabulary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    /// Frequent-word subsampling threshold; 0 disables it.
    pub subsample_t: f64,
    pub seed: u64,
    /// Single worker with a fixed random stream: output is bit-reproducible.
    pub deterministic: bool,
    /// Workers for asynchronous training; ignored in deterministic mode.
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 200,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            subsample_t: 1e-3,
            seed: 1,
            deterministic: false,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

/// The learning rate never drops below this share of the initial rate.
pub const MIN_LR_FRACTION: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrainError {
    #[error("vocabulary is empty, nothing to train")]
    EmptyVocabulary,
    #[error("corpus contains no in-vocabulary tokens")]
    EmptyCorpus,
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("loss became {loss} in epoch {epoch} at center word {word:?} (lr {lr}); lower initial_lr")]
    NonFinite { loss: f64, epoch: usize, word: String, lr: f64 },
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::Config(m.to_string()));
        if self.dim == 0 {
            return bad("dim must be at least 1");
        }
        if self.window == 0 {
            return bad("window must be at least 1");
        }
        if self.negatives == 0 {
            return bad("negatives must be at least 1");
        }
        if !(self.initial_lr.is_finite() && self.initial_lr > 0.0) {
            return bad("initial_lr must be positive");
        }
        if !(self.subsample_t.is_finite() && self.subsample_t >= 0.0) {
            return bad("subsample_t must be non-negative");
        }
        Ok(())
    }
}

/// Per-epoch mean loss per (center, target) update.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epoch_loss: Vec<f64>,
    pub pairs: u64,
}

trait Weights {
    fn load(&self, i: usize) -> f64;
    fn store(&self, i: usize, v: f64);
}

impl Weights for [Cell<f64>] {
    fn load(&self, i: usize) -> f64 {
        self[i].get()
    }
    fn store(&self, i: usize, v: f64) {
        self[i].set(v)
    }
}

// Lock-free shared weights. Relaxed loads and stores of the bit pattern
// compile to plain moves; concurrent updates may overwrite each other.
impl Weights for [AtomicU64] {
    fn load(&self, i: usize) -> f64 {
        f64::from_bits(self[i].load(Ordering::Relaxed))
    }
    fn store(&self, i: usize, v: f64) {
        self[i].store(v.to_bits(), Ordering::Relaxed)
    }
}

/// log σ(x), stable for large |x|.
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// SGNS loss of one center vector `v` against its targets:
/// −log σ(u₀·v) − Σ log σ(−uⱼ·v), with `labels` marking the true context.
pub fn pair_loss(v: &[f64], targets: &[&[f64]], labels: &[bool]) -> f64 {
    targets
        .iter()
        .zip(labels)
        .map(|(u, &label)| {
            let f = dot(v, u);
            -log_sigmoid(if label { f } else { -f })
        })
        .sum()
}

/// Analytic gradient of [`pair_loss`] with respect to `v` and each target.
pub fn pair_gradient(v: &[f64], targets: &[&[f64]], labels: &[bool]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut dv = vec![0.0; v.len()];
    let mut du = Vec::with_capacity(targets.len());
    for (u, &label) in targets.iter().zip(labels) {
        let g = sigmoid(dot(v, u)) - if label { 1.0 } else { 0.0 };
        for (d, x) in dv.iter_mut().zip(*u) {
            *d += g * x;
        }
        du.push(v.iter().map(|x| g * x).collect());
    }
    (dv, du)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One SGD step on the center row `center` of `input` against `targets`
/// (rows of `output`, label true for the context word). Returns the loss
/// before the step.
fn step<W: Weights + ?Sized>(
    input: &W,
    output: &W,
    dim: usize,
    center: u32,
    targets: &[(u32, bool)],
    lr: f64,
    scratch: &mut [f64],
) -> f64 {
    let vo = center as usize * dim;
    scratch.iter_mut().for_each(|x| *x = 0.0);
    let mut loss = 0.0;
    for &(t, label) in targets {
        let uo = t as usize * dim;
        let mut f = 0.0;
        for j in 0..dim {
            f += input.load(vo + j) * output.load(uo + j);
        }
        loss -= log_sigmoid(if label { f } else { -f });
        let g = lr * ((if label { 1.0 } else { 0.0 }) - sigmoid(f));
        for j in 0..dim {
            let u = output.load(uo + j);
            scratch[j] += g * u;
            output.store(uo + j, u + g * input.load(vo + j));
        }
    }
    for j in 0..dim {
        input.store(vo + j, input.load(vo + j) + scratch[j]);
    }
    loss
}

/// Applies one SGNS update to plain row-major matrices. `context` is the
/// positive target; returns the loss before the update.
pub fn sgns_step(
    input: &mut [f64],
    output: &mut [f64],
    dim: usize,
    center: u32,
    context: u32,
    negatives: &[u32],
    lr: f64,
) -> f64 {
    let input = Cell::from_mut(input).as_slice_of_cells();
    let output = Cell::from_mut(output).as_slice_of_cells();
    let targets: Vec<(u32, bool)> =
        std::iter::once((context, true)).chain(negatives.iter().map(|&n| (n, false))).collect();
    let mut scratch = vec![0.0; dim];
    step(input, output, dim, center, &targets, lr, &mut scratch)
}

/// Input vectors uniform in [−0.5/d, 0.5/d), output vectors zero.
pub fn initial_model(vocab: Vocabulary, dim: usize, seed: u64) -> EmbeddingModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let input = (0..vocab.len() * dim).map(|_| (rng.random::<f64>() - 0.5) / dim as f64).collect();
    let output = vec![0.0; vocab.len() * dim];
    EmbeddingModel::new(vocab, dim, input, Some(output))
}

/// Trains vectors on `sentences` of token ids (out-of-vocabulary tokens
/// already removed).
pub fn train(vocab: Vocabulary, sentences: &[Vec<u32>], config: &TrainConfig) -> Result<(EmbeddingModel, TrainReport), TrainError> {
    config.validate()?;
    if vocab.is_empty() {
        return Err(TrainError::EmptyVocabulary);
    }
    let train_words: u64 = sentences.iter().map(|s| s.len() as u64).sum();
    if train_words == 0 {
        return Err(TrainError::EmptyCorpus);
    }
    let dim = config.dim;
    let model = initial_model(vocab, dim, config.seed);
    if config.epochs == 0 {
        return Ok((model, TrainReport { epoch_loss: Vec::new(), pairs: 0 }));
    }
    let sampler = NoiseSampler::new(model.vocab.counts())
        .unwrap_or_else(|| NoiseSampler::new(&vec![1; model.vocab.len()]).unwrap());
    let keep = keep_probabilities(model.vocab.counts(), config.subsample_t);

    let to_atomic = |v: &[f64]| v.iter().map(|x| AtomicU64::new(x.to_bits())).collect::<Vec<_>>();
    let input = to_atomic(&model.input);
    let output = to_atomic(model.output.as_deref().unwrap());
    let workers = if config.deterministic { 1 } else { config.workers.clamp(1, sentences.len().max(1)) };
    let shared = Shared {
        input: &input,
        output: &output,
        vocab: &model.vocab,
        sampler: &sampler,
        keep: &keep,
        config,
        total_words: config.epochs as u64 * train_words,
        processed: AtomicU64::new(0),
        abort: AtomicBool::new(false),
    };
    info!(vocab = model.vocab.len(), dim, train_words, workers, epochs = config.epochs, "training");

    let chunk = sentences.len().div_ceil(workers);
    let results: Vec<Result<WorkerStats, TrainError>> = std::thread::scope(|s| {
        let handles: Vec<_> = sentences
            .chunks(chunk)
            .enumerate()
            .map(|(w, shard)| {
                let shared = &shared;
                s.spawn(move || shared.run(w as u64, shard))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("training worker panicked")).collect()
    });
    let mut loss = vec![0.0; config.epochs];
    let mut pairs = vec![0u64; config.epochs];
    for r in results {
        let stats = r?;
        for e in 0..config.epochs {
            loss[e] += stats.loss[e];
            pairs[e] += stats.pairs[e];
        }
    }
    let epoch_loss: Vec<f64> = loss.iter().zip(&pairs).map(|(l, &p)| if p == 0 { 0.0 } else { l / p as f64 }).collect();
    for (e, l) in epoch_loss.iter().enumerate() {
        info!(epoch = e + 1, mean_loss = l, "epoch done");
    }
    let from_atomic = |v: Vec<AtomicU64>| v.into_iter().map(|x| f64::from_bits(x.into_inner())).collect::<Vec<_>>();
    let trained = EmbeddingModel::new(model.vocab, dim, from_atomic(input), Some(from_atomic(output)));
    Ok((trained, TrainReport { epoch_loss, pairs: pairs.iter().sum() }))
}

/// word2vec keep probability: (sqrt(f/(t·N)) + 1)·t·N/f, capped at 1.
pub fn keep_probabilities(counts: &[u64], t: f64) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    counts
        .iter()
        .map(|&c| {
            if t <= 0.0 || c == 0 {
                return 1.0;
            }
            let threshold = t * total as f64;
            let f = c as f64;
            (((f / threshold).sqrt() + 1.0) * threshold / f).min(1.0)
        })
        .collect()
}

struct Shared<'a> {
    input: &'a [AtomicU64],
    output: &'a [AtomicU64],
    vocab: &'a Vocabulary,
    sampler: &'a NoiseSampler,
    keep: &'a [f64],
    config: &'a TrainConfig,
    total_words: u64,
    processed: AtomicU64,
    abort: AtomicBool,
}

struct WorkerStats {
    loss: Vec<f64>,
    pairs: Vec<u64>,
}

impl Shared<'_> {
    fn run(&self, worker: u64, shard: &[Vec<u32>]) -> Result<WorkerStats, TrainError> {
        let cfg = self.config;
        let dim = cfg.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(worker + 1);
        let mut stats = WorkerStats { loss: vec![0.0; cfg.epochs], pairs: vec![0; cfg.epochs] };
        let mut scratch = vec![0.0; dim];
        let mut kept = Vec::new();
        let mut targets = Vec::with_capacity(cfg.negatives + 1);
        for epoch in 0..cfg.epochs {
            for sentence in shard {
                if self.abort.load(Ordering::Relaxed) {
                    return Ok(stats);
                }
                let done = self.processed.fetch_add(sentence.len() as u64, Ordering::Relaxed);
                let progress = done as f64 / (self.total_words + 1) as f64;
                let lr = cfg.initial_lr * (1.0 - progress).max(MIN_LR_FRACTION);

                kept.clear();
                kept.extend(sentence.iter().copied().filter(|&w| {
                    let p = self.keep[w as usize];
                    p >= 1.0 || rng.random::<f64>() < p
                }));
                for (pos, &center) in kept.iter().enumerate() {
                    let reduced = rng.random_range(0..cfg.window);
                    let half = cfg.window - reduced;
                    let lo = pos.saturating_sub(half);
                    let hi = (pos + half).min(kept.len() - 1);
                    for (cpos, &context) in kept.iter().enumerate().take(hi + 1).skip(lo) {
                        if cpos == pos {
                            continue;
                        }
                        targets.clear();
                        targets.push((context, true));
                        for _ in 0..cfg.negatives {
                            let n = self.sampler.sample(&mut rng);
                            if n != context {
                                targets.push((n, false));
                            }
                        }
                        let loss = step(self.input, self.output, dim, center, &targets, lr, &mut scratch);
                        if !loss.is_finite() {
                            self.abort.store(true, Ordering::Relaxed);
                            return Err(TrainError::NonFinite {
                                loss,
                                epoch: epoch + 1,
                                word: self.vocab.token(center).to_string(),
                                lr,
                            });
                        }
                        stats.loss[epoch] += loss;
                        stats.pairs[epoch] += 1;
                    }
                }
            }
        }
        Ok(stats)
    }
}

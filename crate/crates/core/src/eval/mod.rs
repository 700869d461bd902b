//! Hypernym classification of financial terms from their embeddings,
//! scored by accuracy and mean rank under stratified cross-validation.

mod classifier;
mod folds;

use std::collections::BTreeSet;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tracing::warn;

use crate::embeddings::{tokenize, EmbeddingModel};

pub use classifier::{objective_and_gradient, rank_of, rank_order, ClassifierConfig, ClassifierError, SoftmaxClassifier};
pub use folds::stratified_folds;

pub const DEFAULT_FOLDS: usize = 10;

/// Terms with their hypernym ids; ids index the sorted `label_set`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HypernymDataset {
    pub terms: Vec<String>,
    pub labels: Vec<usize>,
    pub label_set: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetLine {
    term: String,
    label: String,
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Malformed { path: PathBuf, line: usize, message: String },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("cannot cross-validate: class {label:?} has only {count} example(s)")]
    ClassTooSmall { label: String, count: usize },
    #[error("folds must be at least 2")]
    TooFewFolds,
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
}

impl HypernymDataset {
    pub fn from_pairs<I, T, L>(pairs: I) -> HypernymDataset
    where
        I: IntoIterator<Item = (T, L)>,
        T: Into<String>,
        L: Into<String>,
    {
        let pairs: Vec<(String, String)> = pairs.into_iter().map(|(t, l)| (t.into(), l.into())).collect();
        let label_set: Vec<String> = pairs.iter().map(|(_, l)| l.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        let labels = pairs.iter().map(|(_, l)| label_set.binary_search(l).unwrap()).collect();
        HypernymDataset { terms: pairs.into_iter().map(|(t, _)| t).collect(), labels, label_set }
    }

    /// JSONL with one `{"term": ..., "label": ...}` object per line.
    pub fn read<R: BufRead>(reader: R, path: &Path) -> Result<HypernymDataset, EvalError> {
        let mut pairs = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| EvalError::Io { path: path.to_path_buf(), source })?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: DatasetLine = serde_json::from_str(&line).map_err(|e| EvalError::Malformed {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
            pairs.push((parsed.term, parsed.label));
        }
        Ok(HypernymDataset::from_pairs(pairs))
    }

    pub fn load(path: &Path) -> Result<HypernymDataset, EvalError> {
        let file = std::fs::File::open(path).map_err(|source| EvalError::Io { path: path.to_path_buf(), source })?;
        HypernymDataset::read(std::io::BufReader::new(file), path)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Mean of the vectors of the term's in-vocabulary tokens, or `None` when
/// no token is known.
pub fn embed_term(term: &str, model: &EmbeddingModel) -> Option<Vec<f64>> {
    let mut sum = vec![0.0; model.dim];
    let mut n = 0usize;
    for token in tokenize(term) {
        if let Some(v) = model.vector(&token) {
            sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
            n += 1;
        }
    }
    (n > 0).then(|| sum.into_iter().map(|s| s / n as f64).collect())
}

/// Feature matrix for a dataset; unknown terms get the zero vector and are
/// counted.
pub fn embed_dataset(dataset: &HypernymDataset, model: &EmbeddingModel) -> (Vec<Vec<f64>>, usize) {
    let mut oov = 0;
    let x = dataset
        .terms
        .iter()
        .map(|t| {
            embed_term(t, model).unwrap_or_else(|| {
                oov += 1;
                vec![0.0; model.dim]
            })
        })
        .collect();
    (x, oov)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub accuracy: f64,
    pub mean_rank: f64,
    pub test_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Unweighted mean over folds.
    pub accuracy: f64,
    pub mean_rank: f64,
    pub per_fold: Vec<FoldResult>,
    pub n_folds: usize,
    pub n_examples: usize,
    pub labels: Vec<String>,
    pub oov_terms: usize,
    pub seed: u64,
}

/// Stratified k-fold evaluation of precomputed features. When the smallest
/// class has fewer than `k` examples, `k` drops to that size.
pub fn cross_validate_features(
    x: &[Vec<f64>],
    dataset: &HypernymDataset,
    k: usize,
    seed: u64,
    config: &ClassifierConfig,
) -> Result<EvalReport, EvalError> {
    if dataset.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    if k < 2 {
        return Err(EvalError::TooFewFolds);
    }
    let mut counts = vec![0usize; dataset.label_set.len()];
    dataset.labels.iter().for_each(|&l| counts[l] += 1);
    let (smallest, &min_count) = counts.iter().enumerate().min_by_key(|(_, c)| **c).unwrap();
    if min_count < 2 {
        return Err(EvalError::ClassTooSmall { label: dataset.label_set[smallest].clone(), count: min_count });
    }
    let k = if min_count < k {
        warn!(requested = k, used = min_count, label = %dataset.label_set[smallest], "class smaller than fold count, reducing folds");
        min_count
    } else {
        k
    };
    let folds = stratified_folds(&dataset.labels, k, seed);
    let per_fold: Vec<FoldResult> = folds
        .par_iter()
        .map(|test| {
            let mut in_test = vec![false; x.len()];
            test.iter().for_each(|&i| in_test[i] = true);
            let (train_x, train_y): (Vec<Vec<f64>>, Vec<usize>) =
                (0..x.len()).filter(|&i| !in_test[i]).map(|i| (x[i].clone(), dataset.labels[i])).unzip();
            let clf = SoftmaxClassifier::train(&train_x, &train_y, &dataset.label_set, config)?;
            let ranks: Vec<usize> = test.iter().map(|&i| clf.rank_of_correct(&x[i], dataset.labels[i])).collect();
            let n = ranks.len() as f64;
            Ok(FoldResult {
                accuracy: ranks.iter().filter(|&&r| r == 1).count() as f64 / n,
                mean_rank: ranks.iter().sum::<usize>() as f64 / n,
                test_size: ranks.len(),
            })
        })
        .collect::<Result<_, ClassifierError>>()?;
    let nf = per_fold.len() as f64;
    Ok(EvalReport {
        accuracy: per_fold.iter().map(|f| f.accuracy).sum::<f64>() / nf,
        mean_rank: per_fold.iter().map(|f| f.mean_rank).sum::<f64>() / nf,
        n_folds: per_fold.len(),
        per_fold,
        n_examples: dataset.len(),
        labels: dataset.label_set.clone(),
        oov_terms: 0,
        seed,
    })
}

pub fn cross_validate(
    dataset: &HypernymDataset,
    model: &EmbeddingModel,
    k: usize,
    seed: u64,
    config: &ClassifierConfig,
) -> Result<EvalReport, EvalError> {
    let (x, oov) = embed_dataset(dataset, model);
    if oov > 0 {
        warn!(oov, total = dataset.len(), "terms without any in-vocabulary token use the zero vector");
    }
    let mut report = cross_validate_features(&x, dataset, k, seed, config)?;
    report.oov_terms = oov;
    Ok(report)
}

//! Skip-gram word vectors over the extracted corpus, cosine nearest
//! neighbors and the plain-text vector format.

mod io;
mod model;
mod noise;
pub mod sgns;
mod tokenize;
mod vocab;

pub use io::{export_vectors, import_vectors, read_vectors, write_vectors, VectorFileError};
pub use model::{cosine, EmbeddingModel, NotInVocabulary};
pub use noise::{NoiseSampler, NOISE_POWER};
pub use sgns::{initial_model, train, TrainConfig, TrainError, TrainReport};
pub use tokenize::tokenize;
pub use vocab::{Vocabulary, DEFAULT_MAX_SIZE, DEFAULT_MIN_COUNT};

/// Longest id sequence handed to the trainer as one unit.
pub const MAX_SENTENCE_LEN: usize = 1000;

/// Maps tokens to ids, dropping unknown ones, and cuts the result into
/// training sentences of at most [`MAX_SENTENCE_LEN`] ids.
pub fn to_sentences<S: AsRef<str>>(vocab: &Vocabulary, tokens: &[S], out: &mut Vec<Vec<u32>>) {
    let ids: Vec<u32> = tokens.iter().filter_map(|t| vocab.id(t.as_ref())).collect();
    out.extend(ids.chunks(MAX_SENTENCE_LEN).map(<[u32]>::to_vec));
}

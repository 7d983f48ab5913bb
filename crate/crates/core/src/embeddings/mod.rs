//! Word embeddings: vocabulary construction, skip-gram with negative
//! sampling, gender direction estimation and hard debiasing.

mod debias;
mod matrix;
mod sgns;
mod vocab;

pub use debias::{gender_direction, hard_debias, GenderDirection};
pub use matrix::EmbeddingMatrix;
pub use sgns::{train_sgns, SgnsConfig};
pub use vocab::{Vocabulary, PAD, PAD_INDEX, UNK, UNK_INDEX};

use crate::io::{parse_pairs, parse_words};

pub const DEFAULT_DEFINITIONAL_PAIRS: &str = include_str!("../../data/definitional_pairs.tsv");
pub const DEFAULT_GENDERED_WORDS: &str = include_str!("../../data/gendered_words.txt");

/// The shipped (female, male) definitional pairs.
pub fn default_definitional_pairs() -> Vec<(String, String)> {
    parse_pairs(DEFAULT_DEFINITIONAL_PAIRS)
}

/// Words exempt from neutralization by default.
pub fn default_gendered_words() -> Vec<String> {
    parse_words(DEFAULT_GENDERED_WORDS)
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoder {
    Cnn,
    Pcnn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selector {
    /// Selective attention with a bilinear relation query.
    Att,
    /// Unweighted mean of the sentence vectors.
    Ave,
}

impl std::str::FromStr for Encoder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cnn" => Ok(Encoder::Cnn),
            "pcnn" => Ok(Encoder::Pcnn),
            other => Err(Error::config(format!("unknown encoder `{other}`"))),
        }
    }
}

impl std::str::FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "att" => Ok(Selector::Att),
            "ave" => Ok(Selector::Ave),
            other => Err(Error::config(format!("unknown selector `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub encoder: Encoder,
    pub selector: Selector,
    pub word_dim: usize,
    pub pos_dim: usize,
    pub max_len: usize,
    pub max_rel_pos: usize,
    pub n_filters: usize,
    pub conv_window: usize,
    pub dropout_p: f64,
    pub lr: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub seed: u64,
    /// Treat every instance as its own bag.
    pub per_sentence: bool,
    pub freeze_embeddings: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            encoder: Encoder::Pcnn,
            selector: Selector::Att,
            word_dim: 50,
            pos_dim: 5,
            max_len: 120,
            max_rel_pos: 100,
            n_filters: 230,
            conv_window: 3,
            dropout_p: 0.5,
            lr: 0.5,
            batch_size: 160,
            max_epochs: 60,
            patience: 10,
            seed: 0,
            per_sentence: false,
            freeze_embeddings: false,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.conv_window == 0 || self.conv_window % 2 == 0 {
            return Err(Error::config("convolution window must be odd and at least 1"));
        }
        if self.max_len < self.conv_window {
            return Err(Error::config("max_len must be at least the convolution window"));
        }
        if !(0.0..1.0).contains(&self.dropout_p) {
            return Err(Error::config("dropout must lie in [0, 1)"));
        }
        if self.word_dim == 0 || self.n_filters == 0 || self.batch_size == 0 {
            return Err(Error::config("word_dim, n_filters and batch_size must be positive"));
        }
        if !(self.lr > 0.0) {
            return Err(Error::config("learning rate must be positive"));
        }
        Ok(())
    }

    /// Width of one token's input vector.
    pub fn token_dim(&self) -> usize {
        self.word_dim + 2 * self.pos_dim
    }

    pub fn segments(&self) -> usize {
        match self.encoder {
            Encoder::Cnn => 1,
            Encoder::Pcnn => 3,
        }
    }

    /// Width of a sentence (and bag) vector.
    pub fn sentence_dim(&self) -> usize {
        self.segments() * self.n_filters
    }

    pub fn position_rows(&self) -> usize {
        2 * self.max_rel_pos + 1
    }
}

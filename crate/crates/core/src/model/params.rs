use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::ModelConfig;
use crate::embeddings::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::types::Relation;

/// Row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    fn uniform(rows: usize, cols: usize, bound: f64, rng: &mut ChaCha8Rng) -> Self {
        let data = (0..rows * cols).map(|_| rng.gen_range(-bound..=bound)).collect();
        Tensor { rows, cols, data }
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn fill(&mut self, v: f64) {
        self.data.iter_mut().for_each(|x| *x = v);
    }
}

/// All trainable tensors. The same struct doubles as a gradient buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameters {
    pub word: Tensor,
    pub pos_head: Tensor,
    pub pos_tail: Tensor,
    /// `n_filters × (window · token_dim)`; each row is one filter over a
    /// flattened window of token vectors.
    pub conv_w: Tensor,
    pub conv_b: Tensor,
    /// Bilinear attention matrix, `sentence_dim × sentence_dim`.
    pub att: Tensor,
    /// Relation query vectors, one row per relation.
    pub query: Tensor,
    pub cls_w: Tensor,
    pub cls_b: Tensor,
}

pub const GROUP_NAMES: [&str; 9] = [
    "word", "pos_head", "pos_tail", "conv_w", "conv_b", "att", "query", "cls_w", "cls_b",
];

fn xavier(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

impl Parameters {
    /// Zero tensors with the shapes implied by `config` and `vocab_len`.
    pub fn zeros(config: &ModelConfig, vocab_len: usize) -> Self {
        let d = config.sentence_dim();
        Parameters {
            word: Tensor::zeros(vocab_len, config.word_dim),
            pos_head: Tensor::zeros(config.position_rows(), config.pos_dim),
            pos_tail: Tensor::zeros(config.position_rows(), config.pos_dim),
            conv_w: Tensor::zeros(config.n_filters, config.conv_window * config.token_dim()),
            conv_b: Tensor::zeros(1, config.n_filters),
            att: Tensor::zeros(d, d),
            query: Tensor::zeros(Relation::COUNT, d),
            cls_w: Tensor::zeros(Relation::COUNT, d),
            cls_b: Tensor::zeros(1, Relation::COUNT),
        }
    }

    /// Word table copied from `embeddings`; everything else Xavier-uniform,
    /// except the attention matrix (identity) and the biases (zero).
    pub fn init(config: &ModelConfig, embeddings: &EmbeddingMatrix, rng: &mut ChaCha8Rng) -> Result<Self> {
        if embeddings.dim() != config.word_dim {
            return Err(Error::config(format!(
                "embeddings have dimension {}, model expects word_dim {}",
                embeddings.dim(),
                config.word_dim
            )));
        }
        let d = config.sentence_dim();
        let rows = config.position_rows();
        let fan_in = config.conv_window * config.token_dim();
        let mut att = Tensor::zeros(d, d);
        for i in 0..d {
            att.data[i * d + i] = 1.0;
        }
        Ok(Parameters {
            word: Tensor {
                rows: embeddings.rows(),
                cols: embeddings.dim(),
                data: embeddings.data().to_vec(),
            },
            pos_head: Tensor::uniform(rows, config.pos_dim, xavier(rows, config.pos_dim), rng),
            pos_tail: Tensor::uniform(rows, config.pos_dim, xavier(rows, config.pos_dim), rng),
            conv_w: Tensor::uniform(config.n_filters, fan_in, xavier(fan_in, config.n_filters), rng),
            conv_b: Tensor::zeros(1, config.n_filters),
            att,
            query: Tensor::uniform(Relation::COUNT, d, xavier(Relation::COUNT, d), rng),
            cls_w: Tensor::uniform(Relation::COUNT, d, xavier(d, Relation::COUNT), rng),
            cls_b: Tensor::zeros(1, Relation::COUNT),
        })
    }

    pub fn groups(&self) -> [(&'static str, &Tensor); 9] {
        [
            (GROUP_NAMES[0], &self.word),
            (GROUP_NAMES[1], &self.pos_head),
            (GROUP_NAMES[2], &self.pos_tail),
            (GROUP_NAMES[3], &self.conv_w),
            (GROUP_NAMES[4], &self.conv_b),
            (GROUP_NAMES[5], &self.att),
            (GROUP_NAMES[6], &self.query),
            (GROUP_NAMES[7], &self.cls_w),
            (GROUP_NAMES[8], &self.cls_b),
        ]
    }

    pub fn groups_mut(&mut self) -> [(&'static str, &mut Tensor); 9] {
        [
            (GROUP_NAMES[0], &mut self.word),
            (GROUP_NAMES[1], &mut self.pos_head),
            (GROUP_NAMES[2], &mut self.pos_tail),
            (GROUP_NAMES[3], &mut self.conv_w),
            (GROUP_NAMES[4], &mut self.conv_b),
            (GROUP_NAMES[5], &mut self.att),
            (GROUP_NAMES[6], &mut self.query),
            (GROUP_NAMES[7], &mut self.cls_w),
            (GROUP_NAMES[8], &mut self.cls_b),
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.groups().iter().all(|(_, t)| t.data.iter().all(|x| x.is_finite()))
    }

    /// Checks every tensor shape against `config`.
    pub fn check_shapes(&self, config: &ModelConfig) -> Result<()> {
        let expected = Parameters::zeros(config, self.word.rows);
        for ((name, got), (_, want)) in self.groups().iter().zip(expected.groups().iter()) {
            if (got.rows, got.cols) != (want.rows, want.cols) || got.data.len() != got.rows * got.cols {
                return Err(Error::data(format!(
                    "parameter `{name}` has shape {}x{}, expected {}x{}",
                    got.rows, got.cols, want.rows, want.cols
                )));
            }
        }
        if self.word.cols != config.word_dim {
            return Err(Error::data("word table width does not match word_dim"));
        }
        Ok(())
    }
}

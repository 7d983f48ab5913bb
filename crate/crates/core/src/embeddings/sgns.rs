use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EmbeddingMatrix, Vocabulary, PAD_INDEX, UNK_INDEX};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgnsConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    /// Frequent-word subsampling threshold; 0 disables subsampling.
    pub subsample_t: f64,
    pub seed: u64,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            dim: 50,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            subsample_t: 1e-4,
            seed: 0,
        }
    }
}

impl SgnsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::config("embedding dim must be positive"));
        }
        if self.window == 0 {
            return Err(Error::config("embedding window must be positive"));
        }
        if self.negatives == 0 {
            return Err(Error::config("negative sample count must be positive"));
        }
        if !(self.initial_lr > 0.0) {
            return Err(Error::config("embedding learning rate must be positive"));
        }
        if self.subsample_t < 0.0 {
            return Err(Error::config("subsample threshold must be non-negative"));
        }
        Ok(())
    }
}

/// Cumulative unigram^0.75 distribution over regular vocabulary words.
struct NegativeTable {
    cumulative: Vec<f64>,
}

impl NegativeTable {
    fn new(vocab: &Vocabulary) -> Self {
        let mut acc = 0.0;
        let cumulative = (0..vocab.len())
            .map(|i| {
                if i != UNK_INDEX && i != PAD_INDEX {
                    acc += (vocab.count(i) as f64).powf(0.75);
                }
                acc
            })
            .collect();
        NegativeTable { cumulative }
    }

    fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        let x = rng.gen::<f64>() * self.total();
        self.cumulative
            .partition_point(|&c| c <= x)
            .min(self.cumulative.len() - 1)
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Skip-gram with negative sampling. Returns the center ("input") vectors.
///
/// For every (center, context) pair inside a randomly shrunk window one SGD
/// step is taken on `-log σ(u_ctx·v_ctr) - Σ_k log σ(-u_k·v_ctr)` with the
/// negatives `k` drawn from the unigram^0.75 distribution. The learning rate
/// decays linearly over the total number of words to process. Training runs
/// on a single thread and is bit-reproducible for a fixed seed.
pub fn train_sgns<'a>(
    sentences: impl IntoIterator<Item = &'a [String]>,
    vocab: &Vocabulary,
    config: &SgnsConfig,
) -> Result<EmbeddingMatrix> {
    config.validate()?;
    let dim = config.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut input: Vec<f64> = (0..vocab.len() * dim)
        .map(|_| (rng.gen::<f64>() - 0.5) / dim as f64)
        .collect();
    let mut output = vec![0.0; vocab.len() * dim];

    let corpus: Vec<Vec<usize>> = sentences
        .into_iter()
        .map(|s| {
            s.iter()
                .map(|t| vocab.lookup(t))
                .filter(|&i| i != UNK_INDEX && i != PAD_INDEX)
                .collect()
        })
        .collect();
    let words_per_epoch: usize = corpus.iter().map(Vec::len).sum();
    let table = NegativeTable::new(vocab);
    if config.epochs == 0 || words_per_epoch == 0 || table.total() == 0.0 {
        return EmbeddingMatrix::new(vocab.clone(), dim, input);
    }

    let total_count: f64 = (0..vocab.len()).map(|i| vocab.count(i) as f64).sum();
    let keep_prob = |w: usize| -> f64 {
        if config.subsample_t <= 0.0 {
            return 1.0;
        }
        let f = vocab.count(w) as f64;
        let t = config.subsample_t * total_count;
        ((f / t).sqrt() + 1.0) * t / f
    };

    let planned = (config.epochs * words_per_epoch) as f64;
    let mut processed = 0usize;
    let mut grad = vec![0.0; dim];
    let mut kept = Vec::new();
    for _ in 0..config.epochs {
        for sentence in &corpus {
            processed += sentence.len();
            let lr = config.initial_lr * (1.0 - processed as f64 / (planned + 1.0)).max(1e-4);
            kept.clear();
            kept.extend(
                sentence
                    .iter()
                    .copied()
                    .filter(|&w| keep_prob(w) >= rng.gen::<f64>()),
            );
            for pos in 0..kept.len() {
                let center = kept[pos];
                let reach = config.window - rng.gen_range(0..config.window);
                let lo = pos.saturating_sub(reach);
                let hi = (pos + reach).min(kept.len() - 1);
                for ctx_pos in lo..=hi {
                    if ctx_pos == pos {
                        continue;
                    }
                    let context = kept[ctx_pos];
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    let v = center * dim..(center + 1) * dim;
                    for d in 0..=config.negatives {
                        let (target, label) = if d == 0 {
                            (context, 1.0)
                        } else {
                            let t = table.sample(&mut rng);
                            if t == context {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let u = target * dim..(target + 1) * dim;
                        let score: f64 = input[v.clone()]
                            .iter()
                            .zip(&output[u.clone()])
                            .map(|(a, b)| a * b)
                            .sum();
                        let g = (label - sigmoid(score)) * lr;
                        for ((acc, out), inp) in grad
                            .iter_mut()
                            .zip(&mut output[u])
                            .zip(&input[v.clone()])
                        {
                            *acc += g * *out;
                            *out += g * inp;
                        }
                    }
                    for (x, g) in input[v].iter_mut().zip(&grad) {
                        *x += g;
                    }
                }
            }
        }
    }
    EmbeddingMatrix::new(vocab.clone(), dim, input)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_corpus() -> Vec<Vec<String>> {
        (0..50)
            .map(|i| {
                ["the", "cat", "sat", "on", "a", "mat"]
                    .iter()
                    .cycle()
                    .skip(i % 6)
                    .take(6)
                    .map(|s| s.to_string())
                    .collect()
            })
            .collect()
    }

    fn vocab_of(c: &[Vec<String>]) -> Vocabulary {
        Vocabulary::build(c.iter().map(|s| s.as_slice()), 1).unwrap()
    }

    #[test]
    fn zero_epochs_returns_seeded_init() {
        let c = tiny_corpus();
        let v = vocab_of(&c);
        let cfg = SgnsConfig { dim: 8, epochs: 0, ..Default::default() };
        let a = train_sgns(c.iter().map(|s| s.as_slice()), &v, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let expect: Vec<f64> = (0..v.len() * 8).map(|_| (rng.gen::<f64>() - 0.5) / 8.0).collect();
        assert_eq!(a.data(), expect.as_slice());
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let c = tiny_corpus();
        let v = vocab_of(&c);
        let cfg = SgnsConfig { dim: 8, epochs: 2, subsample_t: 0.0, ..Default::default() };
        let a = train_sgns(c.iter().map(|s| s.as_slice()), &v, &cfg).unwrap();
        let b = train_sgns(c.iter().map(|s| s.as_slice()), &v, &cfg).unwrap();
        assert_eq!(a, b);
        let other = SgnsConfig { seed: 1, ..cfg };
        let d = train_sgns(c.iter().map(|s| s.as_slice()), &v, &other).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let c = tiny_corpus();
        let v = vocab_of(&c);
        for cfg in [
            SgnsConfig { dim: 0, ..Default::default() },
            SgnsConfig { window: 0, ..Default::default() },
            SgnsConfig { negatives: 0, ..Default::default() },
        ] {
            let err = train_sgns(c.iter().map(|s| s.as_slice()), &v, &cfg).unwrap_err();
            assert_eq!(err.exit_code(), 1);
        }
    }

    #[test]
    fn negative_table_never_samples_specials() {
        let c = tiny_corpus();
        let v = vocab_of(&c);
        let table = NegativeTable::new(&v);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let s = table.sample(&mut rng);
            assert!(s >= 2 && s < v.len());
        }
    }
}

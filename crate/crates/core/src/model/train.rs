use log::info;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::network::{accumulate_bag, attention_keys, infer, Gradients};
use super::{build_bags, Bag, ModelConfig, Parameters};
use crate::embeddings::{EmbeddingMatrix, Vocabulary};
use crate::error::{Error, Result};
use crate::metrics::{macro_f1_of, PredictionRecord};
use crate::types::{Instance, Relation};

/// A trained model: configuration, vocabulary and parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub config: ModelConfig,
    pub vocab: Vocabulary,
    pub params: Parameters,
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    /// Mean training loss per epoch.
    pub epoch_losses: Vec<f64>,
    /// Dev macro F1 after each epoch (empty without a dev split).
    pub dev_f1: Vec<f64>,
    /// 1-based epoch whose parameters were kept.
    pub best_epoch: usize,
}

/// Patience-based early stopping on a score that should increase.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    best: f64,
    since_best: usize,
    evaluations: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        EarlyStopping {
            patience,
            best: f64::NEG_INFINITY,
            since_best: 0,
            evaluations: 0,
        }
    }

    /// Records one evaluation; returns `true` when it is a new best.
    pub fn observe(&mut self, score: f64) -> bool {
        self.evaluations += 1;
        if score > self.best {
            self.best = score;
            self.since_best = 0;
            true
        } else {
            self.since_best += 1;
            false
        }
    }

    pub fn should_stop(&self) -> bool {
        self.patience > 0 && self.since_best >= self.patience
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn best(&self) -> f64 {
        self.best
    }
}

fn sgd_step(params: &mut Parameters, acc: &Gradients, lr: f64, freeze_embeddings: bool) {
    if !freeze_embeddings {
        for &r in &acc.touched {
            let g = acc.grads.word.row(r);
            params.word.row_mut(r).iter_mut().zip(g).for_each(|(p, g)| *p -= lr * g);
        }
    }
    let grads = acc.grads.groups();
    for ((name, p), (_, g)) in params.groups_mut().into_iter().zip(grads.iter()) {
        if name == "word" {
            continue;
        }
        p.data.iter_mut().zip(&g.data).for_each(|(p, g)| *p -= lr * g);
    }
}

fn predict_bags(bags: &[Bag], params: &Parameters, config: &ModelConfig) -> Vec<PredictionRecord> {
    let keys = attention_keys(params);
    bags.par_iter()
        .map(|bag| {
            let probs = infer(bag, params, config, &keys);
            let mut best = 0;
            for (i, p) in probs.iter().enumerate() {
                if *p > probs[best] {
                    best = i;
                }
            }
            PredictionRecord {
                id: bag.id.clone(),
                gender: bag.gender,
                gold: bag.relation,
                predicted: Relation::from_index(best).unwrap(),
            }
        })
        .collect()
}

/// Mini-batch SGD on bag cross-entropy with inverted dropout on the bag
/// vector. After every epoch the dev macro F1 is measured; training stops
/// after `max_epochs` or once `patience` epochs pass without improvement,
/// and the best-dev parameters are returned.
pub fn train_model(
    train: &[Instance],
    dev: &[Instance],
    embeddings: &EmbeddingMatrix,
    config: &ModelConfig,
) -> Result<(Model, TrainReport)> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::data("training split is empty"));
    }
    let vocab = embeddings.vocab().clone();
    let train_bags = build_bags(train, &vocab, config)?;
    let dev_bags = build_bags(dev, &vocab, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = Parameters::init(config, embeddings, &mut rng)?;
    let mut best = params.clone();
    let mut acc = Gradients::new(config, vocab.len());
    let mut stopper = EarlyStopping::new(config.patience);
    let mut report = TrainReport {
        epoch_losses: Vec::new(),
        dev_f1: Vec::new(),
        best_epoch: 0,
    };
    let d = config.sentence_dim();
    let keep = 1.0 - config.dropout_p;
    let mut order: Vec<usize> = (0..train_bags.len()).collect();
    let mut mask = vec![1.0; d];

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(config.batch_size) {
            acc.reset();
            let keys = attention_keys(&params);
            let scale = 1.0 / batch.len() as f64;
            for &b in batch {
                let m = if config.dropout_p > 0.0 {
                    for v in mask.iter_mut() {
                        *v = if rng.gen::<f64>() < keep { 1.0 / keep } else { 0.0 };
                    }
                    Some(mask.as_slice())
                } else {
                    None
                };
                total += accumulate_bag(&train_bags[b], &params, config, &keys, m, scale, &mut acc);
            }
            acc.finish(&params);
            sgd_step(&mut params, &acc, config.lr, config.freeze_embeddings);
        }
        if !params.is_finite() {
            return Err(Error::data(format!(
                "training diverged at epoch {epoch}; lower the learning rate"
            )));
        }
        let loss = total / train_bags.len() as f64;
        report.epoch_losses.push(loss);

        if dev_bags.is_empty() {
            best = params.clone();
            report.best_epoch = epoch;
            info!("epoch {epoch}: loss {loss:.5}");
            continue;
        }
        let f1 = macro_f1_of(&predict_bags(&dev_bags, &params, config));
        report.dev_f1.push(f1);
        info!("epoch {epoch}: loss {loss:.5} dev macro F1 {f1:.4}");
        if stopper.observe(f1) {
            best = params.clone();
            report.best_epoch = epoch;
        }
        if stopper.should_stop() {
            break;
        }
    }
    Ok((
        Model {
            config: config.clone(),
            vocab,
            params: best,
        },
        report,
    ))
}

/// One prediction record per bag, argmax with ties to the lowest class index.
pub fn predict(model: &Model, instances: &[Instance]) -> Result<Vec<PredictionRecord>> {
    let bags = build_bags(instances, &model.vocab, &model.config)?;
    Ok(predict_bags(&bags, &model.params, &model.config))
}

use super::{Bag, Encoder, Features, ModelConfig, Parameters, Selector};
use crate::error::{Error, Result};
use crate::types::Relation;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / sum).collect()
}

/// Encoded sentence plus what the backward pass needs.
#[derive(Debug, Clone)]
pub struct SentenceEncoding {
    /// `tanh` of the pooled convolution features.
    pub vector: Vec<f64>,
    /// Token vectors with `window / 2` zero rows on either side.
    padded: Vec<f64>,
    /// Winning position per pooled feature; `None` for an empty segment.
    argmax: Vec<Option<usize>>,
}

fn segments(features: &Features, encoder: Encoder) -> Vec<(usize, usize)> {
    // Inclusive ranges; `start > end` marks an empty segment.
    let last = features.len - 1;
    match encoder {
        Encoder::Cnn => vec![(0, last)],
        Encoder::Pcnn => vec![
            (0, features.p1),
            (features.p1 + 1, features.p2),
            (features.p2 + 1, last),
        ],
    }
}

/// Convolution over the real tokens followed by (piecewise) max pooling
/// and `tanh`.
pub fn encode(features: &Features, params: &Parameters, config: &ModelConfig) -> SentenceEncoding {
    let td = config.token_dim();
    let (wd, pd) = (config.word_dim, config.pos_dim);
    let w = config.conv_window;
    let half = w / 2;
    let len = features.len;
    let offset = config.max_rel_pos as i64;

    let mut padded = vec![0.0; (len + w - 1) * td];
    for i in 0..len {
        let row = &mut padded[(half + i) * td..(half + i + 1) * td];
        row[..wd].copy_from_slice(params.word.row(features.token_ids[i]));
        row[wd..wd + pd].copy_from_slice(params.pos_head.row((features.pos_head[i] + offset) as usize));
        row[wd + pd..].copy_from_slice(params.pos_tail.row((features.pos_tail[i] + offset) as usize));
    }

    let nf = config.n_filters;
    let mut conv = vec![0.0; len * nf];
    for t in 0..len {
        let window = &padded[t * td..(t + w) * td];
        for f in 0..nf {
            conv[t * nf + f] = params.conv_b.data[f] + dot(params.conv_w.row(f), window);
        }
    }

    let segs = segments(features, config.encoder);
    let mut vector = vec![0.0; segs.len() * nf];
    let mut argmax = vec![None; segs.len() * nf];
    for (s, &(start, end)) in segs.iter().enumerate() {
        if start > end {
            continue;
        }
        for f in 0..nf {
            let mut best = start;
            for t in start + 1..=end {
                if conv[t * nf + f] > conv[best * nf + f] {
                    best = t;
                }
            }
            vector[s * nf + f] = conv[best * nf + f].tanh();
            argmax[s * nf + f] = Some(best);
        }
    }
    SentenceEncoding {
        vector,
        padded,
        argmax,
    }
}

/// `u_r = A q_r` for every relation.
pub(crate) fn attention_keys(params: &Parameters) -> Vec<Vec<f64>> {
    (0..Relation::COUNT)
        .map(|r| {
            let q = params.query.row(r);
            (0..params.att.rows).map(|a| dot(params.att.row(a), q)).collect()
        })
        .collect()
}

/// Bag vector and sentence weights for a precomputed attention key.
fn select(sentences: &[&[f64]], selector: Selector, key: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = sentences.len();
    let weights = match selector {
        Selector::Ave => vec![1.0 / m as f64; m],
        Selector::Att => softmax(&sentences.iter().map(|x| dot(x, key)).collect::<Vec<_>>()),
    };
    let mut out = vec![0.0; sentences[0].len()];
    for (x, a) in sentences.iter().zip(&weights) {
        axpy(*a, x, &mut out);
    }
    (out, weights)
}

/// Combines sentence vectors into one bag vector. For `Att` the weights are
/// `softmax_i(x_iᵀ A q_r)` for the query of `relation`; `Ave` ignores it.
/// Returns the bag vector and the sentence weights.
pub fn bag_representation(
    sentences: &[Vec<f64>],
    selector: Selector,
    relation: Relation,
    params: &Parameters,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if sentences.is_empty() {
        return Err(Error::data("cannot represent an empty bag"));
    }
    let q = params.query.row(relation.index());
    let key: Vec<f64> = (0..params.att.rows).map(|a| dot(params.att.row(a), q)).collect();
    let refs: Vec<&[f64]> = sentences.iter().map(Vec::as_slice).collect();
    Ok(select(&refs, selector, &key))
}

pub(crate) fn infer(bag: &Bag, params: &Parameters, config: &ModelConfig, keys: &[Vec<f64>]) -> Vec<f64> {
    let encs: Vec<SentenceEncoding> = bag.sentences.iter().map(|f| encode(f, params, config)).collect();
    let refs: Vec<&[f64]> = encs.iter().map(|e| e.vector.as_slice()).collect();
    let logits: Vec<f64> = match config.selector {
        Selector::Ave => {
            let (s, _) = select(&refs, Selector::Ave, &[]);
            (0..Relation::COUNT)
                .map(|r| dot(params.cls_w.row(r), &s) + params.cls_b.data[r])
                .collect()
        }
        // Each relation is scored on the representation built with its own query.
        Selector::Att => (0..Relation::COUNT)
            .map(|r| {
                let (s, _) = select(&refs, Selector::Att, &keys[r]);
                dot(params.cls_w.row(r), &s) + params.cls_b.data[r]
            })
            .collect(),
    };
    softmax(&logits)
}

/// Class probabilities for a bag at inference time (no dropout).
pub fn forward(bag: &Bag, params: &Parameters, config: &ModelConfig) -> Vec<f64> {
    infer(bag, params, config, &attention_keys(params))
}

/// Gradient accumulator for a mini-batch. Attention-matrix and query
/// gradients are collected per relation and expanded once per batch.
pub(crate) struct Gradients {
    pub grads: Parameters,
    key_grads: Vec<Vec<f64>>,
    touched_flag: Vec<bool>,
    pub touched: Vec<usize>,
}

impl Gradients {
    pub fn new(config: &ModelConfig, vocab_len: usize) -> Self {
        Gradients {
            grads: Parameters::zeros(config, vocab_len),
            key_grads: vec![vec![0.0; config.sentence_dim()]; Relation::COUNT],
            touched_flag: vec![false; vocab_len],
            touched: Vec::new(),
        }
    }

    /// Zeroes everything, visiting only the touched rows of the word table.
    pub fn reset(&mut self) {
        for &r in &self.touched {
            self.grads.word.row_mut(r).fill(0.0);
            self.touched_flag[r] = false;
        }
        self.touched.clear();
        for (name, t) in self.grads.groups_mut() {
            if name != "word" {
                t.fill(0.0);
            }
        }
        self.key_grads.iter_mut().for_each(|k| k.fill(0.0));
    }

    /// Expands the per-relation key gradients into `att` and `query`.
    pub fn finish(&mut self, params: &Parameters) {
        let d = params.att.rows;
        for (r, du) in self.key_grads.iter().enumerate() {
            if du.iter().all(|v| *v == 0.0) {
                continue;
            }
            let q = params.query.row(r);
            for a in 0..d {
                if du[a] != 0.0 {
                    axpy(du[a], q, self.grads.att.row_mut(a));
                }
            }
            let dq = self.grads.query.row_mut(r);
            for a in 0..d {
                if du[a] != 0.0 {
                    axpy(du[a], params.att.row(a), dq);
                }
            }
        }
        self.key_grads.iter_mut().for_each(|k| k.fill(0.0));
    }

    fn touch(&mut self, row: usize) {
        if !self.touched_flag[row] {
            self.touched_flag[row] = true;
            self.touched.push(row);
        }
    }
}

fn backward_sentence(
    enc: &SentenceEncoding,
    features: &Features,
    dvector: &[f64],
    params: &Parameters,
    config: &ModelConfig,
    acc: &mut Gradients,
) {
    let td = config.token_dim();
    let (wd, pd) = (config.word_dim, config.pos_dim);
    let w = config.conv_window;
    let nf = config.n_filters;
    let mut dpadded = vec![0.0; enc.padded.len()];
    for (k, pos) in enc.argmax.iter().enumerate() {
        let Some(t) = *pos else { continue };
        let v = enc.vector[k];
        let g = dvector[k] * (1.0 - v * v);
        if g == 0.0 {
            continue;
        }
        let f = k % nf;
        acc.grads.conv_b.data[f] += g;
        let span = t * td..(t + w) * td;
        axpy(g, &enc.padded[span.clone()], acc.grads.conv_w.row_mut(f));
        axpy(g, params.conv_w.row(f), &mut dpadded[span]);
    }
    let half = w / 2;
    let offset = config.max_rel_pos as i64;
    for i in 0..features.len {
        let row = &dpadded[(half + i) * td..(half + i + 1) * td];
        let tok = features.token_ids[i];
        acc.touch(tok);
        axpy(1.0, &row[..wd], acc.grads.word.row_mut(tok));
        let ph = (features.pos_head[i] + offset) as usize;
        axpy(1.0, &row[wd..wd + pd], acc.grads.pos_head.row_mut(ph));
        let pt = (features.pos_tail[i] + offset) as usize;
        axpy(1.0, &row[wd + pd..], acc.grads.pos_tail.row_mut(pt));
    }
}

/// Training-mode loss for one bag, `-log p(gold)`, with the bag vector
/// built from the gold relation's query. Gradients scaled by `scale` are
/// added to `acc`. `mask` is the inverted-dropout mask on the bag vector.
pub(crate) fn accumulate_bag(
    bag: &Bag,
    params: &Parameters,
    config: &ModelConfig,
    keys: &[Vec<f64>],
    mask: Option<&[f64]>,
    scale: f64,
    acc: &mut Gradients,
) -> f64 {
    let y = bag.relation.index();
    let encs: Vec<SentenceEncoding> = bag.sentences.iter().map(|f| encode(f, params, config)).collect();
    let refs: Vec<&[f64]> = encs.iter().map(|e| e.vector.as_slice()).collect();
    let (s, alpha) = select(&refs, config.selector, &keys[y]);
    let dropped: Vec<f64> = match mask {
        Some(m) => s.iter().zip(m).map(|(a, b)| a * b).collect(),
        None => s.clone(),
    };
    let logits: Vec<f64> = (0..Relation::COUNT)
        .map(|r| dot(params.cls_w.row(r), &dropped) + params.cls_b.data[r])
        .collect();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
    let loss = lse - logits[y];

    let probs = softmax(&logits);
    let mut ddropped = vec![0.0; s.len()];
    for (r, p) in probs.iter().enumerate() {
        let dz = (p - if r == y { 1.0 } else { 0.0 }) * scale;
        acc.grads.cls_b.data[r] += dz;
        axpy(dz, &dropped, acc.grads.cls_w.row_mut(r));
        axpy(dz, params.cls_w.row(r), &mut ddropped);
    }
    let ds: Vec<f64> = match mask {
        Some(m) => ddropped.iter().zip(m).map(|(a, b)| a * b).collect(),
        None => ddropped,
    };

    let mut dxs: Vec<Vec<f64>> = alpha.iter().map(|a| ds.iter().map(|g| a * g).collect()).collect();
    if config.selector == Selector::Att {
        let dalpha: Vec<f64> = refs.iter().map(|x| dot(x, &ds)).collect();
        let mean: f64 = alpha.iter().zip(&dalpha).map(|(a, d)| a * d).sum();
        let key = &keys[y];
        for (i, x) in refs.iter().enumerate() {
            let de = alpha[i] * (dalpha[i] - mean);
            axpy(de, key, &mut dxs[i]);
            axpy(de, x, &mut acc.key_grads[y]);
        }
    }
    for ((enc, feat), dx) in encs.iter().zip(&bag.sentences).zip(&dxs) {
        backward_sentence(enc, feat, dx, params, config, acc);
    }
    loss
}

/// Loss and full gradient for a single bag without dropout.
pub fn loss_and_gradient(bag: &Bag, params: &Parameters, config: &ModelConfig) -> (f64, Parameters) {
    let keys = attention_keys(params);
    let mut acc = Gradients::new(config, params.word.rows);
    let loss = accumulate_bag(bag, params, config, &keys, None, 1.0, &mut acc);
    acc.finish(params);
    (loss, acc.grads)
}

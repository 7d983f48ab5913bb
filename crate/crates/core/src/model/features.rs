use std::collections::BTreeMap;

use super::ModelConfig;
use crate::embeddings::{Vocabulary, PAD_INDEX};
use crate::error::{Error, Result};
use crate::types::{Gender, Instance, Relation};

/// Model input for one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct Features {
    /// Vocabulary ids, padded with `<pad>` to `max_len`.
    pub token_ids: Vec<usize>,
    /// Offsets `i - head_anchor`, clipped to `±max_rel_pos`.
    pub pos_head: Vec<i64>,
    pub pos_tail: Vec<i64>,
    /// Sorted anchors, clipped into the truncated sentence.
    pub p1: usize,
    pub p2: usize,
    /// Number of real (non-pad) tokens.
    pub len: usize,
}

pub fn featurize(instance: &Instance, vocab: &Vocabulary, config: &ModelConfig) -> Result<Features> {
    if instance.tokens.is_empty() {
        return Err(Error::data(format!(
            "instance `{}` has no tokens",
            instance.instance_id
        )));
    }
    let len = instance.tokens.len().min(config.max_len);
    let mut token_ids = vec![PAD_INDEX; config.max_len];
    for (slot, tok) in token_ids.iter_mut().zip(&instance.tokens) {
        *slot = vocab.lookup(tok);
    }
    let clip = config.max_rel_pos as i64;
    let rel = |anchor: usize| -> Vec<i64> {
        (0..config.max_len)
            .map(|i| (i as i64 - anchor as i64).clamp(-clip, clip))
            .collect()
    };
    let (a, b) = (instance.head_anchor.min(len - 1), instance.tail_anchor.min(len - 1));
    Ok(Features {
        token_ids,
        pos_head: rel(instance.head_anchor),
        pos_tail: rel(instance.tail_anchor),
        p1: a.min(b),
        p2: a.max(b),
        len,
    })
}

/// All sentences sharing a (head, tail) pair, the unit of prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct Bag {
    pub id: String,
    pub head_id: String,
    pub tail_surface: String,
    pub gender: Gender,
    pub relation: Relation,
    pub sentences: Vec<Features>,
}

/// The bag label is its most frequent positive relation (ties to the lowest
/// class index), or NA when no instance carries a positive label.
fn bag_label(labels: impl Iterator<Item = Relation>) -> Relation {
    let mut counts = [0usize; Relation::COUNT];
    for r in labels {
        counts[r.index()] += 1;
    }
    Relation::POSITIVE
        .iter()
        .copied()
        .filter(|r| counts[r.index()] > 0)
        .max_by(|a, b| counts[a.index()].cmp(&counts[b.index()]).then(b.cmp(a)))
        .unwrap_or(Relation::Na)
}

/// Groups instances into bags keyed by (head, tail, gender), in key order.
/// With `per_sentence` every instance becomes a singleton bag.
pub fn build_bags(instances: &[Instance], vocab: &Vocabulary, config: &ModelConfig) -> Result<Vec<Bag>> {
    if config.per_sentence {
        return instances
            .iter()
            .map(|inst| {
                Ok(Bag {
                    id: inst.instance_id.clone(),
                    head_id: inst.head_id.clone(),
                    tail_surface: inst.tail_surface.clone(),
                    gender: inst.gender,
                    relation: inst.relation,
                    sentences: vec![featurize(inst, vocab, config)?],
                })
            })
            .collect();
    }
    let mut groups: BTreeMap<(&str, &str, Gender), Vec<&Instance>> = BTreeMap::new();
    for inst in instances {
        groups
            .entry((inst.head_id.as_str(), inst.tail_surface.as_str(), inst.gender))
            .or_default()
            .push(inst);
    }
    groups
        .into_iter()
        .map(|((head, tail, gender), members)| {
            let id = if members.iter().all(|m| m.instance_id.ends_with("_aug")) {
                format!("{head}|{tail}|aug")
            } else {
                format!("{head}|{tail}")
            };
            Ok(Bag {
                id,
                head_id: head.to_string(),
                tail_surface: tail.to_string(),
                gender,
                relation: bag_label(members.iter().map(|m| m.relation)),
                sentences: members
                    .iter()
                    .map(|m| featurize(m, vocab, config))
                    .collect::<Result<_>>()?,
            })
        })
        .collect()
}

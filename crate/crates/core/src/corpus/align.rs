use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EntityArticle, KnowledgeTriple, Segmentation};
use crate::types::Instance;

/// Rule deciding whether a sentence mentions a triple's tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchMode {
    /// The whole tail surface appears as a contiguous token run.
    Full,
    /// Any tail token of at least [`MIN_MATCH_LEN`] characters appears.
    #[default]
    AnyToken,
}

impl std::str::FromStr for MatchMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(MatchMode::Full),
            "any-token" => Ok(MatchMode::AnyToken),
            other => Err(crate::Error::config(format!("unknown match mode `{other}`"))),
        }
    }
}

pub const MIN_MATCH_LEN: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedTriple {
    pub head_id: String,
    pub relation_name: String,
    pub tail_surface: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct AlignOutput {
    pub instances: Vec<Instance>,
    pub skipped: Vec<SkippedTriple>,
}

fn tail_anchor(tokens: &[String], tail: &[String], mode: MatchMode) -> Option<usize> {
    match mode {
        MatchMode::Full => {
            if tail.is_empty() || tail.len() > tokens.len() {
                return None;
            }
            tokens.windows(tail.len()).position(|w| w == tail)
        }
        MatchMode::AnyToken => tokens.iter().position(|t| {
            t.chars().count() >= MIN_MATCH_LEN && tail.iter().any(|x| x == t)
        }),
    }
}

fn head_anchor(tokens: &[String], head_name: &[String]) -> usize {
    tokens
        .iter()
        .position(|t| {
            t.chars().filter(|c| c.is_alphanumeric()).count() >= 2
                && head_name.iter().any(|h| h == t)
        })
        .unwrap_or(0)
}

fn align_article(
    article: &EntityArticle,
    triples: &[&KnowledgeTriple],
    mode: MatchMode,
    segmentation: Segmentation,
) -> Vec<Instance> {
    let sentences = segmentation.apply(&article.text);
    let head_name: Vec<String> = article.name.split_whitespace().map(str::to_string).collect();
    // Tail surfaces are tokenized the same way as sentence text.
    let tails: Vec<Vec<String>> = triples
        .iter()
        .map(|t| super::segment_sentences(&t.tail_surface).concat())
        .collect();

    let mut out = Vec::new();
    for (s_idx, tokens) in sentences.iter().enumerate() {
        for (t_idx, (triple, tail)) in triples.iter().zip(&tails).enumerate() {
            let Some(tail_at) = tail_anchor(tokens, tail, mode) else {
                continue;
            };
            out.push(Instance {
                instance_id: format!("{}#s{}#t{}", article.entity_id, s_idx, t_idx),
                head_id: article.entity_id.clone(),
                tail_surface: triple.tail_surface.clone(),
                relation: triple.label(),
                gender: article.gender,
                tokens: tokens.clone(),
                head_anchor: head_anchor(tokens, &head_name),
                tail_anchor: tail_at,
            });
        }
    }
    out
}

/// Distant supervision: every sentence of a head entity's article that
/// mentions the tail of one of its triples becomes an instance carrying that
/// triple's label.
///
/// Articles are processed in parallel; output is ordered by head id, then
/// sentence index, then triple order.
pub fn align_distant(
    articles: &[EntityArticle],
    triples: &[KnowledgeTriple],
    mode: MatchMode,
    segmentation: Segmentation,
) -> AlignOutput {
    let by_id: HashMap<&str, &EntityArticle> =
        articles.iter().map(|a| (a.entity_id.as_str(), a)).collect();
    let mut grouped: BTreeMap<&str, Vec<&KnowledgeTriple>> = BTreeMap::new();
    let mut skipped = Vec::new();
    for t in triples {
        if by_id.contains_key(t.head_id.as_str()) {
            grouped.entry(t.head_id.as_str()).or_default().push(t);
        } else {
            skipped.push(SkippedTriple {
                head_id: t.head_id.clone(),
                relation_name: t.relation_name.clone(),
                tail_surface: t.tail_surface.clone(),
                reason: "head entity has no article".to_string(),
            });
        }
    }
    let groups: Vec<(&str, Vec<&KnowledgeTriple>)> = grouped.into_iter().collect();
    let instances = groups
        .par_iter()
        .map(|(head, ts)| align_article(by_id[head], ts, mode, segmentation))
        .collect::<Vec<_>>()
        .concat();
    AlignOutput { instances, skipped }
}

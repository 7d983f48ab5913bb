//! Counterfactual data augmentation by swapping gendered words.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use log::warn;

use crate::corpus::DatasetSplit;
use crate::error::{Error, Result};
use crate::io;
use crate::types::Instance;

pub const DEFAULT_SWAP_LEXICON: &str = include_str!("../data/swap_lexicon.tsv");

/// How `validate_lexicon` treats a pair that contradicts an earlier one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConflictPolicy {
    #[default]
    Strict,
    /// Keep the earlier mapping and drop the conflicting pair with a warning.
    FirstWins,
}

/// Bidirectional lowercase word mapping; always an involution.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SwapLexicon {
    map: BTreeMap<String, String>,
}

impl SwapLexicon {
    pub fn get(&self, word: &str) -> Option<&str> {
        self.map.get(word).map(String::as_str)
    }

    /// Every key, in sorted order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn default_lexicon() -> Self {
        validate_lexicon(&io::parse_pairs(DEFAULT_SWAP_LEXICON), ConflictPolicy::Strict)
            .expect("shipped lexicon is valid")
            .0
    }

    pub fn read(path: &Path, policy: ConflictPolicy) -> Result<(Self, Vec<String>)> {
        validate_lexicon(&io::parse_pairs(&io::read_to_string(path)?), policy)
    }
}

/// Builds the bidirectional mapping, rejecting self-maps and (unless
/// `FirstWins`) any pair that contradicts an earlier one. Returns the
/// lexicon and the conflict warnings.
pub fn validate_lexicon(
    pairs: &[(String, String)],
    policy: ConflictPolicy,
) -> Result<(SwapLexicon, Vec<String>)> {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    let mut warnings = Vec::new();
    for (a, b) in pairs {
        let (a, b) = (a.trim().to_lowercase(), b.trim().to_lowercase());
        if a.is_empty() || b.is_empty() {
            return Err(Error::data("swap lexicon contains an empty word"));
        }
        if a == b {
            return Err(Error::data(format!("swap pair maps `{a}` to itself")));
        }
        match (map.get(&a), map.get(&b)) {
            (None, None) => {
                map.insert(a.clone(), b.clone());
                map.insert(b, a);
            }
            (Some(x), Some(y)) if *x == b && *y == a => {}
            (x, y) => {
                let existing = x
                    .map(|x| format!("{a}->{x}"))
                    .or_else(|| y.map(|y| format!("{b}->{y}")))
                    .unwrap();
                let msg = format!("swap pair ({a}, {b}) conflicts with {existing}");
                match policy {
                    ConflictPolicy::Strict => return Err(Error::data(msg)),
                    ConflictPolicy::FirstWins => {
                        warn!("{msg}; keeping the earlier mapping");
                        warnings.push(msg);
                    }
                }
            }
        }
    }
    debug_assert!(map.iter().all(|(k, v)| map.get(v) == Some(k)));
    Ok((SwapLexicon { map }, warnings))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Case {
    Lower,
    Upper,
    Title,
}

fn apply_case(case: Case, lower: &str) -> String {
    match case {
        Case::Lower => lower.to_string(),
        Case::Upper => lower.to_uppercase(),
        Case::Title => {
            let mut chars = lower.chars();
            match chars.next() {
                Some(c) => c.to_uppercase().chain(chars).collect(),
                None => String::new(),
            }
        }
    }
}

fn case_of(token: &str, lower: &str) -> Option<Case> {
    [Case::Lower, Case::Upper, Case::Title]
        .into_iter()
        .find(|&c| apply_case(c, lower) == token)
}

fn swap_one(token: &str, lexicon: &SwapLexicon) -> Option<String> {
    let lower = token.to_lowercase();
    let mapped = lexicon.get(&lower)?;
    let case = case_of(token, &lower)?;
    let out = apply_case(case, mapped);
    // Only swap when the reverse swap reproduces the token exactly.
    let back_case = case_of(&out, &out.to_lowercase())?;
    (out.to_lowercase() == mapped && apply_case(back_case, &lower) == token).then_some(out)
}

/// Replaces every lexicon word, keeping lowercase, ALL-CAPS and Initial-cap
/// patterns. Tokens with other casing are left as they are.
pub fn swap_tokens(tokens: &[String], lexicon: &SwapLexicon) -> Vec<String> {
    tokens
        .iter()
        .map(|t| swap_one(t, lexicon).unwrap_or_else(|| t.clone()))
        .collect()
}

/// Swapped copy of one instance. Tokens belonging to the tail surface are
/// never swapped; anchors are unchanged.
pub fn swap_instance(inst: &Instance, lexicon: &SwapLexicon, flip_gender: bool) -> Instance {
    let protected: HashSet<&str> = inst.tail_surface.split_whitespace().collect();
    let tokens = inst
        .tokens
        .iter()
        .map(|t| {
            if protected.contains(t.as_str()) {
                t.clone()
            } else {
                swap_one(t, lexicon).unwrap_or_else(|| t.clone())
            }
        })
        .collect();
    Instance {
        instance_id: format!("{}_aug", inst.instance_id),
        gender: if flip_gender { inst.gender.flipped() } else { inst.gender },
        tokens,
        ..inst.clone()
    }
}

/// Original instances followed by their gender-swapped copies.
pub fn augment_split(split: &DatasetSplit, lexicon: &SwapLexicon, flip_gender: bool) -> DatasetSplit {
    let mut instances = split.instances.clone();
    instances.extend(split.instances.iter().map(|i| swap_instance(i, lexicon, flip_gender)));
    DatasetSplit::new(split.name, instances)
}

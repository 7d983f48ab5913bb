use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::types::Instance;

pub const UNK: &str = "<unk>";
pub const PAD: &str = "<pad>";
pub const UNK_INDEX: usize = 0;
pub const PAD_INDEX: usize = 1;

/// Lowercased word list with corpus counts. `<unk>` and `<pad>` occupy
/// indices 0 and 1 and carry a zero count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
}

pub fn normalize(token: &str) -> String {
    token.to_lowercase()
}

impl Vocabulary {
    /// Builds a vocabulary from an explicit word list; specials are
    /// prepended when missing.
    pub fn from_words(words: Vec<(String, u64)>) -> Result<Self> {
        let mut all = vec![(UNK.to_string(), 0), (PAD.to_string(), 0)];
        all.extend(words.into_iter().filter(|(w, _)| w != UNK && w != PAD));
        let mut index = HashMap::with_capacity(all.len());
        for (i, (w, _)) in all.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::data(format!("duplicate vocabulary word `{w}`")));
            }
        }
        let (words, counts) = all.into_iter().unzip();
        Ok(Vocabulary {
            words,
            counts,
            index,
        })
    }

    /// Words with frequency at least `min_count`, by descending count then
    /// lexicographically.
    pub fn build<'a>(sentences: impl IntoIterator<Item = &'a [String]>, min_count: u64) -> Result<Self> {
        if min_count < 1 {
            return Err(Error::config("min_count must be at least 1"));
        }
        let mut freq: HashMap<String, u64> = HashMap::new();
        let mut total = 0u64;
        for sentence in sentences {
            for tok in sentence {
                *freq.entry(normalize(tok)).or_default() += 1;
                total += 1;
            }
        }
        if total == 0 {
            return Err(Error::data("cannot build a vocabulary from an empty corpus"));
        }
        let mut words: Vec<(String, u64)> = freq.into_iter().filter(|(_, c)| *c >= min_count).collect();
        words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Self::from_words(words)
    }

    pub fn from_instances(instances: &[Instance], min_count: u64) -> Result<Self> {
        Self::build(instances.iter().map(|i| i.tokens.as_slice()), min_count)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, i: usize) -> &str {
        &self.words[i]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn count(&self, i: usize) -> u64 {
        self.counts[i]
    }

    pub fn get(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// Index of a raw token after lowercasing; unknown tokens map to `<unk>`.
    pub fn lookup(&self, token: &str) -> usize {
        self.index
            .get(token)
            .or_else(|| self.index.get(&normalize(token)))
            .copied()
            .unwrap_or(UNK_INDEX)
    }
}

//! Rule-based sentence splitting and tokenization.

use serde::{Deserialize, Serialize};

/// How article text is broken into sentences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Segmentation {
    /// Punctuation rules with an abbreviation list.
    #[default]
    Rules,
    /// Text is already segmented: one sentence per line, tokens separated by whitespace.
    Lines,
}

impl Segmentation {
    pub fn apply(self, text: &str) -> Vec<Vec<String>> {
        match self {
            Segmentation::Rules => segment_sentences(text),
            Segmentation::Lines => segment_lines(text),
        }
    }
}

const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "ft", "gen", "col", "lt", "sgt",
    "capt", "cmdr", "gov", "sen", "rep", "rev", "hon", "pres", "vs", "etc", "inc", "ltd", "co",
    "corp", "no", "vol", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct",
    "nov", "dec", "ca", "approx", "e.g", "i.e", "u.s", "u.k", "a.m", "p.m",
];

const LEADING: &[char] = &['(', '[', '"', '\''];
const TRAILING: &[char] = &[',', ';', ':', ')', ']', '"', '\'', '.', '!', '?'];

fn is_terminal(token: &str) -> bool {
    matches!(token, "." | "!" | "?" | "..." | "?!" | "!?")
}

/// `word` still carries its final period.
fn keeps_period(word: &str) -> bool {
    let stem = &word[..word.len() - 1];
    if stem.is_empty() {
        return false;
    }
    // Initials such as "M." and dotted forms such as "U.S.".
    if stem.chars().count() == 1 && stem.chars().all(char::is_alphabetic) {
        return true;
    }
    let lower = stem.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
        || (lower.contains('.') && lower.chars().all(|c| c.is_alphabetic() || c == '.'))
}

fn split_raw(raw: &str, out: &mut Vec<String>) {
    let mut word = raw;
    while word.len() > 1 {
        match word.chars().next() {
            Some(c) if LEADING.contains(&c) => {
                out.push(c.to_string());
                word = &word[c.len_utf8()..];
            }
            _ => break,
        }
    }
    let mut trailing = Vec::new();
    while word.chars().count() > 1 {
        let c = word.chars().next_back().unwrap();
        if !TRAILING.contains(&c) || (c == '.' && keeps_period(word)) {
            break;
        }
        trailing.push(c);
        word = &word[..word.len() - c.len_utf8()];
    }
    out.push(word.to_string());
    // Runs of sentence punctuation ("?!", "...") stay together.
    let mut pending = String::new();
    for c in trailing.into_iter().rev() {
        if matches!(c, '.' | '!' | '?') {
            pending.push(c);
        } else {
            if !pending.is_empty() {
                out.push(std::mem::take(&mut pending));
            }
            out.push(c.to_string());
        }
    }
    if !pending.is_empty() {
        out.push(pending);
    }
}

fn starts_sentence(raw: &str) -> bool {
    raw.trim_start_matches(LEADING)
        .chars()
        .next()
        .is_some_and(char::is_uppercase)
}

/// Splits raw text into tokenized sentences.
///
/// A sentence ends at a standalone `.`, `!` or `?` token that is followed by
/// a token starting with an uppercase letter, or at the end of the text.
/// Abbreviations and single-letter initials keep their period.
pub fn segment_sentences(text: &str) -> Vec<Vec<String>> {
    let raws: Vec<&str> = text.split_whitespace().collect();
    let mut sentences = Vec::new();
    let mut current: Vec<String> = Vec::new();
    for (i, raw) in raws.iter().enumerate() {
        split_raw(raw, &mut current);
        let at_boundary = current.last().is_some_and(|t| is_terminal(t))
            && raws.get(i + 1).is_none_or(|next| starts_sentence(next));
        if at_boundary {
            sentences.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    sentences
}

/// Pre-segmented input: every non-blank line is one whitespace-tokenized sentence.
pub fn segment_lines(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split_whitespace().map(str::to_string).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect()
}

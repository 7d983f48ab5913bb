//! Dataset construction: article/triple ingestion, distant-supervision
//! alignment, head-disjoint splitting, gender equalization, annotator
//! adjudication and corpus statistics.

mod align;
mod annotate;
mod segment;
mod split;
mod stats;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use align::{align_distant, AlignOutput, MatchMode, SkippedTriple};
pub use annotate::{apply_test_annotations, read_annotations, Annotation, AnnotationOutcome, Vote};
pub use segment::{segment_lines, segment_sentences, Segmentation};
pub use split::{equalize_split, split_by_head, DatasetSplit, SplitName, SplitOutput};
pub use stats::{corpus_stats, CorpusStats, GenderStats};

use crate::error::{Error, Result};
use crate::io;
use crate::types::{Gender, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityArticle {
    pub entity_id: String,
    pub name: String,
    pub gender: Gender,
    pub text: String,
}

/// Relation names accepted in the triples file. The first four are kept as
/// labels; the remaining three only ever produce NA instances.
pub const RELATION_NAMES: [&str; 7] = [
    "spouse",
    "hypernym",
    "birthDate",
    "birthPlace",
    "parents",
    "deathDate",
    "almaMater",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeTriple {
    pub head_id: String,
    pub relation_name: String,
    pub tail_surface: String,
}

impl KnowledgeTriple {
    pub fn new(head_id: &str, relation_name: &str, tail_surface: &str) -> Result<Self> {
        if !RELATION_NAMES.contains(&relation_name) {
            return Err(Error::data(format!(
                "unknown relation name `{relation_name}` for head `{head_id}`"
            )));
        }
        Ok(KnowledgeTriple {
            head_id: head_id.to_string(),
            relation_name: relation_name.to_string(),
            tail_surface: tail_surface.to_string(),
        })
    }

    /// Label an aligned sentence receives: positive relations keep their
    /// name, the negative relations collapse to NA.
    pub fn label(&self) -> Relation {
        match self.relation_name.as_str() {
            "spouse" => Relation::Spouse,
            "hypernym" => Relation::Hypernym,
            "birthDate" => Relation::BirthDate,
            "birthPlace" => Relation::BirthPlace,
            _ => Relation::Na,
        }
    }
}

pub fn read_articles(path: &Path) -> Result<Vec<EntityArticle>> {
    let articles: Vec<EntityArticle> = io::read_jsonl(path)?;
    let mut seen = std::collections::HashSet::new();
    for a in &articles {
        if !seen.insert(a.entity_id.as_str()) {
            return Err(Error::data(format!(
                "{}: duplicate entity_id `{}`",
                path.display(),
                a.entity_id
            )));
        }
    }
    Ok(articles)
}

pub fn parse_triples(text: &str) -> Result<Vec<KnowledgeTriple>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::data(format!(
                "triples line {}: expected 3 tab-separated fields, found {}",
                i + 1,
                fields.len()
            )));
        }
        out.push(KnowledgeTriple::new(fields[0], fields[1], fields[2].trim())?);
    }
    Ok(out)
}

pub fn read_triples(path: &Path) -> Result<Vec<KnowledgeTriple>> {
    parse_triples(&io::read_to_string(path)?)
}

pub fn format_triples(triples: &[KnowledgeTriple]) -> String {
    let mut out = String::new();
    for t in triples {
        out.push_str(&format!("{}\t{}\t{}\n", t.head_id, t.relation_name, t.tail_surface));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_relations_label_as_na() {
        for name in ["parents", "deathDate", "almaMater"] {
            let t = KnowledgeTriple::new("h", name, "x").unwrap();
            assert_eq!(t.label(), Relation::Na);
        }
        let t = KnowledgeTriple::new("h", "spouse", "x").unwrap();
        assert_eq!(t.label(), Relation::Spouse);
    }

    #[test]
    fn triples_parse_and_reject_unknown_relations() {
        let t = parse_triples("e1\tspouse\tSallie J. Barclay\n\ne2\talmaMater\tYale\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].tail_surface, "Sallie J. Barclay");
        assert!(parse_triples("e1\tsibling\tBob\n").is_err());
        assert!(parse_triples("e1\tspouse\n").is_err());
    }
}

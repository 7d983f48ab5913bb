use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DatasetSplit;
use crate::error::{Error, Result};
use crate::io;
use crate::types::Relation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vote {
    Yes,
    No,
}

/// One line of the annotations file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub instance_id: String,
    pub votes: Vec<Vote>,
}

impl Annotation {
    /// Per-category counts `[yes, no]`, the row layout Fleiss' kappa expects.
    pub fn counts(&self) -> Vec<usize> {
        let yes = self.votes.iter().filter(|v| **v == Vote::Yes).count();
        vec![yes, self.votes.len() - yes]
    }
}

pub fn read_annotations(path: &Path) -> Result<BTreeMap<String, Vec<Vote>>> {
    let rows: Vec<Annotation> = io::read_jsonl(path)?;
    let mut map = BTreeMap::new();
    for row in rows {
        if map.insert(row.instance_id.clone(), row.votes).is_some() {
            return Err(Error::data(format!(
                "{}: instance `{}` annotated twice",
                path.display(),
                row.instance_id
            )));
        }
    }
    Ok(map)
}

#[derive(Debug, Clone)]
pub struct AnnotationOutcome {
    pub split: DatasetSplit,
    pub relabeled: usize,
    /// Annotated ids that do not occur in the split.
    pub skipped_ids: Vec<String>,
}

/// Majority-vote adjudication: an instance whose majority answer is "no" is
/// relabeled NA. Unannotated instances are left alone.
pub fn apply_test_annotations(
    split: &DatasetSplit,
    annotations: &BTreeMap<String, Vec<Vote>>,
) -> Result<AnnotationOutcome> {
    for (id, votes) in annotations {
        if votes.len() < 3 || votes.len() % 2 == 0 {
            return Err(Error::data(format!(
                "instance `{id}` has {} votes; an odd count of at least 3 is required",
                votes.len()
            )));
        }
    }
    let present: HashSet<&str> = split.instances.iter().map(|i| i.instance_id.as_str()).collect();
    let skipped_ids = annotations
        .keys()
        .filter(|id| !present.contains(id.as_str()))
        .cloned()
        .collect();

    let mut relabeled = 0;
    let mut out = split.clone();
    for inst in &mut out.instances {
        let Some(votes) = annotations.get(&inst.instance_id) else {
            continue;
        };
        let no = votes.iter().filter(|v| **v == Vote::No).count();
        if 2 * no > votes.len() && inst.relation != Relation::Na {
            inst.relation = Relation::Na;
            relabeled += 1;
        }
    }
    Ok(AnnotationOutcome {
        split: out,
        relabeled,
        skipped_ids,
    })
}

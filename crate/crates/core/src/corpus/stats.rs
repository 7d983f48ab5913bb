use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::types::{Gender, Instance, Relation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenderStats {
    pub total: usize,
    /// Keyed by relation name.
    pub counts: BTreeMap<String, usize>,
    pub proportions: BTreeMap<String, f64>,
}

/// Relation distribution per gender, as plotted in the dataset overview.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub male: GenderStats,
    pub female: GenderStats,
}

impl CorpusStats {
    pub fn for_gender(&self, g: Gender) -> &GenderStats {
        match g {
            Gender::Male => &self.male,
            Gender::Female => &self.female,
        }
    }

    pub fn proportion(&self, g: Gender, r: Relation) -> f64 {
        self.for_gender(g).proportions[r.as_str()]
    }

    pub fn count(&self, g: Gender, r: Relation) -> usize {
        self.for_gender(g).counts[r.as_str()]
    }
}

fn gender_stats(instances: &[Instance], g: Gender) -> GenderStats {
    let mut counts = [0usize; Relation::COUNT];
    for i in instances.iter().filter(|i| i.gender == g) {
        counts[i.relation.index()] += 1;
    }
    let total: usize = counts.iter().sum();
    let prop = |c: usize| if total == 0 { 0.0 } else { c as f64 / total as f64 };
    GenderStats {
        total,
        counts: Relation::ALL
            .iter()
            .map(|r| (r.as_str().to_string(), counts[r.index()]))
            .collect(),
        proportions: Relation::ALL
            .iter()
            .map(|r| (r.as_str().to_string(), prop(counts[r.index()])))
            .collect(),
    }
}

pub fn corpus_stats(instances: &[Instance]) -> CorpusStats {
    CorpusStats {
        male: gender_stats(instances, Gender::Male),
        female: gender_stats(instances, Gender::Female),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(g: Gender, r: Relation) -> Instance {
        Instance {
            instance_id: String::new(),
            head_id: "h".into(),
            tail_surface: "t".into(),
            relation: r,
            gender: g,
            tokens: vec!["t".into()],
            head_anchor: 0,
            tail_anchor: 0,
        }
    }

    #[test]
    fn all_female_spouse() {
        let s = corpus_stats(&vec![inst(Gender::Female, Relation::Spouse); 3]);
        assert_eq!(s.proportion(Gender::Female, Relation::Spouse), 1.0);
        assert_eq!(s.male.total, 0);
    }

    #[test]
    fn direct_counts() {
        let data = vec![
            inst(Gender::Male, Relation::Spouse),
            inst(Gender::Male, Relation::Spouse),
            inst(Gender::Male, Relation::Hypernym),
            inst(Gender::Male, Relation::Hypernym),
        ];
        let s = corpus_stats(&data);
        let props: Vec<f64> = Relation::ALL
            .iter()
            .map(|r| s.proportion(Gender::Male, *r))
            .collect();
        assert_eq!(props, vec![0.5, 0.5, 0.0, 0.0, 0.0]);
        let sum: f64 = s.male.proportions.values().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }
}

use serde::{Deserialize, Serialize};

use super::PredictionRecord;
use crate::error::{Error, Result};
use crate::types::{Gender, Relation};

/// Precision, recall and F1 for one relation and one group.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// Precision or recall had a zero denominator and was reported as 0.
    pub undefined: bool,
}

impl Prf {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Prf {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            precision,
            recall,
            f1,
            tp,
            fp,
            fn_,
            undefined: tp + fp == 0 || tp + fn_ == 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationScores {
    pub relation: Relation,
    pub male: Prf,
    pub female: Prf,
    pub all: Prf,
}

impl RelationScores {
    pub fn group(&self, g: Gender) -> &Prf {
        match g {
            Gender::Male => &self.male,
            Gender::Female => &self.female,
        }
    }
}

/// Scores for the four positive relations, in class order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationGenderScores {
    pub relations: Vec<RelationScores>,
    pub male_records: usize,
    pub female_records: usize,
}

impl RelationGenderScores {
    pub fn get(&self, r: Relation) -> &RelationScores {
        self.relations
            .iter()
            .find(|s| s.relation == r)
            .expect("scores cover every positive relation")
    }
}

/// One-vs-rest precision/recall/F1 for every positive relation.
pub fn per_relation_scores(records: &[PredictionRecord]) -> RelationGenderScores {
    // confusion[gender][gold][predicted]
    let mut confusion = [[[0usize; Relation::COUNT]; Relation::COUNT]; 2];
    for rec in records {
        confusion[rec.gender as usize][rec.gold.index()][rec.predicted.index()] += 1;
    }
    let counts = |g: usize, r: usize| {
        let m = &confusion[g];
        let tp = m[r][r];
        let gold: usize = m[r].iter().sum();
        let predicted: usize = m.iter().map(|row| row[r]).sum();
        (tp, predicted - tp, gold - tp)
    };
    let relations = Relation::POSITIVE
        .iter()
        .map(|&rel| {
            let r = rel.index();
            let (mt, mf, mn) = counts(Gender::Male as usize, r);
            let (ft, ff, fnn) = counts(Gender::Female as usize, r);
            RelationScores {
                relation: rel,
                male: Prf::from_counts(mt, mf, mn),
                female: Prf::from_counts(ft, ff, fnn),
                all: Prf::from_counts(mt + ft, mf + ff, mn + fnn),
            }
        })
        .collect();
    let male_records = records.iter().filter(|r| r.gender == Gender::Male).count();
    RelationGenderScores {
        relations,
        male_records,
        female_records: records.len() - male_records,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationGap {
    pub relation: Relation,
    /// Male F1 minus female F1; positive favors male heads.
    pub f1_gap: f64,
    /// Male recall minus female recall.
    pub eoo_gap: f64,
}

pub fn gender_gaps(scores: &RelationGenderScores) -> Result<Vec<RelationGap>> {
    if scores.male_records == 0 || scores.female_records == 0 {
        return Err(Error::data(format!(
            "gender gaps need both genders (male records: {}, female records: {})",
            scores.male_records, scores.female_records
        )));
    }
    Ok(scores
        .relations
        .iter()
        .map(|s| RelationGap {
            relation: s.relation,
            f1_gap: s.male.f1 - s.female.f1,
            eoo_gap: s.male.recall - s.female.recall,
        })
        .collect())
}

/// Disparity score for any number of groups: the mean over relations of the
/// mean absolute F1 difference over unordered group pairs. `f1[r][k]` is the
/// F1 of group `k` on relation `r`.
pub fn disparity_score_groups(f1: &[Vec<f64>]) -> f64 {
    if f1.is_empty() {
        return 0.0;
    }
    let per_relation = f1.iter().map(|groups| {
        let mut sum = 0.0;
        let mut pairs = 0usize;
        for j in 0..groups.len() {
            for k in j + 1..groups.len() {
                sum += (groups[k] - groups[j]).abs();
                pairs += 1;
            }
        }
        if pairs == 0 {
            0.0
        } else {
            sum / pairs as f64
        }
    });
    per_relation.sum::<f64>() / f1.len() as f64
}

/// Two-group disparity score from per-relation `(male, female)` F1 pairs.
pub fn disparity_score(f1_by_gender: &[(f64, f64)]) -> f64 {
    let table: Vec<Vec<f64>> = f1_by_gender.iter().map(|&(m, f)| vec![m, f]).collect();
    disparity_score_groups(&table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub scores: RelationGenderScores,
    pub gaps: Vec<RelationGap>,
    pub macro_f1: f64,
    pub disparity_score: f64,
    pub pps: f64,
    /// Mean of the per-relation equality-of-opportunity gaps.
    pub eoo: f64,
}

impl MetricsReport {
    pub fn gap(&self, r: Relation) -> &RelationGap {
        self.gaps.iter().find(|g| g.relation == r).expect("gap per positive relation")
    }

    /// Every numeric field as `(name, value)`, in a fixed order.
    pub fn fields(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        for s in &self.scores.relations {
            for (group, prf) in [("male", &s.male), ("female", &s.female), ("all", &s.all)] {
                for (metric, v) in [("precision", prf.precision), ("recall", prf.recall), ("f1", prf.f1)] {
                    out.push((format!("{}.{group}.{metric}", s.relation), v));
                }
            }
        }
        for g in &self.gaps {
            out.push((format!("{}.f1_gap", g.relation), g.f1_gap));
            out.push((format!("{}.eoo_gap", g.relation), g.eoo_gap));
        }
        out.push(("macro_f1".into(), self.macro_f1));
        out.push(("disparity_score".into(), self.disparity_score));
        out.push(("pps".into(), self.pps));
        out.push(("eoo".into(), self.eoo));
        out
    }
}

/// Full report: macro F1 over the positive relations, disparity score,
/// performance parity score (`macro_f1 - disparity_score`) and gaps.
pub fn performance_parity(records: &[PredictionRecord]) -> Result<MetricsReport> {
    if records.is_empty() {
        return Err(Error::data("no prediction records"));
    }
    let scores = per_relation_scores(records);
    let gaps = gender_gaps(&scores)?;
    let n = scores.relations.len() as f64;
    let macro_f1 = scores.relations.iter().map(|s| s.all.f1).sum::<f64>() / n;
    let ds = disparity_score(
        &scores
            .relations
            .iter()
            .map(|s| (s.male.f1, s.female.f1))
            .collect::<Vec<_>>(),
    );
    let eoo = gaps.iter().map(|g| g.eoo_gap).sum::<f64>() / gaps.len() as f64;
    Ok(MetricsReport {
        scores,
        gaps,
        macro_f1,
        disparity_score: ds,
        pps: macro_f1 - ds,
        eoo,
    })
}

/// Pooled macro F1 over the positive relations; needs no gender balance.
pub fn macro_f1_of(records: &[PredictionRecord]) -> f64 {
    let scores = per_relation_scores(records);
    scores.relations.iter().map(|s| s.all.f1).sum::<f64>() / scores.relations.len() as f64
}

//! Brute-force reference metrics: explicit loops over records, no
//! confusion matrix, F1 as `2tp / (2tp + fp + fn)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relbias::metrics::PredictionRecord;
use relbias::{Gender, Relation};

#[derive(Debug, Clone, Copy)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn scores(records: &[PredictionRecord], relation: Relation, gender: Option<Gender>) -> Scores {
    let (mut tp, mut fp, mut fneg) = (0u64, 0u64, 0u64);
    for r in records {
        if gender.is_some_and(|g| g != r.gender) {
            continue;
        }
        let gold = r.gold == relation;
        let pred = r.predicted == relation;
        if gold && pred {
            tp += 1;
        } else if pred {
            fp += 1;
        } else if gold {
            fneg += 1;
        }
    }
    let div = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Scores {
        precision: div(tp, tp + fp),
        recall: div(tp, tp + fneg),
        f1: div(2 * tp, 2 * tp + fp + fneg),
    }
}

pub struct Summary {
    /// Per positive relation: (male, female, pooled).
    pub per_relation: Vec<(Scores, Scores, Scores)>,
    pub f1_gaps: Vec<f64>,
    pub eoo_gaps: Vec<f64>,
    pub macro_f1: f64,
    pub ds: f64,
    pub pps: f64,
    pub eoo: f64,
}

pub fn summary(records: &[PredictionRecord]) -> Summary {
    let per_relation: Vec<_> = Relation::POSITIVE
        .iter()
        .map(|&r| {
            (
                scores(records, r, Some(Gender::Male)),
                scores(records, r, Some(Gender::Female)),
                scores(records, r, None),
            )
        })
        .collect();
    let f1_gaps: Vec<f64> = per_relation.iter().map(|(m, f, _)| m.f1 - f.f1).collect();
    let eoo_gaps: Vec<f64> = per_relation.iter().map(|(m, f, _)| m.recall - f.recall).collect();
    let macro_f1 = per_relation.iter().map(|(_, _, a)| a.f1).sum::<f64>() / 4.0;
    let ds = f1_gaps.iter().map(|g| g.abs()).sum::<f64>() / 4.0;
    let eoo = eoo_gaps.iter().sum::<f64>() / 4.0;
    Summary {
        per_relation,
        f1_gaps,
        eoo_gaps,
        macro_f1,
        ds,
        pps: macro_f1 - ds,
        eoo,
    }
}

/// A random record set with both genders present. Predictions agree with
/// gold about half of the time so every count type occurs.
pub fn random_records(rng: &mut ChaCha8Rng, n: usize) -> Vec<PredictionRecord> {
    (0..n)
        .map(|i| {
            let gender = match i {
                0 => Gender::Male,
                1 => Gender::Female,
                _ => Gender::ALL[rng.gen_range(0..2)],
            };
            let gold = Relation::ALL[rng.gen_range(0..5)];
            let predicted = if rng.gen_bool(0.5) { gold } else { Relation::ALL[rng.gen_range(0..5)] };
            PredictionRecord { id: format!("r{i}"), gender, gold, predicted }
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

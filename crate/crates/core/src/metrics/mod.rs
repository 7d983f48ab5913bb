//! Performance and fairness metrics over bag-level prediction records.
//!
//! Scores are one-vs-rest per relation, computed per gender and pooled.
//! NA takes part in the confusion counts but not in the macro average, so
//! the macro F1, the disparity score and the performance parity score all
//! average over the four positive relations.

mod aggregate;
mod kappa;
mod scores;

pub use aggregate::{aggregate_runs, AggregateField, AggregateReport};
pub use kappa::fleiss_kappa;
pub use scores::{
    disparity_score, disparity_score_groups, gender_gaps, macro_f1_of, per_relation_scores,
    performance_parity,
    MetricsReport, Prf, RelationGap, RelationGenderScores, RelationScores,
};

use serde::{Deserialize, Serialize};

use crate::types::{Gender, Relation};

/// One prediction: the only input the metrics need.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub gender: Gender,
    pub gold: Relation,
    pub predicted: Relation,
}

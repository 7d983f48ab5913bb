use serde::{Deserialize, Serialize};

use super::MetricsReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateField {
    pub name: String,
    pub mean: f64,
    pub stderr: f64,
}

/// Field-wise mean and standard error over several runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub runs: usize,
    pub fields: Vec<AggregateField>,
}

impl AggregateReport {
    pub fn field(&self, name: &str) -> Option<&AggregateField> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn mean(&self, name: &str) -> f64 {
        self.field(name).map_or(f64::NAN, |f| f.mean)
    }

    pub fn stderr(&self, name: &str) -> f64 {
        self.field(name).map_or(f64::NAN, |f| f.stderr)
    }
}

/// Mean and standard error (sample standard deviation over `√k`, 0 for a
/// single run) of every numeric field. Values are summed in sorted order so
/// the result does not depend on the order of `reports`.
pub fn aggregate_runs(reports: &[MetricsReport]) -> Result<AggregateReport> {
    let Some(first) = reports.first() else {
        return Err(Error::data("cannot aggregate zero reports"));
    };
    let names: Vec<String> = first.fields().into_iter().map(|(n, _)| n).collect();
    let columns: Vec<Vec<(String, f64)>> = reports.iter().map(MetricsReport::fields).collect();
    for (k, col) in columns.iter().enumerate() {
        if col.len() != names.len() || col.iter().zip(&names).any(|((a, _), b)| a != b) {
            return Err(Error::data(format!("report {k} has a different shape than report 0")));
        }
    }
    let k = reports.len() as f64;
    let fields = names
        .into_iter()
        .enumerate()
        .map(|(i, name)| {
            let mut values: Vec<f64> = columns.iter().map(|c| c[i].1).collect();
            values.sort_by(f64::total_cmp);
            let mean = values.iter().sum::<f64>() / k;
            let stderr = if values.len() < 2 {
                0.0
            } else {
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
                var.sqrt() / k.sqrt()
            };
            AggregateField { name, mean, stderr }
        })
        .collect();
    Ok(AggregateReport {
        runs: reports.len(),
        fields,
    })
}

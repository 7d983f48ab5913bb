//! Report rendering and emission.
//!
//! CSV and TSV outputs start with `#` comment lines carrying the resolved
//! configuration and input hashes, followed by a header row and data rows.
//! Numbers use the shortest representation that round-trips, so identical
//! runs produce byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::Flags;
use super::pipeline::{GridReport, PipelineReport, RunReport};
use crate::error::{Error, Result};
use crate::io::write_bytes;
use crate::metrics::AggregateReport;
use crate::types::Relation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    TsvPlotdata,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [ReportFormat::Json, ReportFormat::Csv, ReportFormat::TsvPlotdata];

    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
            ReportFormat::TsvPlotdata => "tsv",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "tsv-plotdata" | "tsv" => Ok(ReportFormat::TsvPlotdata),
            other => Err(Error::config(format!("unknown report format `{other}`"))),
        }
    }
}

/// Anything that can be written as a report.
pub trait Report {
    fn render(&self, format: ReportFormat) -> String;
}

fn provenance(config: &BTreeMap<String, String>, inputs: &BTreeMap<String, String>) -> String {
    let mut s = String::new();
    for (k, v) in config {
        let _ = writeln!(s, "# config {k}={v}");
    }
    for (k, v) in inputs {
        let _ = writeln!(s, "# input {k}={v}");
    }
    s
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

const PLOT_HEADER: &str =
    "flags\tequalize\tdebias\taugment\trelation\tmale_f1\tfemale_f1\tf1_gap\tf1_gap_stderr\teoo_gap\teoo_gap_stderr\n";

fn plot_rows(out: &mut String, flags: Flags, aggregate: Option<&AggregateReport>) {
    for r in Relation::POSITIVE {
        let cell = |name: String, stderr: bool| match aggregate {
            Some(a) if stderr => a.stderr(&name).to_string(),
            Some(a) => a.mean(&name).to_string(),
            None => String::new(),
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{r}\t{}\t{}\t{}\t{}\t{}\t{}",
            flags.label(),
            flags.equalize,
            flags.debias,
            flags.augment,
            cell(format!("{r}.male.f1"), false),
            cell(format!("{r}.female.f1"), false),
            cell(format!("{r}.f1_gap"), false),
            cell(format!("{r}.f1_gap"), true),
            cell(format!("{r}.eoo_gap"), false),
            cell(format!("{r}.eoo_gap"), true),
        );
    }
}

impl Report for PipelineReport {
    fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => json(self),
            ReportFormat::Csv => {
                let mut s = provenance(&self.config, &self.inputs);
                s.push_str("metric,mean,stderr\n");
                for f in &self.run.aggregate.fields {
                    let _ = writeln!(s, "{},{},{}", f.name, f.mean, f.stderr);
                }
                s
            }
            ReportFormat::TsvPlotdata => {
                let mut s = provenance(&self.config, &self.inputs);
                s.push_str(PLOT_HEADER);
                plot_rows(&mut s, self.run.flags, Some(&self.run.aggregate));
                s
            }
        }
    }
}

/// Grid CSV columns after the flag columns: the four headline metrics.
const GRID_METRICS: [(&str, &str); 4] = [
    ("eoo", "eoo"),
    ("pps", "pps"),
    ("macro_f1", "macro_f1"),
    ("disparity_score", "disparity_score"),
];

fn grid_csv_row(out: &mut String, index: usize, flags: Flags, report: Option<&RunReport>, error: Option<&str>) {
    let _ = write!(
        out,
        "{},{},{},{},{}",
        index + 1,
        csv_field(&flags.label()),
        flags.equalize,
        flags.debias,
        flags.augment
    );
    for (_, field) in GRID_METRICS {
        match report {
            Some(r) => {
                let _ = write!(out, ",{},{}", r.aggregate.mean(field), r.aggregate.stderr(field));
            }
            None => out.push_str(",,"),
        }
    }
    let status = match error {
        Some(e) => format!("error: {e}"),
        None => "ok".into(),
    };
    let _ = writeln!(out, ",{}", csv_field(&status));
}

impl Report for GridReport {
    fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => json(self),
            ReportFormat::Csv => {
                let mut s = provenance(&self.config, &self.inputs);
                s.push_str("row,flags,equalize,debias,augment");
                for (name, _) in GRID_METRICS {
                    let _ = write!(s, ",{name},{name}_stderr");
                }
                s.push_str(",status\n");
                for (i, row) in self.rows.iter().enumerate() {
                    grid_csv_row(&mut s, i, row.flags, row.report.as_ref(), row.error.as_deref());
                }
                s
            }
            ReportFormat::TsvPlotdata => {
                let mut s = provenance(&self.config, &self.inputs);
                s.push_str(PLOT_HEADER);
                for row in &self.rows {
                    plot_rows(&mut s, row.flags, row.report.as_ref().map(|r| &r.aggregate));
                }
                s
            }
        }
    }
}

/// Writes `{stem}.{ext}` into `dir` for every format. Everything is
/// rendered before the first write; if any write fails, files already
/// written by this call are removed.
pub fn emit_report<R: Report>(report: &R, formats: &[ReportFormat], dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    let rendered: Vec<(PathBuf, String)> = formats
        .iter()
        .map(|&f| (dir.join(format!("{stem}.{}", f.extension())), report.render(f)))
        .collect();
    write_all(&rendered)
}

/// Writes every file or none of them.
pub fn write_all(files: &[(PathBuf, String)]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (path, content) in files {
        if let Err(e) = write_bytes(path, content.as_bytes()) {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(e.in_stage("report"));
        }
        written.push(path.clone());
    }
    Ok(written)
}

/// Metrics of externally produced prediction files, one run per file.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EvaluationReport {
    pub inputs: BTreeMap<String, String>,
    pub runs: Vec<crate::metrics::MetricsReport>,
    pub aggregate: AggregateReport,
}

impl Report for EvaluationReport {
    fn render(&self, format: ReportFormat) -> String {
        let config = BTreeMap::new();
        match format {
            ReportFormat::Json => json(self),
            ReportFormat::Csv => {
                let mut s = provenance(&config, &self.inputs);
                s.push_str("metric,mean,stderr\n");
                for f in &self.aggregate.fields {
                    let _ = writeln!(s, "{},{},{}", f.name, f.mean, f.stderr);
                }
                s
            }
            ReportFormat::TsvPlotdata => {
                let mut s = provenance(&config, &self.inputs);
                s.push_str(PLOT_HEADER);
                plot_rows(&mut s, Flags::default(), Some(&self.aggregate));
                s
            }
        }
    }
}

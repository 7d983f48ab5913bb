//! Experiment orchestration: configuration, end-to-end runs, the
//! eight-row mitigation grid and report emission.

pub mod config;
pub mod pipeline;
pub mod report;
pub mod synthetic;

pub use config::{ExperimentConfig, Flags, Paths, KEYS};
pub use pipeline::{
    debias_with, embeddings_for, load_lexicon, prepare_data, run_flags, run_grid, run_pipeline, training_data,
    GridReport, GridRow, PipelineReport, PreparedData, RunReport, SeedRun, SplitCounts, TrainingData,
};
pub use report::{emit_report, write_all, EvaluationReport, Report, ReportFormat};
pub use synthetic::{generate, SyntheticConfig, SyntheticCorpus};

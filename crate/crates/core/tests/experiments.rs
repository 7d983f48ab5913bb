mod common;

use relbias::experiments::{
    emit_report, run_grid, run_pipeline, Flags, GridReport, PipelineReport, Report, ReportFormat, SyntheticConfig,
};
use relbias::types::Relation;

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn baseline_on_planted_corpus_is_accurate() {
    let dir = tempfile::tempdir().unwrap();
    let (a, t) = common::write_synthetic(dir.path(), &SyntheticConfig { entities: 500, ..Default::default() });
    let config = common::quick_experiment(&a, &t, &[("model.filters", "60"), ("train.epochs", "12")]);
    let report = run_pipeline(&config).unwrap();
    let macro_f1 = report.run.aggregate.mean("macro_f1");
    assert!(macro_f1 >= 0.95, "macro F1 {macro_f1}");
    assert_eq!(report.run.flags, Flags::default());
    assert!(report.inputs.contains_key("data.articles") && report.inputs.contains_key("data.triples"));
    assert_eq!(report.config["model.filters"], "60");
}

#[test]
fn equalized_run_trains_on_balanced_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, t) = common::write_synthetic(dir.path(), &SyntheticConfig { entities: 200, ..Default::default() });
    let config = common::quick_experiment(&a, &t, &[("run.equalize", "true"), ("train.epochs", "2")]);
    let report = run_pipeline(&config).unwrap();
    let run = &report.run;
    assert!(run.train.male.max(run.train.female) as f64 <= run.train.male.min(run.train.female) as f64 * 1.01);
    let json = report.render(ReportFormat::Json);
    let back: PipelineReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back.run.train, run.train);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, t) = common::write_synthetic(dir.path(), &SyntheticConfig { entities: 150, ..Default::default() });
    let config = common::quick_experiment(&a, &t, &[("run.seeds", "0,1"), ("run.augment", "true"), ("train.epochs", "3")]);
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("out{k}"));
        let report = run_pipeline(&config).unwrap();
        let files = emit_report(&report, &ReportFormat::ALL, &out, "report").unwrap();
        outputs.push(files.iter().map(|p| std::fs::read(p).unwrap()).collect::<Vec<_>>());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn report_formats_follow_their_layouts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, t) = common::write_synthetic(dir.path(), &SyntheticConfig { entities: 120, ..Default::default() });
    let config = common::quick_experiment(&a, &t, &[("train.epochs", "2")]);
    let report = run_pipeline(&config).unwrap();

    let csv = report.render(ReportFormat::Csv);
    let rows = data_rows(&csv);
    assert_eq!(rows[0], "metric,mean,stderr");
    assert_eq!(rows.len() - 1, report.run.aggregate.fields.len());
    assert!(csv.contains("# config model.encoder=pcnn"));
    assert!(csv.contains(&format!("# input data.articles={}", report.inputs["data.articles"])));

    let json = report.render(ReportFormat::Json);
    assert_eq!(serde_json::from_str::<PipelineReport>(&json).unwrap(), report);

    let tsv = report.render(ReportFormat::TsvPlotdata);
    let rows = data_rows(&tsv);
    assert_eq!(rows.len(), 1 + Relation::POSITIVE.len());
    assert!(rows[0].contains("f1_gap") && rows[0].contains("eoo_gap"));
}

#[test]
fn emitting_to_an_unwritable_location_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let (a, t) = common::write_synthetic(dir.path(), &SyntheticConfig { entities: 60, ..Default::default() });
    let config = common::quick_experiment(&a, &t, &[("train.epochs", "1")]);
    let report = run_pipeline(&config).unwrap();
    // A regular file where the output directory should be.
    let blocker = dir.path().join("blocked");
    std::fs::write(&blocker, "x").unwrap();
    assert!(emit_report(&report, &ReportFormat::ALL, &blocker, "report").is_err());
    assert_eq!(std::fs::read(&blocker).unwrap(), b"x");
}

#[test]
fn stage_failures_name_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let (a, t) = common::write_synthetic(dir.path(), &SyntheticConfig { entities: 60, ..Default::default() });
    let bad = dir.path().join("pairs.tsv");
    std::fs::write(&bad, "zzqx\tqqzx\n").unwrap();
    let mut config = common::quick_experiment(&a, &t, &[("run.debias", "true")]);
    config.paths.definitional_pairs = Some(bad);
    let err = run_pipeline(&config).unwrap_err();
    assert!(err.to_string().contains("stage `debias`"), "{err}");
    assert_eq!(err.exit_code(), 2);
}

fn grid(entities: usize, overrides: &[(&str, &str)], pairs: Option<&str>) -> GridReport {
    let dir = tempfile::tempdir().unwrap();
    let (a, t) = common::write_synthetic(dir.path(), &SyntheticConfig { entities, ..Default::default() });
    let mut config = common::quick_experiment(&a, &t, overrides);
    if let Some(text) = pairs {
        let path = dir.path().join("pairs.tsv");
        std::fs::write(&path, text).unwrap();
        config.paths.definitional_pairs = Some(path);
    }
    run_grid(&config).unwrap()
}

#[test]
fn grid_has_eight_rows_in_table_order() {
    let report = grid(120, &[("train.epochs", "2"), ("run.equalize", "true")], None);
    let labels: Vec<&str> = report.rows.iter().map(|r| r.label.as_str()).collect();
    assert_eq!(labels, ["-", "E", "D", "A", "E,D", "E,A", "D,A", "E,D,A"]);
    assert!(report.rows.iter().all(|r| r.error.is_none() && r.report.is_some()));
    // Flags in the configuration are ignored by the grid.
    assert_eq!(report.rows[0].report.as_ref().unwrap().flags, Flags::default());

    let csv = report.render(ReportFormat::Csv);
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 9);
    assert!(rows[0].starts_with("row,flags,equalize,debias,augment,eoo,eoo_stderr,pps,pps_stderr,macro_f1"));
    assert!(rows[0].contains("disparity_score"));
    let tsv = report.render(ReportFormat::TsvPlotdata);
    assert_eq!(data_rows(&tsv).len(), 1 + 8 * 4);
    let back: GridReport = serde_json::from_str(&report.render(ReportFormat::Json)).unwrap();
    assert_eq!(back, report);
}

#[test]
fn grid_records_failing_rows_and_continues() {
    let report = grid(80, &[("train.epochs", "1")], Some("zzqx\tqqzx\n"));
    assert_eq!(report.rows.len(), 8);
    for row in &report.rows {
        assert_eq!(row.error.is_some(), row.flags.debias, "{}", row.label);
        assert_eq!(row.report.is_some(), !row.flags.debias);
    }
    let csv = report.render(ReportFormat::Csv);
    assert_eq!(csv.lines().filter(|l| l.ends_with(",ok")).count(), 4);
}

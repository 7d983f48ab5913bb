use std::path::Path;
use std::process::{Command, Output};

fn relbias(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relbias")).args(args).current_dir(cwd).output().unwrap()
}

const QUICK: &[&str] = &[
    "--embedding.dim", "16", "--model.word_dim", "16", "--embedding.epochs", "1", "--embedding.min_count", "2",
    "--model.filters", "20", "--train.epochs", "2", "--run.seeds", "0",
];

#[test]
fn end_to_end_run_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = relbias(&["gen-synthetic", "--out-dir", "data", "--entities", "100"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let mut reports = Vec::new();
    for run in ["a", "b"] {
        let mut args = vec![
            "run", "--data.articles", "data/articles.jsonl", "--data.triples", "data/triples.tsv", "--out-dir", run,
            "--augment",
        ];
        args.extend_from_slice(QUICK);
        let out = relbias(&args, d);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let files: Vec<Vec<u8>> = ["report.json", "report.csv", "report.tsv"]
            .iter()
            .map(|f| std::fs::read(d.join(run).join(f)).unwrap())
            .collect();
        reports.push(files);
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn corpus_build_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(relbias(&["gen-synthetic", "--out-dir", ".", "--entities", "80"], d).status.success());
    let out = relbias(
        &["build-corpus", "--data.articles", "articles.jsonl", "--data.triples", "triples.tsv", "--out-dir", "split"],
        d,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["train.jsonl", "dev.jsonl", "test.jsonl", "skipped_triples.jsonl"] {
        assert!(d.join("split").join(f).exists(), "{f}");
    }
    let out = relbias(&["stats", "--input", "split/train.jsonl"], d);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("spouse"));
}

#[test]
fn kappa_of_a_count_table() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("t.txt"), "3 0\n2 1\n1 2\n0 3\n").unwrap();
    let out = relbias(&["kappa", "--table", "t.txt"], dir.path());
    assert!(out.status.success());
    let k: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((k - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn exit_codes_distinguish_config_and_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // Unknown key and invalid value are configuration errors.
    assert_eq!(relbias(&["run", "--model.nonsense", "1"], d).status.code(), Some(1));
    assert_eq!(relbias(&["run", "--model.encoder", "lstm"], d).status.code(), Some(1));
    std::fs::write(d.join("bad.cfg"), "model.filters = many\n").unwrap();
    assert_eq!(relbias(&["run", "--config", "bad.cfg"], d).status.code(), Some(1));
    // Missing input files are data errors.
    let out = relbias(&["run", "--data.articles", "nope.jsonl", "--data.triples", "nope.tsv"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    assert_eq!(relbias(&["stats", "--input", "missing.jsonl"], d).status.code(), Some(2));
}

//! End-to-end runs and the mitigation grid.

use std::collections::BTreeMap;
use std::path::Path;

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Flags};
use crate::augmentation::{augment_split, SwapLexicon};
use crate::corpus::{
    align_distant, apply_test_annotations, equalize_split, read_annotations, read_articles, read_triples,
    split_by_head, DatasetSplit, SplitName,
};
use crate::embeddings::{
    default_definitional_pairs, default_gendered_words, gender_direction, hard_debias, train_sgns,
    EmbeddingMatrix, Vocabulary,
};
use crate::error::{Error, Result};
use crate::io::{file_hash, parse_pairs, parse_words, read_jsonl, read_to_string};
use crate::metrics::{aggregate_runs, performance_parity, AggregateReport, MetricsReport};
use crate::model::{predict, train_model};
use crate::types::{Gender, Instance};

/// Train, dev and test splits shared by every run of an experiment.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub train: DatasetSplit,
    pub dev: DatasetSplit,
    pub test: DatasetSplit,
    pub warnings: Vec<String>,
    /// Content hash of every input file, keyed by configuration key.
    pub inputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub male: usize,
    pub female: usize,
}

impl SplitCounts {
    pub fn of(split: &DatasetSplit) -> Self {
        SplitCounts {
            male: split.count(Gender::Male),
            female: split.count(Gender::Female),
        }
    }

    /// Larger over smaller count; infinite when one gender is absent.
    pub fn ratio(&self) -> f64 {
        let (hi, lo) = (self.male.max(self.female), self.male.min(self.female));
        hi as f64 / lo as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    pub best_epoch: usize,
    pub epochs_run: usize,
    pub metrics: MetricsReport,
}

/// One flag combination: the instance counts actually trained on, every
/// seed's metrics and their aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub flags: Flags,
    pub label: String,
    pub train: SplitCounts,
    pub dev: SplitCounts,
    pub test: SplitCounts,
    pub aggregate: AggregateReport,
    pub seeds: Vec<SeedRun>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub config: BTreeMap<String, String>,
    pub inputs: BTreeMap<String, String>,
    pub warnings: Vec<String>,
    pub run: RunReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub flags: Flags,
    pub label: String,
    pub report: Option<RunReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub config: BTreeMap<String, String>,
    pub inputs: BTreeMap<String, String>,
    pub warnings: Vec<String>,
    pub rows: Vec<GridRow>,
}

fn hash_input(inputs: &mut BTreeMap<String, String>, key: &str, path: &Path) -> Result<()> {
    inputs.insert(key.to_string(), file_hash(path)?);
    Ok(())
}

/// Loads or builds the instance splits and applies test annotations.
pub fn prepare_data(config: &ExperimentConfig) -> Result<PreparedData> {
    let p = &config.paths;
    let mut inputs = BTreeMap::new();
    for (key, path) in [
        ("data.articles", &p.articles),
        ("data.triples", &p.triples),
        ("data.instances", &p.instances),
        ("data.train", &p.train),
        ("data.dev", &p.dev),
        ("data.test", &p.test),
        ("data.embeddings", &p.embeddings),
        ("data.lexicon", &p.lexicon),
        ("data.annotations", &p.annotations),
        ("data.definitional_pairs", &p.definitional_pairs),
        ("data.gendered_words", &p.gendered_words),
    ] {
        if let Some(path) = path {
            hash_input(&mut inputs, key, path).map_err(|e| e.in_stage("load"))?;
        }
    }

    let mut warnings = Vec::new();
    let (train, dev, mut test) = if let (Some(tr), Some(dv), Some(te)) = (&p.train, &p.dev, &p.test) {
        let load = |path: &Path, name| -> Result<DatasetSplit> {
            Ok(DatasetSplit::new(name, read_jsonl::<Instance>(path)?))
        };
        let splits = (
            load(tr, SplitName::Train),
            load(dv, SplitName::Dev),
            load(te, SplitName::Test),
        );
        (
            splits.0.map_err(|e| e.in_stage("load"))?,
            splits.1.map_err(|e| e.in_stage("load"))?,
            splits.2.map_err(|e| e.in_stage("load"))?,
        )
    } else {
        let instances = load_instances(config)?;
        let out = split_by_head(&instances, config.ratios, config.split_seed).map_err(|e| e.in_stage("split"))?;
        warnings.extend(out.warnings);
        (out.train, out.dev, out.test)
    };

    if let Some(path) = &p.annotations {
        let annotations = read_annotations(path).map_err(|e| e.in_stage("annotate"))?;
        let outcome = apply_test_annotations(&test, &annotations).map_err(|e| e.in_stage("annotate"))?;
        info!("annotations relabeled {} test instances as NA", outcome.relabeled);
        if !outcome.skipped_ids.is_empty() {
            warnings.push(format!(
                "{} annotated ids are not in the test split",
                outcome.skipped_ids.len()
            ));
        }
        test = outcome.split;
    }
    Ok(PreparedData { train, dev, test, warnings, inputs })
}

fn load_instances(config: &ExperimentConfig) -> Result<Vec<Instance>> {
    let p = &config.paths;
    if let Some(path) = &p.instances {
        return read_jsonl(path).map_err(|e| e.in_stage("load"));
    }
    match (&p.articles, &p.triples) {
        (Some(a), Some(t)) => {
            let articles = read_articles(a).map_err(|e| e.in_stage("load"))?;
            let triples = read_triples(t).map_err(|e| e.in_stage("load"))?;
            let out = align_distant(&articles, &triples, config.match_mode, config.segmentation);
            if !out.skipped.is_empty() {
                info!("{} triples skipped during alignment", out.skipped.len());
            }
            Ok(out.instances)
        }
        _ => Err(Error::config(
            "no input data: set data.instances, data.train/dev/test, or data.articles and data.triples",
        )),
    }
}

/// Train/dev splits after equalization and augmentation, plus the word
/// embeddings trained (or loaded) for them.
#[derive(Debug, Clone)]
pub struct TrainingData {
    pub train: DatasetSplit,
    pub dev: DatasetSplit,
    pub embeddings: EmbeddingMatrix,
}

/// Loads the swap lexicon named in the configuration, or the built-in one.
pub fn load_lexicon(config: &ExperimentConfig) -> Result<(SwapLexicon, Vec<String>)> {
    match &config.paths.lexicon {
        Some(path) => SwapLexicon::read(path, config.lexicon_policy),
        None => Ok((SwapLexicon::default_lexicon(), Vec::new())),
    }
}

/// Trains skip-gram embeddings on the given training instances.
pub fn embeddings_for(train: &[Instance], config: &ExperimentConfig) -> Result<EmbeddingMatrix> {
    let vocab = Vocabulary::from_instances(train, config.min_count)?;
    train_sgns(train.iter().map(|i| i.tokens.as_slice()), &vocab, &config.embedding)
}

pub fn training_data(
    data: &PreparedData,
    config: &ExperimentConfig,
    equalize: bool,
    augment: bool,
) -> Result<TrainingData> {
    let (mut train, mut dev) = (data.train.clone(), data.dev.clone());
    if equalize {
        train = equalize_split(&train, config.split_seed).map_err(|e| e.in_stage("equalize"))?;
        dev = equalize_split(&dev, config.split_seed).map_err(|e| e.in_stage("equalize"))?;
    }
    if augment {
        let (lexicon, _) = load_lexicon(config).map_err(|e| e.in_stage("augment"))?;
        train = augment_split(&train, &lexicon, config.flip_gender);
    }
    let embeddings = match &config.paths.embeddings {
        Some(path) => EmbeddingMatrix::read(path),
        None => embeddings_for(&train.instances, config),
    }
    .map_err(|e| e.in_stage("embeddings"))?;
    Ok(TrainingData { train, dev, embeddings })
}

/// Hard-debiases with the configured (or built-in) word lists.
pub fn debias_with(matrix: &EmbeddingMatrix, config: &ExperimentConfig) -> Result<EmbeddingMatrix> {
    let pairs = match &config.paths.definitional_pairs {
        Some(path) => parse_pairs(&read_to_string(path)?),
        None => default_definitional_pairs(),
    };
    let gendered = match &config.paths.gendered_words {
        Some(path) => parse_words(&read_to_string(path)?),
        None => default_gendered_words(),
    };
    let direction = gender_direction(matrix, &pairs)?;
    hard_debias(matrix, &direction, &gendered, &pairs)
}

fn run_with(
    data: &PreparedData,
    config: &ExperimentConfig,
    flags: Flags,
    prepared: &TrainingData,
) -> Result<RunReport> {
    let debiased;
    let embeddings = if flags.debias {
        debiased = debias_with(&prepared.embeddings, config).map_err(|e| e.in_stage("debias"))?;
        &debiased
    } else {
        &prepared.embeddings
    };
    info!(
        "[{}] training {} seeds on {} train / {} dev instances",
        flags.label(),
        config.seeds.len(),
        prepared.train.len(),
        prepared.dev.len()
    );
    let seeds: Vec<SeedRun> = config
        .seeds
        .par_iter()
        .map(|&seed| -> Result<SeedRun> {
            let model_config = config.model_for_seed(seed);
            let (model, report) =
                train_model(&prepared.train.instances, &prepared.dev.instances, embeddings, &model_config)
                    .map_err(|e| e.in_stage("train"))?;
            let records = predict(&model, &data.test.instances).map_err(|e| e.in_stage("predict"))?;
            let metrics = performance_parity(&records).map_err(|e| e.in_stage("metrics"))?;
            Ok(SeedRun {
                seed,
                best_epoch: report.best_epoch,
                epochs_run: report.epoch_losses.len(),
                metrics,
            })
        })
        .collect::<Result<_>>()?;
    let reports: Vec<MetricsReport> = seeds.iter().map(|s| s.metrics.clone()).collect();
    let aggregate = aggregate_runs(&reports).map_err(|e| e.in_stage("aggregate"))?;
    Ok(RunReport {
        flags,
        label: flags.label(),
        train: SplitCounts::of(&prepared.train),
        dev: SplitCounts::of(&prepared.dev),
        test: SplitCounts::of(&data.test),
        aggregate,
        seeds,
    })
}

/// Runs one flag combination on already prepared splits.
pub fn run_flags(data: &PreparedData, config: &ExperimentConfig, flags: Flags) -> Result<RunReport> {
    let prepared = training_data(data, config, flags.equalize, flags.augment)?;
    run_with(data, config, flags, &prepared)
}

/// Full pipeline for the flags set in `config`.
pub fn run_pipeline(config: &ExperimentConfig) -> Result<PipelineReport> {
    config.validate()?;
    let data = prepare_data(config)?;
    let run = run_flags(&data, config, config.flags)?;
    Ok(PipelineReport {
        config: config.resolved(),
        inputs: data.inputs,
        warnings: data.warnings,
        run,
    })
}

/// All eight flag combinations on shared splits and seeds. The flags in
/// `config` are ignored; a failing row is recorded and the rest continue.
pub fn run_grid(config: &ExperimentConfig) -> Result<GridReport> {
    config.validate()?;
    let data = prepare_data(config)?;
    // Embeddings depend only on equalization and augmentation, so the four
    // distinct training sets are built once and shared by debiased rows.
    let variants: Vec<((bool, bool), std::result::Result<TrainingData, String>)> = [
        (false, false),
        (true, false),
        (false, true),
        (true, true),
    ]
    .into_par_iter()
    .map(|(e, a)| ((e, a), training_data(&data, config, e, a).map_err(|err| err.to_string())))
    .collect();
    let lookup = |flags: Flags| {
        &variants
            .iter()
            .find(|(k, _)| *k == (flags.equalize, flags.augment))
            .expect("all four variants built")
            .1
    };
    let rows: Vec<GridRow> = Flags::grid()
        .into_par_iter()
        .map(|flags| {
            let outcome = match lookup(flags) {
                Ok(prepared) => run_with(&data, config, flags, prepared).map_err(|e| e.to_string()),
                Err(msg) => Err(msg.clone()),
            };
            let (report, error) = match outcome {
                Ok(r) => (Some(r), None),
                Err(msg) => (None, Some(msg)),
            };
            GridRow { flags, label: flags.label(), report, error }
        })
        .collect();
    Ok(GridReport {
        config: config.resolved(),
        inputs: data.inputs,
        warnings: data.warnings,
        rows,
    })
}

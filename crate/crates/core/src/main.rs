use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Args, Command, FromArgMatches, Parser, Subcommand};
use log::{info, warn};

use relbias::augmentation::augment_split;
use relbias::corpus::{
    align_distant, corpus_stats, format_triples, read_annotations, read_articles, read_triples, DatasetSplit,
    SplitName,
};
use relbias::embeddings::EmbeddingMatrix;
use relbias::error::{Error, Result};
use relbias::experiments::{
    debias_with, embeddings_for, emit_report, generate, load_lexicon, prepare_data, run_grid, run_pipeline,
    write_all, EvaluationReport, ExperimentConfig, ReportFormat, SplitCounts, SyntheticConfig, KEYS,
};
use relbias::io::{file_hash, read_jsonl, read_to_string, write_jsonl};
use relbias::metrics::{aggregate_runs, fleiss_kappa, performance_parity, PredictionRecord};
use relbias::model::{predict, read_checkpoint, train_model, write_checkpoint};
use relbias::Instance;

/// Gender-bias measurement and mitigation for neural relation extraction.
#[derive(Parser)]
#[command(name = "relbias", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Align articles with triples and split the instances by head entity.
    BuildCorpus {
        #[command(flatten)]
        config: ConfigArgs,
        /// Directory for train/dev/test instance files.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Train skip-gram embeddings on an instance file.
    TrainEmbeddings {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hard-debias an embedding file.
    DebiasEmbeddings {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Append gender-swapped copies to an instance file.
    Augment {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one model (first configured seed) and write a checkpoint.
    Train {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict relations for an instance file with a checkpoint.
    Predict {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score one or more prediction files (one run each) and aggregate.
    Evaluate {
        #[arg(long, required = true, num_args = 1..)]
        records: Vec<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the full pipeline for the configured flags.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run all eight mitigation combinations.
    Grid {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fleiss' kappa from a count table or an annotation file.
    Kappa {
        /// Whitespace-separated category counts, one item per line.
        #[arg(long, conflicts_with = "annotations", required_unless_present = "annotations")]
        table: Option<PathBuf>,
        /// Annotation JSON lines; yes/no votes become the two categories.
        #[arg(long)]
        annotations: Option<PathBuf>,
    },
    /// Relation distribution per gender of an instance file.
    Stats {
        #[arg(long)]
        input: PathBuf,
    },
    /// Write a planted-bias synthetic corpus (articles and triples).
    GenSynthetic {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = SyntheticConfig::default().entities)]
        entities: usize,
        #[arg(long, default_value_t = SyntheticConfig::default().female_fraction)]
        female_fraction: f64,
        #[arg(long, default_value_t = SyntheticConfig::default().spouse_trigger_male)]
        spouse_trigger_male: f64,
        #[arg(long, default_value_t = SyntheticConfig::default().spouse_trigger_female)]
        spouse_trigger_female: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct OutputArgs {
    /// Output directory; defaults to data.output or the current directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Report formats: json, csv, tsv-plotdata.
    #[arg(long, value_delimiter = ',', default_value = "json,csv,tsv-plotdata")]
    format: Vec<String>,
}

impl OutputArgs {
    fn formats(&self) -> Result<Vec<ReportFormat>> {
        self.format.iter().map(|f| f.parse()).collect()
    }

    fn dir(&self, config: Option<&ExperimentConfig>) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| config.and_then(|c| c.paths.output.clone()))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

/// `--config FILE`, one `--<key> VALUE` flag per configuration key, and a
/// few boolean shortcuts.
#[derive(Default)]
struct ConfigArgs {
    file: Option<PathBuf>,
    overrides: Vec<(String, String)>,
}

const SHORTCUTS: &[(&str, &str, &str, &str)] = &[
    ("equalize", "run.equalize", "true", "equalize gender counts in train and dev"),
    ("debias", "run.debias", "true", "hard-debias the word embeddings"),
    ("augment", "run.augment", "true", "add gender-swapped copies of train"),
    ("no-flip-gender", "run.flip_gender", "false", "keep the original gender label on swapped copies"),
    ("first-wins", "run.first_wins", "true", "resolve lexicon conflicts by keeping the first pair"),
    ("freeze-embeddings", "model.freeze_embeddings", "true", "keep word embeddings fixed during training"),
    ("per-sentence", "model.per_sentence", "true", "treat every instance as its own bag"),
];

impl FromArgMatches for ConfigArgs {
    fn from_arg_matches(m: &ArgMatches) -> std::result::Result<Self, clap::Error> {
        let mut args = ConfigArgs::default();
        args.update_from_arg_matches(m)?;
        Ok(args)
    }

    fn update_from_arg_matches(&mut self, m: &ArgMatches) -> std::result::Result<(), clap::Error> {
        self.file = m.get_one::<PathBuf>("config").cloned();
        for (flag, key, value, _) in SHORTCUTS {
            if m.get_flag(flag) {
                self.overrides.push((key.to_string(), value.to_string()));
            }
        }
        // Explicit key flags come after the shortcuts so they win.
        for (key, _) in KEYS {
            if let Some(v) = m.get_one::<String>(key) {
                self.overrides.push((key.to_string(), v.clone()));
            }
        }
        Ok(())
    }
}

impl Args for ConfigArgs {
    fn augment_args(cmd: Command) -> Command {
        let mut cmd = cmd.arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .value_parser(clap::value_parser!(PathBuf))
                .help("key = value configuration file"),
        );
        for (flag, _, _, help) in SHORTCUTS {
            cmd = cmd.arg(Arg::new(*flag).long(*flag).action(ArgAction::SetTrue).help(*help));
        }
        for (key, help) in KEYS {
            cmd = cmd.arg(Arg::new(*key).long(*key).value_name("VALUE").help(*help));
        }
        cmd
    }

    fn augment_args_for_update(cmd: Command) -> Command {
        Self::augment_args(cmd)
    }
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.file {
            Some(path) => ExperimentConfig::read(path)?,
            None => ExperimentConfig::default(),
        };
        for (k, v) in &self.overrides {
            config.set(k, v)?;
        }
        config.validate()?;
        Ok(config)
    }
}

fn read_split(path: &Path, name: SplitName) -> Result<DatasetSplit> {
    Ok(DatasetSplit::new(name, read_jsonl::<Instance>(path)?))
}

fn build_corpus(config: &ExperimentConfig, out_dir: &Path) -> Result<()> {
    let data = prepare_data(config)?;
    for w in &data.warnings {
        warn!("{w}");
    }
    if let (Some(a), Some(t)) = (&config.paths.articles, &config.paths.triples) {
        // Re-run alignment only to report the skipped triples.
        let out = align_distant(&read_articles(a)?, &read_triples(t)?, config.match_mode, config.segmentation);
        write_jsonl(&out_dir.join("skipped_triples.jsonl"), &out.skipped)?;
    }
    for split in [&data.train, &data.dev, &data.test] {
        let counts = SplitCounts::of(split);
        info!("{}: {} male, {} female", split.name.as_str(), counts.male, counts.female);
        write_jsonl(&out_dir.join(format!("{}.jsonl", split.name.as_str())), &split.instances)?;
    }
    Ok(())
}

fn train_cmd(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let p = &config.paths;
    let (Some(train_path), Some(dev_path)) = (&p.train, &p.dev) else {
        return Err(Error::config("train needs data.train and data.dev"));
    };
    let train = read_split(train_path, SplitName::Train)?;
    let dev = read_split(dev_path, SplitName::Dev)?;
    let mut embeddings = match &p.embeddings {
        Some(path) => EmbeddingMatrix::read(path)?,
        None => embeddings_for(&train.instances, config)?,
    };
    if config.flags.debias {
        embeddings = debias_with(&embeddings, config)?;
    }
    let model_config = config.model_for_seed(config.seeds[0]);
    let (model, report) = train_model(&train.instances, &dev.instances, &embeddings, &model_config)?;
    info!(
        "trained {} epochs; kept epoch {} (dev macro F1 {:?})",
        report.epoch_losses.len(),
        report.best_epoch,
        report.dev_f1.get(report.best_epoch.saturating_sub(1))
    );
    write_checkpoint(&model, out)
}

fn evaluate(records: &[PathBuf], output: &OutputArgs) -> Result<()> {
    let mut inputs = BTreeMap::new();
    let mut runs = Vec::new();
    for (i, path) in records.iter().enumerate() {
        inputs.insert(format!("records.{i}"), file_hash(path)?);
        runs.push(performance_parity(&read_jsonl::<PredictionRecord>(path)?)?);
    }
    let aggregate = aggregate_runs(&runs)?;
    let report = EvaluationReport { inputs, runs, aggregate };
    for p in emit_report(&report, &output.formats()?, &output.dir(None), "evaluation")? {
        println!("{}", p.display());
    }
    Ok(())
}

fn kappa(table: Option<&Path>, annotations: Option<&Path>) -> Result<f64> {
    let rows: Vec<Vec<usize>> = match (table, annotations) {
        (Some(path), _) => read_to_string(path)?
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|(n, l)| {
                l.split_whitespace()
                    .map(|x| {
                        x.parse().map_err(|_| Error::Parse {
                            path: path.to_path_buf(),
                            line: n + 1,
                            message: format!("not a count: `{x}`"),
                        })
                    })
                    .collect()
            })
            .collect::<Result<_>>()?,
        (None, Some(path)) => read_annotations(path)?
            .values()
            .map(|votes| {
                let yes = votes.iter().filter(|v| **v == relbias::corpus::Vote::Yes).count();
                vec![yes, votes.len() - yes]
            })
            .collect(),
        (None, None) => return Err(Error::config("kappa needs --table or --annotations")),
    };
    fleiss_kappa(&rows)
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::BuildCorpus { config, out_dir } => build_corpus(&config.resolve()?, &out_dir),
        Cmd::TrainEmbeddings { config, input, out } => {
            let config = config.resolve()?;
            let instances: Vec<Instance> = read_jsonl(&input)?;
            embeddings_for(&instances, &config)?.write(&out)
        }
        Cmd::DebiasEmbeddings { config, input, out } => {
            let config = config.resolve()?;
            debias_with(&EmbeddingMatrix::read(&input)?, &config)?.write(&out)
        }
        Cmd::Augment { config, input, out } => {
            let config = config.resolve()?;
            let (lexicon, warnings) = load_lexicon(&config)?;
            for w in warnings {
                warn!("{w}");
            }
            let split = read_split(&input, SplitName::Train)?;
            write_jsonl(&out, &augment_split(&split, &lexicon, config.flip_gender).instances)
        }
        Cmd::Train { config, out } => train_cmd(&config.resolve()?, &out),
        Cmd::Predict { checkpoint, input, out } => {
            let model = read_checkpoint(&checkpoint)?;
            let instances: Vec<Instance> = read_jsonl(&input)?;
            write_jsonl(&out, &predict(&model, &instances)?)
        }
        Cmd::Evaluate { records, output } => evaluate(&records, &output),
        Cmd::Run { config, output } => {
            let config = config.resolve()?;
            let formats = output.formats()?;
            let report = run_pipeline(&config)?;
            for p in emit_report(&report, &formats, &output.dir(Some(&config)), "report")? {
                println!("{}", p.display());
            }
            Ok(())
        }
        Cmd::Grid { config, output } => {
            let config = config.resolve()?;
            let formats = output.formats()?;
            let report = run_grid(&config)?;
            for row in &report.rows {
                if let Some(e) = &row.error {
                    warn!("row {} failed: {e}", row.label);
                }
            }
            for p in emit_report(&report, &formats, &output.dir(Some(&config)), "grid")? {
                println!("{}", p.display());
            }
            Ok(())
        }
        Cmd::Kappa { table, annotations } => {
            println!("{}", kappa(table.as_deref(), annotations.as_deref())?);
            Ok(())
        }
        Cmd::Stats { input } => {
            let instances: Vec<Instance> = read_jsonl(&input)?;
            let text = serde_json::to_string_pretty(&corpus_stats(&instances)).expect("stats serialize");
            println!("{text}");
            Ok(())
        }
        Cmd::GenSynthetic {
            out_dir,
            entities,
            female_fraction,
            spouse_trigger_male,
            spouse_trigger_female,
            seed,
        } => {
            let corpus = generate(&SyntheticConfig {
                entities,
                female_fraction,
                spouse_trigger_male,
                spouse_trigger_female,
                seed,
            })?;
            let mut articles = String::new();
            for a in &corpus.articles {
                articles.push_str(&serde_json::to_string(a).expect("article serializes"));
                articles.push('\n');
            }
            write_all(&[
                (out_dir.join("articles.jsonl"), articles),
                (out_dir.join("triples.tsv"), format_triples(&corpus.triples)),
            ])?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

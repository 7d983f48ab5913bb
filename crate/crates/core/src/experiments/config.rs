//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::augmentation::ConflictPolicy;
use crate::corpus::{MatchMode, Segmentation};
use crate::embeddings::SgnsConfig;
use crate::error::{Error, Result};
use crate::model::{Encoder, ModelConfig, Selector};

/// The three mitigation switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Flags {
    pub equalize: bool,
    pub debias: bool,
    pub augment: bool,
}

impl Flags {
    pub fn new(equalize: bool, debias: bool, augment: bool) -> Self {
        Flags { equalize, debias, augment }
    }

    /// The eight combinations in grid order: none, single flags, pairs, all.
    pub fn grid() -> [Flags; 8] {
        [
            Flags::new(false, false, false),
            Flags::new(true, false, false),
            Flags::new(false, true, false),
            Flags::new(false, false, true),
            Flags::new(true, true, false),
            Flags::new(true, false, true),
            Flags::new(false, true, true),
            Flags::new(true, true, true),
        ]
    }

    /// Short tag such as `E,D`; `-` when no flag is set.
    pub fn label(&self) -> String {
        let parts: Vec<&str> = [(self.equalize, "E"), (self.debias, "D"), (self.augment, "A")]
            .into_iter()
            .filter_map(|(on, s)| on.then_some(s))
            .collect();
        if parts.is_empty() {
            "-".into()
        } else {
            parts.join(",")
        }
    }
}

/// Input and output locations. Unset inputs fall back to built-in data
/// where one exists.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Paths {
    pub articles: Option<PathBuf>,
    pub triples: Option<PathBuf>,
    /// A single instance file to be split by head.
    pub instances: Option<PathBuf>,
    /// Pre-split instance files; all three must be given together.
    pub train: Option<PathBuf>,
    pub dev: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub definitional_pairs: Option<PathBuf>,
    pub gendered_words: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub embedding: SgnsConfig,
    pub min_count: u64,
    pub model: ModelConfig,
    pub seeds: Vec<u64>,
    pub flags: Flags,
    /// Flip the gender label of swapped copies.
    pub flip_gender: bool,
    pub lexicon_policy: ConflictPolicy,
    pub match_mode: MatchMode,
    pub segmentation: Segmentation,
    pub ratios: [f64; 3],
    /// Seed for splitting and equalization.
    pub split_seed: u64,
    pub paths: Paths,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            embedding: SgnsConfig::default(),
            min_count: 5,
            model: ModelConfig::default(),
            seeds: vec![0, 1, 2, 3, 4],
            flags: Flags::default(),
            flip_gender: true,
            lexicon_policy: ConflictPolicy::Strict,
            match_mode: MatchMode::AnyToken,
            segmentation: Segmentation::Rules,
            ratios: [0.8, 0.1, 0.1],
            split_seed: 0,
            paths: Paths::default(),
        }
    }
}

/// Every recognized key with a one-line description, in canonical order.
pub const KEYS: &[(&str, &str)] = &[
    ("embedding.dim", "embedding dimension"),
    ("embedding.window", "skip-gram context window"),
    ("embedding.negatives", "negative samples per pair"),
    ("embedding.epochs", "skip-gram epochs"),
    ("embedding.min_count", "minimum token count for the vocabulary"),
    ("embedding.lr", "initial skip-gram learning rate"),
    ("embedding.subsample", "frequent-word subsampling threshold (0 disables)"),
    ("embedding.seed", "skip-gram seed"),
    ("model.encoder", "cnn or pcnn"),
    ("model.selector", "att or ave"),
    ("model.word_dim", "word embedding dimension"),
    ("model.pos_dim", "position embedding dimension"),
    ("model.max_len", "maximum sentence length"),
    ("model.max_rel_pos", "relative position clip"),
    ("model.filters", "number of convolution filters"),
    ("model.window", "convolution window"),
    ("model.dropout", "dropout probability"),
    ("model.per_sentence", "treat every instance as its own bag"),
    ("model.freeze_embeddings", "keep the word embeddings fixed"),
    ("train.lr", "SGD learning rate"),
    ("train.batch", "mini-batch size in bags"),
    ("train.epochs", "maximum epochs"),
    ("train.patience", "early-stopping patience in epochs"),
    ("run.seeds", "comma-separated model seeds"),
    ("run.equalize", "equalize gender counts in train and dev"),
    ("run.debias", "hard-debias the word embeddings"),
    ("run.augment", "add gender-swapped copies of train"),
    ("run.flip_gender", "flip the gender label of swapped copies"),
    ("run.first_wins", "resolve lexicon conflicts by keeping the first pair"),
    ("corpus.match_mode", "full or any-token"),
    ("corpus.segmentation", "rules or lines"),
    ("corpus.ratios", "train,dev,test split ratios"),
    ("corpus.seed", "split and equalization seed"),
    ("data.articles", "entity articles (JSON lines)"),
    ("data.triples", "knowledge triples (TSV)"),
    ("data.instances", "instances to split (JSON lines)"),
    ("data.train", "pre-split train instances"),
    ("data.dev", "pre-split dev instances"),
    ("data.test", "pre-split test instances"),
    ("data.embeddings", "pretrained embeddings instead of training them"),
    ("data.lexicon", "gender swap lexicon (TSV)"),
    ("data.annotations", "test-set annotations (JSON lines)"),
    ("data.definitional_pairs", "definitional pairs for the gender direction (TSV)"),
    ("data.gendered_words", "words exempt from neutralization"),
    ("data.output", "output directory"),
];

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("{key}: cannot parse `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::config(format!("{key}: expected a boolean, got `{value}`"))),
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

fn path_opt(p: &Option<PathBuf>) -> String {
    p.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Sets one key from its textual value. An empty value clears a path.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let path = || (!v.is_empty()).then(|| PathBuf::from(v));
        match key {
            "embedding.dim" => self.embedding.dim = parse_num(key, v)?,
            "embedding.window" => self.embedding.window = parse_num(key, v)?,
            "embedding.negatives" => self.embedding.negatives = parse_num(key, v)?,
            "embedding.epochs" => self.embedding.epochs = parse_num(key, v)?,
            "embedding.min_count" => self.min_count = parse_num(key, v)?,
            "embedding.lr" => self.embedding.initial_lr = parse_num(key, v)?,
            "embedding.subsample" => self.embedding.subsample_t = parse_num(key, v)?,
            "embedding.seed" => self.embedding.seed = parse_num(key, v)?,
            "model.encoder" => self.model.encoder = v.parse::<Encoder>()?,
            "model.selector" => self.model.selector = v.parse::<Selector>()?,
            "model.word_dim" => self.model.word_dim = parse_num(key, v)?,
            "model.pos_dim" => self.model.pos_dim = parse_num(key, v)?,
            "model.max_len" => self.model.max_len = parse_num(key, v)?,
            "model.max_rel_pos" => self.model.max_rel_pos = parse_num(key, v)?,
            "model.filters" => self.model.n_filters = parse_num(key, v)?,
            "model.window" => self.model.conv_window = parse_num(key, v)?,
            "model.dropout" => self.model.dropout_p = parse_num(key, v)?,
            "model.per_sentence" => self.model.per_sentence = parse_bool(key, v)?,
            "model.freeze_embeddings" => self.model.freeze_embeddings = parse_bool(key, v)?,
            "train.lr" => self.model.lr = parse_num(key, v)?,
            "train.batch" => self.model.batch_size = parse_num(key, v)?,
            "train.epochs" => self.model.max_epochs = parse_num(key, v)?,
            "train.patience" => self.model.patience = parse_num(key, v)?,
            "run.seeds" => self.seeds = parse_list(key, v)?,
            "run.equalize" => self.flags.equalize = parse_bool(key, v)?,
            "run.debias" => self.flags.debias = parse_bool(key, v)?,
            "run.augment" => self.flags.augment = parse_bool(key, v)?,
            "run.flip_gender" => self.flip_gender = parse_bool(key, v)?,
            "run.first_wins" => {
                self.lexicon_policy = if parse_bool(key, v)? {
                    ConflictPolicy::FirstWins
                } else {
                    ConflictPolicy::Strict
                }
            }
            "corpus.match_mode" => self.match_mode = v.parse::<MatchMode>()?,
            "corpus.segmentation" => {
                self.segmentation = match v {
                    "rules" => Segmentation::Rules,
                    "lines" => Segmentation::Lines,
                    _ => return Err(Error::config(format!("{key}: expected rules or lines, got `{v}`"))),
                }
            }
            "corpus.ratios" => {
                let r: Vec<f64> = parse_list(key, v)?;
                self.ratios = r
                    .try_into()
                    .map_err(|_| Error::config(format!("{key}: expected three comma-separated ratios")))?;
            }
            "corpus.seed" => self.split_seed = parse_num(key, v)?,
            "data.articles" => self.paths.articles = path(),
            "data.triples" => self.paths.triples = path(),
            "data.instances" => self.paths.instances = path(),
            "data.train" => self.paths.train = path(),
            "data.dev" => self.paths.dev = path(),
            "data.test" => self.paths.test = path(),
            "data.embeddings" => self.paths.embeddings = path(),
            "data.lexicon" => self.paths.lexicon = path(),
            "data.annotations" => self.paths.annotations = path(),
            "data.definitional_pairs" => self.paths.definitional_pairs = path(),
            "data.gendered_words" => self.paths.gendered_words = path(),
            "data.output" => self.paths.output = path(),
            _ => return Err(Error::config(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = ExperimentConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected `key = value`", n + 1)))?;
            config
                .set(key.trim(), value)
                .map_err(|e| Error::config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(config)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Resolved value of every key, in the order of [`KEYS`].
    pub fn entries(&self) -> Vec<(String, String)> {
        let e = &self.embedding;
        let m = &self.model;
        let p = &self.paths;
        let values = [
            e.dim.to_string(),
            e.window.to_string(),
            e.negatives.to_string(),
            e.epochs.to_string(),
            self.min_count.to_string(),
            e.initial_lr.to_string(),
            e.subsample_t.to_string(),
            e.seed.to_string(),
            match m.encoder {
                Encoder::Cnn => "cnn".into(),
                Encoder::Pcnn => "pcnn".into(),
            },
            match m.selector {
                Selector::Att => "att".into(),
                Selector::Ave => "ave".into(),
            },
            m.word_dim.to_string(),
            m.pos_dim.to_string(),
            m.max_len.to_string(),
            m.max_rel_pos.to_string(),
            m.n_filters.to_string(),
            m.conv_window.to_string(),
            m.dropout_p.to_string(),
            m.per_sentence.to_string(),
            m.freeze_embeddings.to_string(),
            m.lr.to_string(),
            m.batch_size.to_string(),
            m.max_epochs.to_string(),
            m.patience.to_string(),
            join(&self.seeds),
            self.flags.equalize.to_string(),
            self.flags.debias.to_string(),
            self.flags.augment.to_string(),
            self.flip_gender.to_string(),
            (self.lexicon_policy == ConflictPolicy::FirstWins).to_string(),
            match self.match_mode {
                MatchMode::Full => "full".into(),
                MatchMode::AnyToken => "any-token".into(),
            },
            match self.segmentation {
                Segmentation::Rules => "rules".into(),
                Segmentation::Lines => "lines".into(),
            },
            join(&self.ratios),
            self.split_seed.to_string(),
            path_opt(&p.articles),
            path_opt(&p.triples),
            path_opt(&p.instances),
            path_opt(&p.train),
            path_opt(&p.dev),
            path_opt(&p.test),
            path_opt(&p.embeddings),
            path_opt(&p.lexicon),
            path_opt(&p.annotations),
            path_opt(&p.definitional_pairs),
            path_opt(&p.gendered_words),
            path_opt(&p.output),
        ];
        KEYS.iter().zip(values).map(|((k, _), v)| (k.to_string(), v)).collect()
    }

    /// The resolved configuration as a sorted map, for provenance.
    pub fn resolved(&self) -> BTreeMap<String, String> {
        self.entries().into_iter().collect()
    }

    /// Renders the configuration in the file format accepted by [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        self.entries().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.embedding.validate()?;
        self.model.validate()?;
        if self.min_count < 1 {
            return Err(Error::config("embedding.min_count must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("run.seeds must not be empty"));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return Err(Error::config("run.seeds must be distinct"));
        }
        if self.paths.embeddings.is_none() && self.embedding.dim != self.model.word_dim {
            return Err(Error::config(format!(
                "embedding.dim ({}) must equal model.word_dim ({})",
                self.embedding.dim, self.model.word_dim
            )));
        }
        let sum: f64 = self.ratios.iter().sum();
        if self.ratios.iter().any(|r| !(0.0..=1.0).contains(r)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::config("corpus.ratios must be non-negative and sum to 1"));
        }
        let p = &self.paths;
        let presplit = [&p.train, &p.dev, &p.test].iter().filter(|x| x.is_some()).count();
        if presplit != 0 && presplit != 3 {
            return Err(Error::config("data.train, data.dev and data.test must be given together"));
        }
        Ok(())
    }

    /// Model configuration for one seed.
    pub fn model_for_seed(&self, seed: u64) -> ModelConfig {
        ModelConfig { seed, ..self.model.clone() }
    }
}

#![allow(dead_code)]

pub mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relbias::embeddings::Vocabulary;
use relbias::model::{build_bags, Bag, Encoder, ModelConfig, Parameters, Selector};
use relbias::{Gender, Instance, Relation};

pub fn small_config(encoder: Encoder, selector: Selector) -> ModelConfig {
    ModelConfig {
        encoder,
        selector,
        word_dim: 4,
        pos_dim: 2,
        max_len: 9,
        max_rel_pos: 4,
        n_filters: 3,
        conv_window: 3,
        dropout_p: 0.0,
        ..Default::default()
    }
}

pub fn small_vocab() -> Vocabulary {
    Vocabulary::from_words((0..8).map(|i| (format!("w{i}"), 8 - i)).collect()).unwrap()
}

pub fn random_params(config: &ModelConfig, vocab_len: usize, rng: &mut ChaCha8Rng) -> Parameters {
    let mut p = Parameters::zeros(config, vocab_len);
    for (_, t) in p.groups_mut() {
        for v in t.data.iter_mut() {
            *v = rng.gen_range(-0.5..0.5);
        }
    }
    p
}

pub fn random_instance(id: usize, head: &str, rng: &mut ChaCha8Rng) -> Instance {
    let len = rng.gen_range(3..=11);
    Instance {
        instance_id: format!("i{id}"),
        head_id: head.to_string(),
        tail_surface: "tail".into(),
        relation: Relation::ALL[rng.gen_range(0..5)],
        gender: Gender::Male,
        tokens: (0..len).map(|_| format!("w{}", rng.gen_range(0..10))).collect(),
        head_anchor: rng.gen_range(0..len),
        tail_anchor: rng.gen_range(0..len),
    }
}

/// A bag of 1-3 random sentences with a random gold relation.
pub fn random_bag(seed: u64, config: &ModelConfig, vocab: &Vocabulary) -> Bag {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=3);
    let gold = Relation::ALL[rng.gen_range(0..5)];
    let instances: Vec<Instance> = (0..n)
        .map(|i| {
            let mut inst = random_instance(i, "h", &mut rng);
            inst.relation = gold;
            inst
        })
        .collect();
    let mut bags = build_bags(&instances, vocab, config).unwrap();
    assert_eq!(bags.len(), 1);
    bags.pop().unwrap()
}

/// Random sentences over a small vocabulary that mixes the definitional
/// gender words with neutral filler. Gendered words co-occur with
/// gender-specific context words so a gender direction exists.
pub fn gendered_corpus(sentences: usize, seed: u64) -> Vec<Vec<String>> {
    const FEMALE: &[&str] = &["she", "her", "woman", "mary", "herself", "daughter", "mother", "gal", "girl", "female"];
    const MALE: &[&str] = &["he", "his", "man", "john", "himself", "son", "father", "guy", "boy", "male"];
    const NEUTRAL: &[&str] = &[
        "doctor", "nurse", "engineer", "teacher", "city", "river", "book", "music", "science", "garden", "house",
        "table", "window", "market", "school", "painting", "travel", "weather", "history", "kitchen",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..sentences)
        .map(|_| {
            let len = rng.gen_range(6..=12);
            let side = rng.gen_bool(0.5);
            (0..len)
                .map(|_| {
                    let roll: f64 = rng.gen();
                    let word = if roll < 0.3 {
                        let list = if side { FEMALE } else { MALE };
                        list[rng.gen_range(0..list.len())]
                    } else {
                        NEUTRAL[rng.gen_range(0..NEUTRAL.len())]
                    };
                    word.to_string()
                })
                .collect()
        })
        .collect()
}

/// Writes a planted-bias synthetic corpus into `dir` and returns the
/// article and triple paths.
pub fn write_synthetic(
    dir: &std::path::Path,
    config: &relbias::experiments::SyntheticConfig,
) -> (std::path::PathBuf, std::path::PathBuf) {
    let corpus = relbias::experiments::generate(config).unwrap();
    let articles = dir.join("articles.jsonl");
    let triples = dir.join("triples.tsv");
    relbias::io::write_jsonl(&articles, &corpus.articles).unwrap();
    relbias::io::write_bytes(&triples, relbias::corpus::format_triples(&corpus.triples).as_bytes()).unwrap();
    (articles, triples)
}

/// A fast experiment configuration over the given corpus files.
pub fn quick_experiment(
    articles: &std::path::Path,
    triples: &std::path::Path,
    overrides: &[(&str, &str)],
) -> relbias::experiments::ExperimentConfig {
    let mut c = relbias::experiments::ExperimentConfig::default();
    c.paths.articles = Some(articles.to_path_buf());
    c.paths.triples = Some(triples.to_path_buf());
    let base = [
        ("embedding.dim", "16"),
        ("model.word_dim", "16"),
        ("embedding.epochs", "2"),
        ("embedding.min_count", "2"),
        ("model.filters", "30"),
        ("train.batch", "50"),
        ("train.epochs", "6"),
        ("train.patience", "3"),
        ("run.seeds", "0"),
    ];
    for (k, v) in base.iter().chain(overrides) {
        c.set(k, v).unwrap();
    }
    c
}

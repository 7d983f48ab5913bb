//! Planted-bias synthetic corpus.
//!
//! Every relation is expressed through trigger words. Spouse sentences carry
//! a spouse trigger only with a gender-dependent probability; otherwise they
//! reuse the neutral templates that NA relations also use, so a model can
//! only recover them by chance. Lower trigger reliability for female heads
//! therefore plants a male-favoring spouse gap, while the other relations
//! stay gender-neutral.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{EntityArticle, KnowledgeTriple};
use crate::error::{Error, Result};
use crate::types::Gender;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub entities: usize,
    pub female_fraction: f64,
    /// Probability that a male head's spouse bag contains a spouse trigger.
    pub spouse_trigger_male: f64,
    pub spouse_trigger_female: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            entities: 800,
            female_fraction: 0.35,
            spouse_trigger_male: 0.95,
            spouse_trigger_female: 0.70,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub articles: Vec<EntityArticle>,
    pub triples: Vec<KnowledgeTriple>,
}

const ONSETS: &[&str] = &[
    "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "dr", "kr", "st",
    "th", "tr",
];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u", "ae", "ei", "ou"];
const CODAS: &[&str] = &["", "n", "r", "l", "s", "th", "m", "x"];

const MONTHS: &[&str] = &[
    "January", "February", "March", "April", "May", "June", "July", "August", "September",
    "October", "November", "December",
];
const OCCUPATIONS: &[&str] = &[
    "Politician", "Painter", "Engineer", "Physician", "Journalist", "Economist", "Architect",
    "Novelist", "Composer", "Diplomat", "Botanist", "Sculptor",
];

const SPOUSE_TRIGGERED: &[&str] = &[
    "{S} married {T} .",
    "{S} and {T} were married in a small ceremony .",
    "{Poss} {partner} {T} joined {obj} on the tour .",
    "{S} wed {T} after a long engagement .",
];
/// Shared by NA relations and trigger-less spouse sentences.
const NEUTRAL: &[&str] = &[
    "{S} appeared with {T} at the gala .",
    "{S} met {T} during the campaign .",
    "{S} and {T} visited the museum .",
    "{S} wrote a letter to {T} .",
];
const HYPERNYM: &[&str] = &[
    "{S} worked as a {T} .",
    "{S} was a renowned {T} .",
    "{S} became a {T} early in {poss} career .",
];
const BIRTH_DATE: &[&str] = &["{S} was born on {T} .", "{S} ( born {T} ) is a public figure ."];
const BIRTH_PLACE: &[&str] = &["{S} was born in {T} .", "{S} grew up in {T} with {poss} family ."];
const PARENTS: &[&str] = &["{S} is the child of {T} .", "{S} was raised by {T} ."];
const DEATH_DATE: &[&str] = &["{S} died on {T} .", "{S} passed away on {T} ."];
const ALMA_MATER: &[&str] = &["{S} studied at {T} .", "{S} graduated from {T} ."];
const FILLER: &[&str] = &[
    "{S} is known for {poss} charitable work .",
    "{S} received several awards .",
    "{Poss} work was widely praised .",
];

struct Namer {
    used: HashSet<String>,
}

impl Namer {
    fn word(&mut self, rng: &mut ChaCha8Rng, syllables: usize) -> String {
        loop {
            let mut w = String::new();
            for _ in 0..syllables {
                w.push_str(ONSETS.choose(rng).unwrap());
                w.push_str(VOWELS.choose(rng).unwrap());
                w.push_str(CODAS.choose(rng).unwrap());
            }
            let mut chars = w.chars();
            let cap: String = chars.next().unwrap().to_uppercase().chain(chars).collect();
            if cap.len() >= 4 && self.used.insert(cap.clone()) {
                return cap;
            }
        }
    }
}

struct Head<'a> {
    full: &'a str,
    last: &'a str,
    gender: Gender,
}

fn render(template: &str, head: &Head<'_>, tail: &str, rng: &mut ChaCha8Rng) -> String {
    let (pron, poss, obj, partner) = match head.gender {
        Gender::Male => ("He", "his", "him", "wife"),
        Gender::Female => ("She", "her", "her", "husband"),
    };
    let subject = match rng.gen_range(0..3) {
        0 => head.full,
        1 => head.last,
        _ => pron,
    };
    let mut possessive = poss.to_string();
    possessive[..1].make_ascii_uppercase();
    template
        .replace("{S}", subject)
        .replace("{T}", tail)
        .replace("{Poss}", &possessive)
        .replace("{poss}", poss)
        .replace("{obj}", obj)
        .replace("{partner}", partner)
}

/// Generates articles and triples with a planted spouse-trigger bias.
pub fn generate(config: &SyntheticConfig) -> Result<SyntheticCorpus> {
    for p in [config.female_fraction, config.spouse_trigger_male, config.spouse_trigger_female] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::config("synthetic probabilities must lie in [0, 1]"));
        }
    }
    if config.entities < 3 {
        return Err(Error::config("synthetic corpus needs at least 3 entities"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut namer = Namer { used: HashSet::new() };
    for w in MONTHS.iter().chain(OCCUPATIONS) {
        namer.used.insert(w.to_string());
    }
    let mut articles = Vec::with_capacity(config.entities);
    let mut triples = Vec::new();

    for i in 0..config.entities {
        let gender = if rng.gen::<f64>() < config.female_fraction {
            Gender::Female
        } else {
            Gender::Male
        };
        let first = namer.word(&mut rng, 2);
        let last = namer.word(&mut rng, 2);
        let full = format!("{first} {last}");
        let head = Head { full: &full, last: &last, gender };
        let id = format!("E{i:05}");
        let mut sentences: Vec<String> = Vec::new();
        let mut emit = |rel: &str,
                        tail: String,
                        templates: &[&str],
                        neutral_share: f64,
                        rng: &mut ChaCha8Rng,
                        sentences: &mut Vec<String>| {
            let n = rng.gen_range(1..=2);
            for _ in 0..n {
                let pool = if rng.gen::<f64>() < neutral_share { NEUTRAL } else { templates };
                let t = pool.choose(rng).unwrap();
                sentences.push(render(t, &head, &tail, rng));
            }
            triples.push(KnowledgeTriple::new(&id, rel, &tail).unwrap());
        };

        let spouse_rate = match gender {
            Gender::Male => 0.6,
            Gender::Female => 0.9,
        };
        if rng.gen::<f64>() < spouse_rate {
            let tail = format!("{} {}", namer.word(&mut rng, 2), namer.word(&mut rng, 2));
            let reliability = match gender {
                Gender::Male => config.spouse_trigger_male,
                Gender::Female => config.spouse_trigger_female,
            };
            let share = if rng.gen::<f64>() < reliability { 0.0 } else { 1.0 };
            emit("spouse", tail, SPOUSE_TRIGGERED, share, &mut rng, &mut sentences);
        }
        let occupation = OCCUPATIONS.choose(&mut rng).unwrap().to_string();
        emit("hypernym", occupation, HYPERNYM, 0.0, &mut rng, &mut sentences);

        let birth_month = rng.gen_range(0..12);
        let death_month = (birth_month + rng.gen_range(1..12)) % 12;
        let birth_year = rng.gen_range(1900..1960);
        let death_year = birth_year + rng.gen_range(30..60);
        let birth = format!("{} {} , {}", MONTHS[birth_month], rng.gen_range(1..29), birth_year);
        emit("birthDate", birth, BIRTH_DATE, 0.0, &mut rng, &mut sentences);
        let city = namer.word(&mut rng, 3);
        emit("birthPlace", city, BIRTH_PLACE, 0.0, &mut rng, &mut sentences);

        let parent = format!("{} {}", namer.word(&mut rng, 2), namer.word(&mut rng, 2));
        emit("parents", parent, PARENTS, 0.5, &mut rng, &mut sentences);
        let death = format!("{} {} , {}", MONTHS[death_month], rng.gen_range(1..29), death_year);
        emit("deathDate", death, DEATH_DATE, 0.0, &mut rng, &mut sentences);
        let school = format!("{} University", namer.word(&mut rng, 2));
        emit("almaMater", school, ALMA_MATER, 0.5, &mut rng, &mut sentences);

        if rng.gen::<bool>() {
            let t = FILLER.choose(&mut rng).unwrap();
            sentences.push(render(t, &head, "", &mut rng));
        }
        sentences.shuffle(&mut rng);
        articles.push(EntityArticle {
            entity_id: id,
            name: full.clone(),
            gender,
            text: sentences.join(" "),
        });
    }
    Ok(SyntheticCorpus { articles, triples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{align_distant, MatchMode, Segmentation};
    use crate::types::Relation;

    #[test]
    fn generation_is_deterministic() {
        let cfg = SyntheticConfig { entities: 20, ..Default::default() };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.articles, b.articles);
        assert_eq!(a.triples, b.triples);
    }

    #[test]
    fn every_triple_aligns_to_its_own_sentences() {
        let cfg = SyntheticConfig { entities: 60, ..Default::default() };
        let c = generate(&cfg).unwrap();
        let out = align_distant(&c.articles, &c.triples, MatchMode::AnyToken, Segmentation::Rules);
        assert!(out.skipped.is_empty());
        // Each triple yields one or two sentences and no sentence matches a
        // foreign tail.
        let mut per_pair = std::collections::HashMap::new();
        for inst in &out.instances {
            *per_pair.entry((inst.head_id.clone(), inst.tail_surface.clone())).or_insert(0) += 1;
            assert!(inst.anchors_valid());
        }
        assert_eq!(per_pair.len(), c.triples.len());
        assert!(per_pair.values().all(|&n| (1..=2).contains(&n)));
        let full = align_distant(&c.articles, &c.triples, MatchMode::Full, Segmentation::Rules);
        assert_eq!(full.instances.len(), out.instances.len());
        assert!(out.instances.iter().any(|i| i.relation == Relation::Na));
    }
}

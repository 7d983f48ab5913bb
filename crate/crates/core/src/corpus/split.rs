use std::collections::{BTreeMap, BTreeSet, HashSet};

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Gender, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitName {
    Train,
    Dev,
    Test,
}

impl SplitName {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitName::Train => "train",
            SplitName::Dev => "dev",
            SplitName::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSplit {
    pub name: SplitName,
    pub instances: Vec<Instance>,
}

impl DatasetSplit {
    pub fn new(name: SplitName, instances: Vec<Instance>) -> Self {
        DatasetSplit { name, instances }
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn count(&self, gender: Gender) -> usize {
        self.instances.iter().filter(|i| i.gender == gender).count()
    }

    pub fn head_ids(&self) -> BTreeSet<&str> {
        self.instances.iter().map(|i| i.head_id.as_str()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SplitOutput {
    pub train: DatasetSplit,
    pub dev: DatasetSplit,
    pub test: DatasetSplit,
    pub warnings: Vec<String>,
}

impl SplitOutput {
    pub fn assert_head_disjoint(&self) -> bool {
        let (a, b, c) = (self.train.head_ids(), self.dev.head_ids(), self.test.head_ids());
        a.is_disjoint(&b) && a.is_disjoint(&c) && b.is_disjoint(&c)
    }
}

/// Per-head instance count and gender, in head-id order.
fn head_table(instances: &[Instance]) -> BTreeMap<&str, (Gender, usize)> {
    let mut heads: BTreeMap<&str, (Gender, usize)> = BTreeMap::new();
    for inst in instances {
        heads.entry(inst.head_id.as_str()).or_insert((inst.gender, 0)).1 += 1;
    }
    heads
}

fn gender_seed(seed: u64, gender: Gender) -> u64 {
    seed.wrapping_mul(2).wrapping_add(gender as u64)
}

/// Assigns shuffled heads of one gender to train/dev/test by cumulative
/// instance count. Returns the split index per head.
fn assign_heads(heads: &[(&str, usize)], ratios: [f64; 3]) -> Vec<usize> {
    let total: usize = heads.iter().map(|h| h.1).sum();
    let t1 = ratios[0] * total as f64;
    let t2 = (ratios[0] + ratios[1]) * total as f64;
    let mut cum = 0usize;
    let mut assign: Vec<usize> = heads
        .iter()
        .map(|&(_, n)| {
            let slot = if (cum as f64) < t1 {
                0
            } else if (cum as f64) < t2 {
                1
            } else {
                2
            };
            cum += n;
            slot
        })
        .collect();
    // With three or more heads every split with a non-zero ratio gets one.
    if heads.len() >= 3 {
        for target in [2usize, 1] {
            if ratios[target] > 0.0 && !assign.contains(&target) {
                let donor = (0..3)
                    .filter(|&s| s != target)
                    .max_by_key(|&s| assign.iter().filter(|&&a| a == s).count())
                    .unwrap();
                if let Some(pos) = assign.iter().rposition(|&a| a == donor) {
                    assign[pos] = target;
                }
            }
        }
    }
    assign
}

/// Partitions instances into head-disjoint train/dev/test splits, stratified
/// by gender, then balances the test split by dropping the fewest
/// majority-gender instances (as whole head entities) that bring the two
/// counts within 5% of each other.
pub fn split_by_head(instances: &[Instance], ratios: [f64; 3], seed: u64) -> Result<SplitOutput> {
    if ratios.iter().any(|r| !(0.0..=1.0).contains(r)) || (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::config(format!(
            "split ratios {ratios:?} must be non-negative and sum to 1"
        )));
    }
    let heads = head_table(instances);
    if heads.len() < 3 {
        return Err(Error::data(format!(
            "need at least 3 distinct head entities to split, found {}",
            heads.len()
        )));
    }

    let mut slot_of: BTreeMap<&str, usize> = BTreeMap::new();
    for gender in Gender::ALL {
        let mut group: Vec<(&str, usize)> = heads
            .iter()
            .filter(|(_, (g, _))| *g == gender)
            .map(|(h, (_, n))| (*h, *n))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(gender_seed(seed, gender));
        group.shuffle(&mut rng);
        for ((head, _), slot) in group.iter().zip(assign_heads(&group, ratios)) {
            slot_of.insert(head, slot);
        }
    }

    let mut parts: [Vec<Instance>; 3] = Default::default();
    for inst in instances {
        parts[slot_of[inst.head_id.as_str()]].push(inst.clone());
    }
    let [train, dev, test] = parts;

    let mut warnings = Vec::new();
    let test = DatasetSplit::new(SplitName::Test, test);
    let test = if test.count(Gender::Male) == 0 || test.count(Gender::Female) == 0 {
        let msg = "test split contains a single gender; gender equalization skipped".to_string();
        warn!("{msg}");
        warnings.push(msg);
        test
    } else {
        balance_test(&test, seed).unwrap_or_else(|| {
            let msg = format!(
                "test split cannot be balanced within 5% by removing whole heads ({} male, {} female); kept as is",
                test.count(Gender::Male),
                test.count(Gender::Female)
            );
            warn!("{msg}");
            warnings.push(msg);
            test.clone()
        })
    };

    let out = SplitOutput {
        train: DatasetSplit::new(SplitName::Train, train),
        dev: DatasetSplit::new(SplitName::Dev, dev),
        test,
        warnings,
    };
    debug_assert!(out.assert_head_disjoint());
    Ok(out)
}

/// Shuffled head-entity groups of the majority gender, with that gender's
/// total and the minority total.
fn majority_groups<'a>(split: &'a DatasetSplit, seed: u64) -> (Vec<(&'a str, usize)>, usize, usize) {
    let (male, female) = (split.count(Gender::Male), split.count(Gender::Female));
    let (majority, minority) = if male >= female {
        (Gender::Male, female)
    } else {
        (Gender::Female, male)
    };
    let mut groups: Vec<(&str, usize)> = head_table(&split.instances)
        .into_iter()
        .filter(|(_, (g, _))| *g == majority)
        .map(|(h, (_, n))| (h, n))
        .collect();
    groups.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    (groups, male.max(female), minority)
}

fn without_heads(split: &DatasetSplit, removed: &HashSet<&str>) -> DatasetSplit {
    let instances = split
        .instances
        .iter()
        .filter(|i| !removed.contains(i.head_id.as_str()))
        .cloned()
        .collect();
    DatasetSplit::new(split.name, instances)
}

/// Balances the test split by removing the smallest possible number of
/// majority-gender instances (whole heads) so that the larger count is
/// below 1.05 times the smaller. Among equally small removals the subset
/// using the earliest groups in seeded shuffle order wins. Returns `None`
/// when no subset of heads achieves the bound.
fn balance_test(split: &DatasetSplit, seed: u64) -> Option<DatasetSplit> {
    let balanced = |a: usize, b: usize| {
        let (hi, lo) = (a.max(b), a.min(b));
        hi == lo || (hi as f64) < lo as f64 * 1.05
    };
    let (groups, total, minority) = majority_groups(split, seed);
    if balanced(total, minority) {
        return Some(split.clone());
    }
    // reach[s]: index of the group that first made removal total `s`
    // reachable; the remainder `s - n` was reachable with earlier groups.
    const START: usize = usize::MAX;
    let mut reach: Vec<Option<usize>> = vec![None; total + 1];
    reach[0] = Some(START);
    for (gi, &(_, n)) in groups.iter().enumerate() {
        for s in (n..=total).rev() {
            if reach[s].is_none() && reach[s - n].is_some() {
                reach[s] = Some(gi);
            }
        }
    }
    let target = (1..=total).find(|&s| reach[s].is_some() && balanced(total - s, minority))?;
    let mut removed = HashSet::new();
    let mut s = target;
    while s > 0 {
        let gi = reach[s].expect("reconstruction follows reachable sums");
        removed.insert(groups[gi].0);
        s -= groups[gi].1;
    }
    Some(without_heads(split, &removed))
}

/// Removes shuffled head-entity groups of the majority gender until `done`
/// holds for (majority count, minority count).
fn downsample_majority(
    split: &DatasetSplit,
    seed: u64,
    done: impl Fn(usize, usize) -> bool,
) -> DatasetSplit {
    let (groups, mut remaining, minority) = majority_groups(split, seed);
    let mut removed: HashSet<&str> = HashSet::new();
    for (head, n) in groups {
        if done(remaining, minority) {
            break;
        }
        removed.insert(head);
        remaining -= n;
    }
    without_heads(split, &removed)
}

/// Downsamples the majority gender by whole head entities until its count is
/// at most 1.01 times the minority count. Minority instances are untouched.
pub fn equalize_split(split: &DatasetSplit, seed: u64) -> Result<DatasetSplit> {
    if split.count(Gender::Male) == 0 || split.count(Gender::Female) == 0 {
        return Err(Error::data(format!(
            "{} split contains a single gender: nothing to equalize",
            split.name.as_str()
        )));
    }
    Ok(downsample_majority(split, seed, |major, minor| {
        major as f64 <= minor as f64 * 1.01
    }))
}

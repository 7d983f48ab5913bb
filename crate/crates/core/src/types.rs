//! Shared domain types: genders, relation labels and distantly supervised instances.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
}

impl Gender {
    pub const ALL: [Gender; 2] = [Gender::Male, Gender::Female];

    pub fn flipped(self) -> Gender {
        match self {
            Gender::Male => Gender::Female,
            Gender::Female => Gender::Male,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Male => "male",
            Gender::Female => "female",
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Gender {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "male" | "m" | "M" => Ok(Gender::Male),
            "female" | "f" | "F" => Ok(Gender::Female),
            other => Err(Error::data(format!("unknown gender `{other}`"))),
        }
    }
}

/// The five-way relation label. The discriminant order is the class index
/// used by the model, and ties in prediction resolve to the lowest index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "spouse")]
    Spouse,
    #[serde(rename = "hypernym")]
    Hypernym,
    #[serde(rename = "birthDate")]
    BirthDate,
    #[serde(rename = "birthPlace")]
    BirthPlace,
    #[serde(rename = "NA")]
    Na,
}

impl Relation {
    pub const COUNT: usize = 5;

    pub const ALL: [Relation; 5] = [
        Relation::Spouse,
        Relation::Hypernym,
        Relation::BirthDate,
        Relation::BirthPlace,
        Relation::Na,
    ];

    /// The four relations that enter the macro average and the disparity score.
    pub const POSITIVE: [Relation; 4] = [
        Relation::Spouse,
        Relation::Hypernym,
        Relation::BirthDate,
        Relation::BirthPlace,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Relation> {
        Relation::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Spouse => "spouse",
            Relation::Hypernym => "hypernym",
            Relation::BirthDate => "birthDate",
            Relation::BirthPlace => "birthPlace",
            Relation::Na => "NA",
        }
    }

    pub fn is_positive(self) -> bool {
        self != Relation::Na
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Relation::ALL
            .iter()
            .copied()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::data(format!("unknown relation label `{s}`")))
    }
}

/// One distantly supervised sentence. The JSON-lines form of this struct is
/// the exchange format between every stage of the pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub instance_id: String,
    pub head_id: String,
    pub tail_surface: String,
    pub relation: Relation,
    pub gender: Gender,
    pub tokens: Vec<String>,
    pub head_anchor: usize,
    pub tail_anchor: usize,
}

impl Instance {
    pub fn anchors_valid(&self) -> bool {
        self.head_anchor < self.tokens.len() && self.tail_anchor < self.tokens.len()
    }
}

//! Gender-bias analysis toolkit for distantly supervised neural relation extraction.
//!
//! The crate is organised as a pipeline:
//!
//! * [`corpus`] aligns entity articles with knowledge triples, splits the
//!   resulting instances by head entity, equalizes genders and applies
//!   annotator adjudication.
//! * [`embeddings`] trains skip-gram word vectors and hard-debiases them.
//! * [`augmentation`] produces gender-swapped counterfactual copies of a split.
//! * [`model`] holds the CNN/PCNN bag classifiers with hand-written gradients.
//! * [`metrics`] turns prediction records into per-gender scores, gaps,
//!   disparity score and performance parity score.
//! * [`experiments`] wires everything into reproducible runs and the
//!   eight-row mitigation grid.

pub mod augmentation;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod experiments;
pub mod io;
pub mod metrics;
pub mod model;
pub mod types;

pub use error::{Error, Result};
pub use types::{Gender, Instance, Relation};

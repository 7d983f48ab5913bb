//! Bag-level neural relation extraction with CNN or PCNN sentence encoders
//! and selective-attention or average selectors. Gradients are derived by
//! hand; `tests/gradients.rs` checks them against finite differences.

mod checkpoint;
mod config;
mod features;
mod network;
mod params;
mod train;

pub use checkpoint::{
    checkpoint_from_str, checkpoint_to_string, read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC,
};
pub use config::{Encoder, ModelConfig, Selector};
pub use features::{build_bags, featurize, Bag, Features};
pub use network::{bag_representation, encode, forward, loss_and_gradient, SentenceEncoding};
pub use params::{Parameters, Tensor};
pub use train::{predict, train_model, EarlyStopping, Model, TrainReport};

//! Benchmark biased random walks as corpus generators for skip-gram node
//! embeddings.
//!
//! The pipeline: [`graph`] prepares a residual graph and a labeled edge set,
//! [`walk`] generates corpora under nine transition biases, [`sgns`] trains
//! embeddings, and [`eval`] scores held-out edges, computes AUC-ROC / AUC-PR
//! and correlates the similarity scores of different walks. [`pipeline`]
//! wires the stages together and [`dataset`] fetches benchmark networks.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod graph;
pub mod pipeline;
pub mod sgns;
pub mod walk;

pub use error::{Error, Result};

//! Toolkit for measuring disentanglement of latent representations of text.
//!
//! The crate generates synthetic corpora whose generative factors are known
//! exactly ([`corpus`]), builds perfectly disentangled reference codes for
//! them ([`ideal`]), and scores arbitrary labelled codes ([`factor_model`])
//! with six disentanglement metrics ([`metrics`]) built on small
//! self-contained learners ([`learners`]). [`stats`] adds sparsity, active
//! unit and correlation summaries, and [`homotopy`] walks between two codes
//! and pipes the path through a decoder.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod factor_model;
pub mod homotopy;
pub mod ideal;
pub mod learners;
pub mod metrics;
pub mod numeric;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};

/// Version stamped into every JSON file the toolkit writes.
pub const FORMAT_VERSION: u32 = 1;

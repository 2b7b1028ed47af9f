//! Dependent stochastic block models for index-ordered sequences of
//! categorically-weighted directed networks.
//!
//! The model places two separate, smoothly-evolving partition sequences on
//! the rows and columns of the adjacency matrices (one shared sequence in
//! undirected mode), collapses the block-probability vectors under
//! conjugate Dirichlet priors, and samples the posterior with a collapsed
//! Gibbs sweep inside adaptive parallel tempering. Post-processing turns
//! the samples into similarity matrices, minimum-VI point estimates, meet
//! clusters, block-probability estimates and connectivity scores.
//!
//! ## Runnable examples
//!
//! One example per major capability, runnable with
//! `cargo run --release -p dsbm --example <name>`:
//!
//! - **`prior_draws`** - DRPM-w prior behavior: persistence, supervision,
//!   cluster counts.
//! - **`simulate_and_fit`** - directed two-partition recovery end to end.
//! - **`undirected_variant`** - the single-partition variant on symmetric
//!   networks.
//! - **`tempering_ladder`** - ladder adaptation and swap acceptance.
//! - **`posterior_summaries`** - similarity matrices, min-VI estimates,
//!   meet clusters, block probabilities, connectivity scores.
//! - **`discretize_counts`** - raw co-occurrence counts to ordinal
//!   categories plus covariate attachment.
//! - **`replicate_study`** - replicated accuracy benchmark with
//!   median/IQR summaries.
//!
//! The same functionality is scriptable through the `dsbm` binary
//! (`simulate`, `ingest`, `fit`, `summarize`, `eval`, `plot`); see the
//! README.

pub mod cli;
pub mod data;
pub mod error;
pub mod gibbs;
pub mod io;
pub mod likelihood;
pub mod partition;
pub mod plot;
pub mod prior;
pub mod stats;
pub mod summaries;
pub mod synthetic;
pub mod tempering;
mod util;

pub use data::{CatMatrix, Covariates, Hyperparameters, Mode, NetworkSequence};
pub use error::{Error, Result};
pub use partition::PartitionSequence;
pub use stats::{build_suff_stats, BlockSuffStats};

//! Congruence Class Model network ensembles.
//!
//! A CCM places a distribution on the values of one or more graph
//! properties and spreads the mass of each value uniformly over the graphs
//! that share it. This crate provides the graph state, property statistics,
//! class-size estimators, class distributions, a Metropolis-Hastings
//! sampler, diagnostics and posterior workflows.

pub mod cardinality;
pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod distributions;
pub mod enumeration;
pub mod error;
pub mod graph;
pub mod math;
pub mod posterior;
pub mod sampler;
pub mod stats;

pub use cardinality::{CardinalityEstimator, CardinalityMode};
pub use distributions::ClassDistribution;
pub use enumeration::EnumerationTable;
pub use error::{Error, Result};
pub use graph::{Dyad, Graph};
pub use stats::{PropertySpec, StatDelta, StatVector};
pub use sampler::{run, run_chains, Acceptance, CcmSpec, SampleOutput, SamplerConfig};

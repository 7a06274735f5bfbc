//! Structural-diversity search over networks that share a degree sequence and
//! a global clustering coefficient.
//!
//! Networks are encoded as counts over a family of small subgraphs. Exact
//! mutations move between encodings without changing the total number of
//! triangles or edges, an adaptive-resolution MapElite archive keeps one elite
//! per cell, and a complex contagion simulator measures how the structural
//! differences change spreading behaviour.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. File formats, configuration and the command line live in the
//! companion `netdiv` crate.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod archive;
pub mod cma;
pub mod contagion;
pub mod diophantine;
pub mod error;
pub mod family;
pub mod graph;
pub mod metrics;
pub mod search;
pub mod seeding;
#[cfg(test)]
pub(crate) mod testutil;

pub use error::Error;
pub use family::{Context, NetworkSpec, SubgraphFamily, SubgraphKind};
pub use graph::{DegreeSequence, Graph};

/// Deterministic generator used throughout the crate.
pub type Rng = rand_chacha::ChaCha8Rng;

pub type Result<T, E = Error> = core::result::Result<T, E>;

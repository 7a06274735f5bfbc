use alloc::string::String;
use alloc::vec::Vec;

use crate::family::Violation;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("node {index} out of range for a graph of {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid subgraph family: {0}")]
    Family(String),
    #[error("invalid context: {0}")]
    Context(String),
    #[error("subgraph edges exceed the edge budget by {0}")]
    OverBudget(i64),
    #[error("specification violates {} constraint(s)", .0.len())]
    InvalidSpec(Vec<Violation>),
    #[error("mutation catalog is empty")]
    EmptyCatalog,
    #[error("subgraph census does not support kind `{0}`")]
    UnsupportedFamily(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("none of the seed specifications could be realized")]
    NoRealizableSeed,
    #[error("need at least {needed} items, got {got}")]
    TooFew { needed: usize, got: usize },
}

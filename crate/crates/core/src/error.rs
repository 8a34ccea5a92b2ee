use alloc::string::String;

use crate::graph::NodeId;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("graph must have at least one node")]
    EmptyGraph,
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("conflicting weights for edge ({0}, {1})")]
    ConflictingWeight(NodeId, NodeId),
    #[error("non-finite parameter: {0}")]
    NonFinite(&'static str),
    #[error("node {0} of the clique has no value")]
    MissingCliqueNode(NodeId),
    #[error("partition value must be positive and finite")]
    NonPositivePartition,
    #[error("enumeration over {free} free nodes exceeds cap {cap}")]
    CapExceeded { free: usize, cap: usize },
    #[error("value {value} for node {node} is not binary")]
    NonBinaryValue { node: NodeId, value: u8 },
    #[error("malformed intervention spec: {0}")]
    MalformedSpec(String),
    #[error("unknown tag `{0}`")]
    UnknownTag(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

use thiserror::Error;

use crate::topology::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("duplicate link {0}-{1}")]
    DuplicateLink(NodeId, NodeId),

    #[error("topology is disconnected: node {0} is unreachable from node 1")]
    Disconnected(NodeId),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("node {dst} is unreachable from node {src}")]
    Unreachable { src: NodeId, dst: NodeId },

    #[error("invalid route: {0}")]
    InvalidRoute(String),

    #[error("core index {index} out of range (fiber has {count} cores)")]
    CoreOutOfRange { index: usize, count: usize },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("commit rejected for demand {demand}: {reason}")]
    CommitRejected { demand: usize, reason: String },

    #[error("fiber cap of {cap} reached on link {link}")]
    FiberCap { link: usize, cap: usize },

    #[error("demand {0} cannot be served")]
    Unservable(usize),

    #[error("no eligible core on hop {0} of the route")]
    NoEligibleCore(usize),

    #[error("search limits exceeded: {0}")]
    LimitsExceeded(String),

    #[error("instance is infeasible")]
    Infeasible,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

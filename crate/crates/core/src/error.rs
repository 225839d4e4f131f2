use std::time::Duration;

use thiserror::Error;

use crate::network::NodeId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid coordinate ({lat}, {lon})")]
    InvalidCoordinate { lat: f64, lon: f64 },

    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("invalid weight {weight} on edge {from}->{to}")]
    InvalidWeight {
        from: NodeId,
        to: NodeId,
        weight: f64,
    },

    #[error("node ids must be contiguous: node at position {position} has id {found}")]
    NonContiguousIds { position: usize, found: NodeId },

    #[error("no nodes")]
    NoNodes,

    #[error("empty POI set")]
    EmptyPoiSet,

    #[error("duplicate POI at node {node}: '{first}' and '{second}'")]
    DuplicatePoi {
        node: NodeId,
        first: String,
        second: String,
    },

    #[error("duplicate POI label '{0}'")]
    DuplicateLabel(String),

    #[error("invalid POI label '{0}'")]
    InvalidLabel(String),

    #[error("no POI at node {0}")]
    PoiNotFound(NodeId),

    #[error("POI '{label}' at node {node} lies outside the largest strongly connected component")]
    OutsideComponent { label: String, node: NodeId },

    #[error("member set is empty")]
    EmptyMembers,

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("malformed OSM XML: {0}")]
    Xml(String),

    #[error("reduce exceeded its time budget of {0:?}")]
    Timeout(Duration),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }

    /// True for errors caused by an invalid point-of-interest configuration
    /// rather than unreadable input.
    pub fn is_poi_error(&self) -> bool {
        matches!(
            self,
            Error::EmptyPoiSet
                | Error::DuplicatePoi { .. }
                | Error::DuplicateLabel(_)
                | Error::InvalidLabel(_)
                | Error::PoiNotFound(_)
                | Error::UnknownNode(_)
                | Error::OutsideComponent { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

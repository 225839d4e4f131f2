//! Detect and reduce distance-based inconsistencies in street networks.
//!
//! A node is inconsistent when the point of interest (hospital, police
//! station, school) closest to it in a straight line is not the one closest
//! along the streets. The crate builds the street graph, tracks those nodes
//! per point of interest and travel direction, and greedily relocates points
//! of interest toward straightness-central, consistent intersections without
//! ever increasing the total number of inconsistencies.
//!
//! ```
//! use urbanet::{reduce, synth, track, Direction};
//!
//! let (net, pois) = synth::clustered_grid();
//! let report = track(&net, &pois, Direction::Inward).unwrap();
//! let plan = reduce(&net, &pois, Direction::Inward).unwrap();
//! assert!(plan.totals_after <= report.total);
//! ```

pub mod centrality;
pub mod cli;
pub mod error;
pub mod geo;
pub mod inconsistency;
pub mod ingest;
pub mod network;
pub mod partition;
pub mod paths;
pub mod reducer;
pub mod report;
pub mod scenarios;
pub mod service;
pub mod synth;

pub use centrality::{extract_central, straightness, CentralityField};
pub use error::{Error, Result};
pub use geo::{great_circle, DistanceMeters, GeoPoint};
pub use inconsistency::{track, track_with_options, Direction, InconsistencyReport, TrackOptions, Tracker};
pub use ingest::{Poi, PoiSet};
pub use network::{Edge, EdgeSpec, Network, Node, NodeId};
pub use partition::{network_partition, perimeter_partition, Metric, Partition};
pub use paths::{distances_from, distances_to, pairwise_in_subgraph, DistanceField, FieldDirection};
pub use reducer::{reduce, reduce_with_options, what_if, PoiEdit, ReduceOptions, RelocationPlan};

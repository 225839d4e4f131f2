//! Tracking distance-based inconsistencies: nodes whose inline-closest POI
//! is not their network-closest one.
//!
//! The tracker works on partitions and set differences. Distance columns
//! are cached per POI node, so evaluating many POI configurations over the
//! same network only pays for shortest paths once per distinct node.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ingest::PoiSet;
use crate::network::{Network, NodeId};
use crate::partition::{inline_column, Metric, Partition};
use crate::paths::{distance_field, FieldDirection};

/// Which travel direction must be consistent with the inline metric.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Citizens travel to the POI (clinics).
    #[default]
    Inward,
    /// The service travels to citizens (police).
    Outward,
    /// Both ways (schools).
    Absolute,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Inward, Direction::Outward, Direction::Absolute];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Inward => "inward",
            Direction::Outward => "outward",
            Direction::Absolute => "absolute",
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Direction::Inward => 'I',
            Direction::Outward => 'O',
            Direction::Absolute => 'A',
        }
    }

    fn needs_to(self) -> bool {
        matches!(self, Direction::Inward | Direction::Absolute)
    }

    fn needs_from(self) -> bool {
        matches!(self, Direction::Outward | Direction::Absolute)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "inward" | "i" => Ok(Direction::Inward),
            "outward" | "o" => Ok(Direction::Outward),
            "absolute" | "a" => Ok(Direction::Absolute),
            _ => Err(format!("unknown direction '{s}' (expected inward, outward or absolute)")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackOptions {
    /// Count nodes that cannot reach (or be reached from) any POI as
    /// inconsistent instead of skipping them.
    pub strict_unreachable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InconsistencyReport {
    pub direction: Direction,
    pub pois: PoiSet,
    /// Inconsistent nodes charged to each POI (by [`PoiSet`] position),
    /// ascending.
    pub per_poi: Vec<Vec<NodeId>>,
    /// Perimeter members of each POI that are not inconsistent.
    pub consistent_per_poi: Vec<Vec<NodeId>>,
    pub total: usize,
    /// Nodes left out because no POI is reachable in the relevant direction.
    pub skipped_unreachable: usize,
}

impl InconsistencyReport {
    pub fn counts(&self) -> Vec<usize> {
        self.per_poi.iter().map(Vec::len).collect()
    }

    /// POI position `v` is charged to, if `v` is inconsistent.
    pub fn charged_to(&self, v: NodeId) -> Option<usize> {
        self.per_poi.iter().position(|set| set.binary_search(&v).is_ok())
    }

    /// Per-node flag: `Some(poi)` for inconsistent nodes.
    pub fn node_flags(&self, node_count: usize) -> Vec<Option<usize>> {
        let mut flags = vec![None; node_count];
        for (k, set) in self.per_poi.iter().enumerate() {
            for v in set {
                flags[v.index()] = Some(k);
            }
        }
        flags
    }
}

#[derive(Debug)]
struct Columns {
    inline: Vec<f64>,
    to: Option<Vec<f64>>,
    from: Option<Vec<f64>>,
}

/// Evaluates POI configurations over one network and one direction, caching
/// per-node distance columns.
#[derive(Debug)]
pub struct Tracker<'n> {
    net: &'n Network,
    direction: Direction,
    options: TrackOptions,
    cache: HashMap<NodeId, Arc<Columns>>,
}

#[derive(Clone, Copy, PartialEq)]
enum Status {
    Consistent,
    Inconsistent,
    Unreachable,
}

impl<'n> Tracker<'n> {
    pub fn new(net: &'n Network, direction: Direction, options: TrackOptions) -> Self {
        Tracker {
            net,
            direction,
            options,
            cache: HashMap::new(),
        }
    }

    pub fn network(&self) -> &'n Network {
        self.net
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn cached_nodes(&self) -> usize {
        self.cache.len()
    }

    /// Computes the distance columns of any node in `nodes` not yet cached.
    pub fn prepare(&mut self, nodes: &[NodeId]) -> Result<()> {
        let mut missing: Vec<NodeId> = nodes.iter().copied().filter(|n| !self.cache.contains_key(n)).collect();
        missing.sort_unstable();
        missing.dedup();
        let (net, dir) = (self.net, self.direction);
        let computed = missing
            .par_iter()
            .map(|&p| -> Result<(NodeId, Columns)> {
                let field = |d| distance_field(net, p, d).map(|f| f.as_slice().to_vec());
                Ok((
                    p,
                    Columns {
                        inline: inline_column(net, p),
                        to: dir.needs_to().then(|| field(FieldDirection::ToPoi)).transpose()?,
                        from: dir.needs_from().then(|| field(FieldDirection::FromPoi)).transpose()?,
                    },
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        for (p, cols) in computed {
            self.cache.insert(p, Arc::new(cols));
        }
        Ok(())
    }

    /// Tracks inconsistencies of `pois`, computing missing columns first.
    pub fn track(&mut self, pois: &PoiSet) -> Result<InconsistencyReport> {
        pois.validate(self.net)?;
        self.prepare(&pois.nodes())?;
        Ok(self.track_prepared(pois))
    }

    /// Like [`Tracker::track`] but read-only; every POI node must already
    /// have been passed to [`Tracker::prepare`].
    pub fn track_prepared(&self, pois: &PoiSet) -> InconsistencyReport {
        let cols: Vec<&Columns> = pois
            .iter()
            .map(|p| self.cache.get(&p.node).expect("prepared column").as_ref())
            .collect();
        let inline: Vec<&[f64]> = cols.iter().map(|c| c.inline.as_slice()).collect();
        let perimeter = Partition::from_columns(Metric::Inline, pois, &inline);
        let to = self.direction.needs_to().then(|| {
            let refs: Vec<&[f64]> = cols.iter().map(|c| c.to.as_deref().expect("to column")).collect();
            Partition::from_columns(Metric::NetworkTo, pois, &refs)
        });
        let from = self.direction.needs_from().then(|| {
            let refs: Vec<&[f64]> = cols.iter().map(|c| c.from.as_deref().expect("from column")).collect();
            Partition::from_columns(Metric::NetworkFrom, pois, &refs)
        });
        classify(self.direction, self.options, pois, &perimeter, to.as_ref(), from.as_ref())
    }

    /// Total only; same preconditions as [`Tracker::track_prepared`].
    pub fn total_prepared(&self, pois: &PoiSet) -> usize {
        self.track_prepared(pois).total
    }
}

fn status(k: usize, network: &Partition, v: NodeId) -> Status {
    match network.poi_of(v) {
        None => Status::Unreachable,
        Some(n) if n == k => Status::Consistent,
        Some(_) => Status::Inconsistent,
    }
}

/// Set algebra over precomputed partitions.
///
/// Inward: perimeter minus network set. Outward: perimeter minus reversed
/// network set. Absolute: the intersection of both.
pub fn classify(
    direction: Direction,
    options: TrackOptions,
    pois: &PoiSet,
    perimeter: &Partition,
    to: Option<&Partition>,
    from: Option<&Partition>,
) -> InconsistencyReport {
    let mut per_poi = vec![Vec::new(); pois.len()];
    let mut consistent = vec![Vec::new(); pois.len()];
    let mut skipped = 0;
    let counts_as = |s: Status| match s {
        Status::Inconsistent => Some(true),
        Status::Consistent => Some(false),
        Status::Unreachable => options.strict_unreachable.then_some(true),
    };
    for (k, members) in perimeter.all_members().iter().enumerate() {
        for &v in members {
            let verdict = match direction {
                Direction::Inward => counts_as(status(k, to.expect("to partition"), v)),
                Direction::Outward => counts_as(status(k, from.expect("from partition"), v)),
                Direction::Absolute => {
                    let a = counts_as(status(k, to.expect("to partition"), v));
                    let b = counts_as(status(k, from.expect("from partition"), v));
                    match (a, b) {
                        (Some(true), Some(true)) => Some(true),
                        (None, _) | (_, None) => None,
                        _ => Some(false),
                    }
                }
            };
            match verdict {
                Some(true) => per_poi[k].push(v),
                Some(false) => consistent[k].push(v),
                None => {
                    skipped += 1;
                    consistent[k].push(v);
                }
            }
        }
    }
    let total = per_poi.iter().map(Vec::len).sum();
    InconsistencyReport {
        direction,
        pois: pois.clone(),
        per_poi,
        consistent_per_poi: consistent,
        total,
        skipped_unreachable: skipped,
    }
}

/// Inconsistencies of `pois` on `net` in the given direction.
pub fn track(net: &Network, pois: &PoiSet, direction: Direction) -> Result<InconsistencyReport> {
    track_with_options(net, pois, direction, TrackOptions::default())
}

pub fn track_with_options(
    net: &Network,
    pois: &PoiSet,
    direction: Direction,
    options: TrackOptions,
) -> Result<InconsistencyReport> {
    Tracker::new(net, direction, options).track(pois)
}

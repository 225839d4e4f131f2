//! Node-to-POI assignments under the inline metric and the two network
//! metrics (travelling to the POI, travelling from it).
//!
//! Exact distance ties go to the POI that comes first in the [`PoiSet`], so
//! every node with at least one finite distance lands in exactly one set.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ingest::PoiSet;
use crate::network::{Network, NodeId};
use crate::paths::{distance_field, FieldDirection};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Inline,
    NetworkTo,
    NetworkFrom,
}

impl From<FieldDirection> for Metric {
    fn from(d: FieldDirection) -> Self {
        match d {
            FieldDirection::ToPoi => Metric::NetworkTo,
            FieldDirection::FromPoi => Metric::NetworkFrom,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Assignment {
    /// Position of the POI in its [`PoiSet`].
    pub poi: usize,
    pub node: NodeId,
    pub dist: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    metric: Metric,
    assignment: Vec<Option<Assignment>>,
    members: Vec<Vec<NodeId>>,
}

impl Partition {
    /// Assigns every node to the POI with the smallest finite entry across
    /// `columns` (one column per POI, indexed by node).
    pub fn from_columns(metric: Metric, pois: &PoiSet, columns: &[&[f64]]) -> Partition {
        assert_eq!(pois.len(), columns.len());
        let n = columns.first().map_or(0, |c| c.len());
        let mut best_dist = vec![f64::INFINITY; n];
        let mut best_poi = vec![usize::MAX; n];
        for (k, col) in columns.iter().enumerate() {
            for (v, &d) in col.iter().enumerate() {
                if d < best_dist[v] {
                    best_dist[v] = d;
                    best_poi[v] = k;
                }
            }
        }
        let mut members = vec![Vec::new(); pois.len()];
        let assignment = (0..n)
            .map(|v| {
                let k = best_poi[v];
                (k != usize::MAX).then(|| {
                    members[k].push(NodeId::new(v));
                    Assignment {
                        poi: k,
                        node: pois.get(k).expect("column per poi").node,
                        dist: best_dist[v],
                    }
                })
            })
            .collect();
        Partition {
            metric,
            assignment,
            members,
        }
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn assignment(&self, v: NodeId) -> Option<Assignment> {
        self.assignment[v.index()]
    }

    /// POI position for `v`, if assigned.
    pub fn poi_of(&self, v: NodeId) -> Option<usize> {
        self.assignment[v.index()].map(|a| a.poi)
    }

    /// Nodes assigned to the POI at `poi`, ascending.
    pub fn members(&self, poi: usize) -> &[NodeId] {
        &self.members[poi]
    }

    pub fn all_members(&self) -> &[Vec<NodeId>] {
        &self.members
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn assigned_count(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_some()).count()
    }

    pub fn unassigned(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_none())
            .map(|(v, _)| NodeId::new(v))
    }
}

/// Inline distance from every node to `p`.
pub fn inline_column(net: &Network, p: NodeId) -> Vec<f64> {
    net.node_ids().map(|v| net.inline_distance(v, p)).collect()
}

/// Perimeter sets: nodes grouped by their inline-closest POI.
pub fn perimeter_partition(net: &Network, pois: &PoiSet) -> Result<Partition> {
    pois.validate(net)?;
    let cols: Vec<Vec<f64>> = pois.iter().map(|p| inline_column(net, p.node)).collect();
    let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    Ok(Partition::from_columns(Metric::Inline, pois, &refs))
}

/// Network sets (`ToPoi`) or reversed network sets (`FromPoi`).
pub fn network_partition(net: &Network, pois: &PoiSet, direction: FieldDirection) -> Result<Partition> {
    pois.validate(net)?;
    let fields = pois
        .iter()
        .map(|p| distance_field(net, p.node, direction))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&[f64]> = fields.iter().map(|f| f.as_slice()).collect();
    Ok(Partition::from_columns(direction.into(), pois, &refs))
}

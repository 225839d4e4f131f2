//! Straightness centrality over induced subgraphs.
//!
//! For a member `i` the score is the mean, over the other members `j`, of
//! inline distance divided by network distance inside the subgraph. The
//! direction picks which network distance is used: `Inward` takes `j -> i`,
//! `Outward` takes `i -> j`, `Absolute` averages both ratios. Unreachable or
//! zero-length pairs contribute zero but still count in the denominator.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geo::UnitVector;
use crate::inconsistency::Direction;
use crate::ingest::PoiSet;
use crate::network::{Network, NodeId};
use crate::partition::perimeter_partition;
use crate::paths::{InducedSubgraph, SubgraphWorkspace};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CentralityField {
    pub direction: Direction,
    /// Ascending node ids.
    members: Vec<NodeId>,
    scores: Vec<f64>,
}

impl CentralityField {
    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn score(&self, v: NodeId) -> Option<f64> {
        self.members.binary_search(&v).ok().map(|i| self.scores[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.members.iter().copied().zip(self.scores.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn ratio(inline: f64, network: f64) -> f64 {
    if network.is_finite() && network > 0.0 {
        inline / network
    } else {
        0.0
    }
}

/// Straightness of every member of the subgraph induced by `members`.
pub fn straightness(net: &Network, members: &[NodeId], direction: Direction) -> Result<CentralityField> {
    let sub = InducedSubgraph::new(net, members)?;
    if sub.is_empty() {
        return Err(Error::EmptyMembers);
    }
    let n = sub.len();
    let units: Vec<UnitVector> = sub.members().iter().map(|&m| *net.unit(m)).collect();
    let scores = (0..n)
        .into_par_iter()
        .map_init(
            || (SubgraphWorkspace::default(), SubgraphWorkspace::default()),
            |(ws_in, ws_out), i| {
                if n == 1 {
                    return 0.0;
                }
                let to_i = matches!(direction, Direction::Inward | Direction::Absolute)
                    .then(|| sub.run(i, true, ws_in));
                let from_i = matches!(direction, Direction::Outward | Direction::Absolute)
                    .then(|| sub.run(i, false, ws_out));
                let mut sum = 0.0;
                for j in (0..n).filter(|&j| j != i) {
                    let inline = if sub.members()[i] == sub.members()[j] {
                        0.0
                    } else {
                        units[i].distance_m(&units[j])
                    };
                    sum += match (to_i, from_i) {
                        (Some(t), None) => ratio(inline, t[j]),
                        (None, Some(f)) => ratio(inline, f[j]),
                        (Some(t), Some(f)) => 0.5 * (ratio(inline, t[j]) + ratio(inline, f[j])),
                        (None, None) => unreachable!(),
                    };
                }
                sum / (n - 1) as f64
            },
        )
        .collect();
    Ok(CentralityField {
        direction,
        members: sub.members().to_vec(),
        scores,
    })
}

/// Member with the highest score; the smallest node id wins ties.
pub fn extract_central(field: &CentralityField) -> NodeId {
    let mut best = 0;
    for i in 1..field.scores.len() {
        if field.scores[i] > field.scores[best] {
            best = i;
        }
    }
    field.members[best]
}

/// Straightness computed separately inside each POI's perimeter and merged
/// into one field. Unassigned nodes are absent.
pub fn perimeter_centrality(net: &Network, pois: &PoiSet, direction: Direction) -> Result<CentralityField> {
    let part = perimeter_partition(net, pois)?;
    let mut pairs: Vec<(NodeId, f64)> = Vec::with_capacity(part.assigned_count());
    for members in part.all_members().iter().filter(|m| !m.is_empty()) {
        pairs.extend(straightness(net, members, direction)?.iter());
    }
    pairs.sort_unstable_by_key(|&(v, _)| v);
    let (members, scores) = pairs.into_iter().unzip();
    Ok(CentralityField {
        direction,
        members,
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::GeoPoint;
    use crate::network::EdgeSpec;
    use crate::synth;

    fn pt(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    fn l_shape() -> Network {
        // 0 - 1 - 2 along the equator, then 2 - 3 - 4 north, two-way
        let pts = [pt(0.0, 0.0), pt(0.0, 0.001), pt(0.0, 0.002), pt(0.001, 0.002), pt(0.002, 0.002)];
        let edges = (0..4).flat_map(|i| [EdgeSpec::auto(i, i + 1), EdgeSpec::auto(i + 1, i)]);
        Network::from_points(&pts, edges).unwrap()
    }

    #[test]
    fn straight_pair_scores_one() {
        let net = Network::from_points(
            &[pt(-22.0, -47.9), pt(-22.001, -47.9)],
            [EdgeSpec::auto(0, 1), EdgeSpec::auto(1, 0)],
        )
        .unwrap();
        for c in Direction::ALL {
            let f = straightness(&net, &[NodeId(0), NodeId(1)], c).unwrap();
            assert_eq!(f.scores(), &[1.0, 1.0]);
        }
    }

    #[test]
    fn isolated_and_single_members() {
        let net = l_shape();
        let f = straightness(&net, &[NodeId(0), NodeId(4)], Direction::Inward).unwrap();
        assert_eq!(f.scores(), &[0.0, 0.0]);
        let single = straightness(&net, &[NodeId(3)], Direction::Absolute).unwrap();
        assert_eq!(single.scores(), &[0.0]);
        assert!(matches!(straightness(&net, &[], Direction::Inward), Err(Error::EmptyMembers)));
    }

    #[test]
    fn l_shape_table() {
        let net = l_shape();
        let all: Vec<NodeId> = net.node_ids().collect();
        let f = straightness(&net, &all, Direction::Inward).unwrap();
        // frozen from the haversine + path-enumeration oracle in tests/centrality_oracle.rs
        let expected = [0.863_115_69, 0.863_115_69, 1.0, 0.863_115_69, 0.863_115_69];
        for (got, want) in f.scores().iter().zip(expected) {
            assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        }
        assert_eq!(extract_central(&f), NodeId(2));
    }

    #[test]
    fn direction_matters_on_one_way_streets() {
        // 0 -> 1 -> 2 only
        let pts = [pt(0.0, 0.0), pt(0.0, 0.001), pt(0.0, 0.002)];
        let net = Network::from_points(&pts, [EdgeSpec::auto(0, 1), EdgeSpec::auto(1, 2)]).unwrap();
        let all = [NodeId(0), NodeId(1), NodeId(2)];
        let inward = straightness(&net, &all, Direction::Inward).unwrap();
        let outward = straightness(&net, &all, Direction::Outward).unwrap();
        let absolute = straightness(&net, &all, Direction::Absolute).unwrap();
        // node 2 is reached by everyone, node 0 reaches everyone
        assert!((inward.scores()[2] - 1.0).abs() < 1e-12);
        assert_eq!(inward.scores()[0], 0.0);
        assert!((outward.scores()[0] - 1.0).abs() < 1e-12);
        assert_eq!(outward.scores()[2], 0.0);
        for i in 0..3 {
            let mean = 0.5 * (inward.scores()[i] + outward.scores()[i]);
            assert!((absolute.scores()[i] - mean).abs() < 1e-12);
        }
        assert_eq!(extract_central(&inward), NodeId(2));
        assert_eq!(extract_central(&outward), NodeId(0));
    }

    #[test]
    fn ties_pick_smallest_id() {
        let net = l_shape();
        let f = straightness(&net, &[NodeId(4), NodeId(0)], Direction::Inward).unwrap();
        assert_eq!(extract_central(&f), NodeId(0));
        let f = straightness(&net, &[NodeId(3), NodeId(2)], Direction::Outward).unwrap();
        assert_eq!(f.scores(), &[1.0, 1.0]);
        assert_eq!(extract_central(&f), NodeId(2));
    }

    #[test]
    fn perimeter_field_covers_assigned_nodes() {
        let (net, pois) = synth::clustered_grid();
        let field = perimeter_centrality(&net, &pois, Direction::Inward).unwrap();
        assert_eq!(field.len(), net.node_count());
        let part = perimeter_partition(&net, &pois).unwrap();
        let own = straightness(&net, part.members(2), Direction::Inward).unwrap();
        for (v, s) in own.iter() {
            assert_eq!(field.score(v), Some(s));
        }
    }
}

//! Shortest-path lengths to and from points of interest.
//!
//! Weights are non-negative by construction, so a binary-heap Dijkstra is
//! exact. Unreachable entries hold [`UNREACHABLE`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Network, NodeId};

pub const UNREACHABLE: f64 = f64::INFINITY;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldDirection {
    /// Lengths of paths v -> origin.
    ToPoi,
    /// Lengths of paths origin -> v.
    FromPoi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceField {
    origin: NodeId,
    direction: FieldDirection,
    dist: Vec<f64>,
}

impl DistanceField {
    pub fn origin(&self) -> NodeId {
        self.origin
    }

    pub fn direction(&self) -> FieldDirection {
        self.direction
    }

    /// `None` when `v` is unreachable.
    pub fn get(&self, v: NodeId) -> Option<f64> {
        let d = self.dist[v.index()];
        d.is_finite().then_some(d)
    }

    /// Raw distances indexed by node, [`UNREACHABLE`] included.
    pub fn as_slice(&self) -> &[f64] {
        &self.dist
    }

    pub fn reachable_count(&self) -> usize {
        self.dist.iter().filter(|d| d.is_finite()).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source lengths along out-edges of `net`.
fn shortest_from(net: &Network, source: NodeId) -> Vec<f64> {
    let mut dist = vec![UNREACHABLE; net.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source.index()] = 0.0;
    heap.push(HeapEntry {
        dist: 0.0,
        node: source.0,
    });
    while let Some(HeapEntry { dist: d, node }) = heap.pop() {
        if d > dist[node as usize] {
            continue;
        }
        let (nbrs, weights) = net.out_row(NodeId(node));
        for (&t, &w) in nbrs.iter().zip(weights) {
            let nd = d + w;
            if nd < dist[t.index()] {
                dist[t.index()] = nd;
                heap.push(HeapEntry { dist: nd, node: t.0 });
            }
        }
    }
    dist
}

fn check(net: &Network, p: NodeId) -> Result<()> {
    if net.contains(p) {
        Ok(())
    } else {
        Err(Error::UnknownNode(p))
    }
}

/// For every v, the length of the shortest path v -> p.
pub fn distances_to(net: &Network, p: NodeId) -> Result<DistanceField> {
    check(net, p)?;
    Ok(DistanceField {
        origin: p,
        direction: FieldDirection::ToPoi,
        dist: shortest_from(&net.reverse_view(), p),
    })
}

/// For every v, the length of the shortest path p -> v.
pub fn distances_from(net: &Network, p: NodeId) -> Result<DistanceField> {
    check(net, p)?;
    Ok(DistanceField {
        origin: p,
        direction: FieldDirection::FromPoi,
        dist: shortest_from(net, p),
    })
}

pub fn distance_field(net: &Network, p: NodeId, direction: FieldDirection) -> Result<DistanceField> {
    match direction {
        FieldDirection::ToPoi => distances_to(net, p),
        FieldDirection::FromPoi => distances_from(net, p),
    }
}

/// Compact adjacency of the subgraph induced by a node subset, in local
/// indices.
#[derive(Debug)]
struct LocalCsr {
    offsets: Vec<u32>,
    targets: Vec<u32>,
    weights: Vec<f64>,
}

/// Subgraph induced by a set of members: only edges with both endpoints
/// inside are kept. Members are sorted and deduplicated.
#[derive(Debug)]
pub struct InducedSubgraph {
    members: Vec<NodeId>,
    fwd: LocalCsr,
    bwd: LocalCsr,
}

/// Reusable buffers for repeated single-source runs on one subgraph.
#[derive(Debug, Default)]
pub struct SubgraphWorkspace {
    dist: Vec<f64>,
    heap: BinaryHeap<HeapEntry>,
}

impl InducedSubgraph {
    pub fn new(net: &Network, members: &[NodeId]) -> Result<Self> {
        let mut members = members.to_vec();
        members.sort_unstable();
        members.dedup();
        if let Some(&bad) = members.iter().find(|m| !net.contains(**m)) {
            return Err(Error::UnknownNode(bad));
        }
        let mut local = vec![u32::MAX; net.node_count()];
        for (i, m) in members.iter().enumerate() {
            local[m.index()] = i as u32;
        }
        let build = |forward: bool| {
            let mut offsets = Vec::with_capacity(members.len() + 1);
            let mut targets = Vec::new();
            let mut weights = Vec::new();
            offsets.push(0);
            for &m in &members {
                let (nbrs, ws) = if forward { net.out_row(m) } else { net.in_row(m) };
                for (&t, &w) in nbrs.iter().zip(ws) {
                    let lt = local[t.index()];
                    if lt != u32::MAX {
                        targets.push(lt);
                        weights.push(w);
                    }
                }
                offsets.push(targets.len() as u32);
            }
            LocalCsr {
                offsets,
                targets,
                weights,
            }
        };
        let fwd = build(true);
        let bwd = build(false);
        Ok(InducedSubgraph { members, fwd, bwd })
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.fwd.targets.len()
    }

    pub fn local_index(&self, v: NodeId) -> Option<usize> {
        self.members.binary_search(&v).ok()
    }

    /// Lengths from member `source` (local index) to every member, or from
    /// every member to `source` when `towards` is set.
    pub fn run<'w>(&self, source: usize, towards: bool, ws: &'w mut SubgraphWorkspace) -> &'w [f64] {
        let csr = if towards { &self.bwd } else { &self.fwd };
        let n = self.members.len();
        ws.dist.clear();
        ws.dist.resize(n, UNREACHABLE);
        ws.heap.clear();
        ws.dist[source] = 0.0;
        ws.heap.push(HeapEntry {
            dist: 0.0,
            node: source as u32,
        });
        while let Some(HeapEntry { dist: d, node }) = ws.heap.pop() {
            let u = node as usize;
            if d > ws.dist[u] {
                continue;
            }
            let (lo, hi) = (csr.offsets[u] as usize, csr.offsets[u + 1] as usize);
            for k in lo..hi {
                let t = csr.targets[k] as usize;
                let nd = d + csr.weights[k];
                if nd < ws.dist[t] {
                    ws.dist[t] = nd;
                    ws.heap.push(HeapEntry {
                        dist: nd,
                        node: t as u32,
                    });
                }
            }
        }
        &ws.dist
    }
}

/// All-pairs lengths within an induced subgraph, row-major over the sorted
/// member list.
#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseTable {
    members: Vec<NodeId>,
    dist: Vec<f64>,
}

impl PairwiseTable {
    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Length of the shortest path `from -> to` inside the subgraph; `None`
    /// if unreachable or either node is not a member.
    pub fn get(&self, from: NodeId, to: NodeId) -> Option<f64> {
        let i = self.members.binary_search(&from).ok()?;
        let j = self.members.binary_search(&to).ok()?;
        let d = self.dist[i * self.members.len() + j];
        d.is_finite().then_some(d)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.members.len();
        &self.dist[i * n..(i + 1) * n]
    }
}

pub fn pairwise_in_subgraph(net: &Network, members: &[NodeId]) -> Result<PairwiseTable> {
    let sub = InducedSubgraph::new(net, members)?;
    let n = sub.len();
    let mut dist = Vec::with_capacity(n * n);
    let mut ws = SubgraphWorkspace::default();
    for i in 0..n {
        dist.extend_from_slice(sub.run(i, false, &mut ws));
    }
    Ok(PairwiseTable {
        members: sub.members,
        dist,
    })
}

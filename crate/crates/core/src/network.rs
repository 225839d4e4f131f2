//! The immutable street graph: intersections as nodes, directed street
//! segments as edges weighted by length in meters.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{great_circle, DistanceMeters, GeoPoint, UnitVector};

/// Dense node index, `0..node_count`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn new(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index exceeds u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub pos: GeoPoint,
    /// Identifier in the source data, e.g. the OSM node id.
    pub external_ref: Option<String>,
}

impl Node {
    pub fn new(index: usize, pos: GeoPoint) -> Self {
        Node {
            id: NodeId::new(index),
            pos,
            external_ref: None,
        }
    }

    pub fn with_ref(mut self, external_ref: impl Into<String>) -> Self {
        self.external_ref = Some(external_ref.into());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    pub weight: DistanceMeters,
}

/// Edge as supplied to [`Network::build`]. A missing weight is filled with
/// the great-circle length of the segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeSpec {
    pub source: NodeId,
    pub target: NodeId,
    pub weight: Option<f64>,
}

impl EdgeSpec {
    pub fn auto(source: usize, target: usize) -> Self {
        EdgeSpec {
            source: NodeId::new(source),
            target: NodeId::new(target),
            weight: None,
        }
    }

    pub fn weighted(source: usize, target: usize, weight: f64) -> Self {
        EdgeSpec {
            weight: Some(weight),
            ..EdgeSpec::auto(source, target)
        }
    }
}

/// Compressed adjacency rows, each sorted by neighbor id.
#[derive(Debug)]
struct Csr {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    weights: Vec<f64>,
}

impl Csr {
    /// `triples` must be sorted by (row, neighbor) and free of duplicates.
    fn from_sorted(n: usize, triples: &[(NodeId, NodeId, f64)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(row, _, _) in triples {
            offsets[row.index() + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Csr {
            offsets,
            neighbors: triples.iter().map(|t| t.1).collect(),
            weights: triples.iter().map(|t| t.2).collect(),
        }
    }

    fn row(&self, v: NodeId) -> (&[NodeId], &[f64]) {
        let (lo, hi) = (self.offsets[v.index()], self.offsets[v.index() + 1]);
        (&self.neighbors[lo..hi], &self.weights[lo..hi])
    }
}

/// Distance-weighted directed graph with per-node coordinates.
///
/// Cloning and [`Network::reverse_view`] are cheap: node data and both
/// adjacency directions are shared.
#[derive(Clone, Debug)]
pub struct Network {
    nodes: Arc<[Node]>,
    units: Arc<[UnitVector]>,
    out: Arc<Csr>,
    inc: Arc<Csr>,
}

impl Network {
    /// Builds a network. Node ids must equal their position in `nodes`.
    /// Parallel edges collapse to the smallest weight.
    pub fn build(nodes: Vec<Node>, edges: impl IntoIterator<Item = EdgeSpec>) -> Result<Self> {
        for (position, node) in nodes.iter().enumerate() {
            if node.id.index() != position {
                return Err(Error::NonContiguousIds {
                    position,
                    found: node.id,
                });
            }
        }
        let n = nodes.len();
        let mut triples = Vec::new();
        for e in edges {
            for end in [e.source, e.target] {
                if end.index() >= n {
                    return Err(Error::UnknownNode(end));
                }
            }
            if e.source == e.target {
                return Err(Error::SelfLoop(e.source));
            }
            let weight = match e.weight {
                Some(w) if w.is_finite() && w >= 0.0 => w,
                Some(w) => {
                    return Err(Error::InvalidWeight {
                        from: e.source,
                        to: e.target,
                        weight: w,
                    })
                }
                None => great_circle(nodes[e.source.index()].pos, nodes[e.target.index()].pos).get(),
            };
            triples.push((e.source, e.target, weight));
        }
        triples.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        triples.dedup_by_key(|t| (t.0, t.1));
        let out = Csr::from_sorted(n, &triples);
        let mut transposed: Vec<_> = triples.iter().map(|&(s, t, w)| (t, s, w)).collect();
        transposed.sort_by_key(|t| (t.0, t.1));
        let inc = Csr::from_sorted(n, &transposed);
        let units = nodes.iter().map(|nd| nd.pos.unit()).collect();
        Ok(Network {
            nodes: nodes.into(),
            units,
            out: Arc::new(out),
            inc: Arc::new(inc),
        })
    }

    /// Convenience constructor assigning ids in order.
    pub fn from_points(points: &[GeoPoint], edges: impl IntoIterator<Item = EdgeSpec>) -> Result<Self> {
        let nodes = points.iter().enumerate().map(|(i, &p)| Node::new(i, p)).collect();
        Network::build(nodes, edges)
    }

    /// The same graph with every edge pointing the other way.
    pub fn reverse_view(&self) -> Network {
        Network {
            nodes: Arc::clone(&self.nodes),
            units: Arc::clone(&self.units),
            out: Arc::clone(&self.inc),
            inc: Arc::clone(&self.out),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.neighbors.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.index())
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.index() < self.nodes.len()
    }

    /// Panics if `id` is out of range.
    pub fn pos(&self, id: NodeId) -> GeoPoint {
        self.nodes[id.index()].pos
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId::new)
    }

    pub(crate) fn unit(&self, id: NodeId) -> &UnitVector {
        &self.units[id.index()]
    }

    /// Inline distance between two nodes, in meters.
    pub fn inline_distance(&self, a: NodeId, b: NodeId) -> f64 {
        if a == b {
            return 0.0;
        }
        self.units[a.index()].distance_m(&self.units[b.index()])
    }

    pub fn out_edges(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let (n, w) = self.out.row(v);
        n.iter().copied().zip(w.iter().copied())
    }

    pub fn in_edges(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let (n, w) = self.inc.row(v);
        n.iter().copied().zip(w.iter().copied())
    }

    pub(crate) fn out_row(&self, v: NodeId) -> (&[NodeId], &[f64]) {
        self.out.row(v)
    }

    pub(crate) fn in_row(&self, v: NodeId) -> (&[NodeId], &[f64]) {
        self.inc.row(v)
    }

    pub fn edge_weight(&self, source: NodeId, target: NodeId) -> Option<f64> {
        let (n, w) = self.out.row(source);
        n.binary_search(&target).ok().map(|i| w[i])
    }

    /// All edges ordered by (source, target).
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.node_ids().flat_map(move |s| {
            self.out_edges(s).map(move |(t, w)| Edge {
                source: s,
                target: t,
                weight: DistanceMeters::new(w).expect("weights validated at build"),
            })
        })
    }

    /// Strongly connected component id per node, via iterative Kosaraju.
    pub fn strongly_connected_components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut stack: Vec<(NodeId, usize)> = Vec::new();
        for start in self.node_ids() {
            if seen[start.index()] {
                continue;
            }
            seen[start.index()] = true;
            stack.push((start, 0));
            while let Some((v, next)) = stack.last_mut() {
                let (nbrs, _) = self.out.row(*v);
                if let Some(&u) = nbrs.get(*next) {
                    *next += 1;
                    if !seen[u.index()] {
                        seen[u.index()] = true;
                        stack.push((u, 0));
                    }
                } else {
                    order.push(*v);
                    stack.pop();
                }
            }
        }
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut work = Vec::new();
        for &root in order.iter().rev() {
            if comp[root.index()] != usize::MAX {
                continue;
            }
            comp[root.index()] = count;
            work.push(root);
            while let Some(v) = work.pop() {
                for (u, _) in self.in_edges(v) {
                    if comp[u.index()] == usize::MAX {
                        comp[u.index()] = count;
                        work.push(u);
                    }
                }
            }
            count += 1;
        }
        comp
    }

    /// Subnetwork restricted to the largest strongly connected component.
    /// Returns the new network and, per new node, the id it had here.
    /// Ties between equally large components go to the one holding the
    /// smallest node id.
    pub fn largest_scc(&self) -> (Network, Vec<NodeId>) {
        let comp = self.strongly_connected_components();
        let mut sizes = vec![0usize; comp.iter().copied().max().map_or(0, |m| m + 1)];
        for &c in &comp {
            sizes[c] += 1;
        }
        let best = comp
            .iter()
            .copied()
            .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
            .unwrap_or(0);
        let kept: Vec<NodeId> = self.node_ids().filter(|v| comp[v.index()] == best).collect();
        (self.induced(&kept), kept)
    }

    /// Induced subnetwork on `members` (in the given order), renumbered
    /// densely. Edge weights are carried over.
    pub fn induced(&self, members: &[NodeId]) -> Network {
        let mut local = vec![u32::MAX; self.node_count()];
        for (i, &m) in members.iter().enumerate() {
            local[m.index()] = i as u32;
        }
        let nodes = members
            .iter()
            .enumerate()
            .map(|(i, &m)| Node {
                id: NodeId::new(i),
                ..self.nodes[m.index()].clone()
            })
            .collect();
        let edges = members.iter().flat_map(|&m| {
            let local = &local;
            self.out_edges(m).filter_map(move |(t, w)| {
                (local[t.index()] != u32::MAX).then(|| EdgeSpec {
                    source: NodeId(local[m.index()]),
                    target: NodeId(local[t.index()]),
                    weight: Some(w),
                })
            })
        });
        Network::build(nodes, edges.collect::<Vec<_>>()).expect("induced subgraph of a valid network")
    }
}

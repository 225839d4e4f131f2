use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::GeoPoint;
use crate::network::{Network, NodeId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poi {
    pub node: NodeId,
    pub label: String,
}

impl Poi {
    pub fn new(node: NodeId, label: impl Into<String>) -> Self {
        Poi {
            node,
            label: label.into(),
        }
    }
}

/// Ordered, non-empty set of points of interest. Nodes are distinct and
/// labels are unique, non-empty and free of whitespace.
///
/// The order matters: it breaks distance ties and fixes report row order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Poi>", into = "Vec<Poi>")]
pub struct PoiSet {
    pois: Vec<Poi>,
}

impl PoiSet {
    pub fn new(pois: Vec<Poi>) -> Result<Self> {
        if pois.is_empty() {
            return Err(Error::EmptyPoiSet);
        }
        let mut by_node: HashMap<NodeId, &str> = HashMap::new();
        let mut labels = std::collections::HashSet::new();
        for poi in &pois {
            if poi.label.is_empty() || poi.label.chars().any(char::is_whitespace) {
                return Err(Error::InvalidLabel(poi.label.clone()));
            }
            if let Some(first) = by_node.insert(poi.node, &poi.label) {
                return Err(Error::DuplicatePoi {
                    node: poi.node,
                    first: first.to_string(),
                    second: poi.label.clone(),
                });
            }
            if !labels.insert(poi.label.as_str()) {
                return Err(Error::DuplicateLabel(poi.label.clone()));
            }
        }
        Ok(PoiSet { pois })
    }

    /// Labels the nodes `poi00`, `poi01`, ... in order.
    pub fn from_nodes(nodes: &[NodeId]) -> Result<Self> {
        PoiSet::new(
            nodes
                .iter()
                .enumerate()
                .map(|(i, &n)| Poi::new(n, format!("poi{i:02}")))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.pois.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pois.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Poi> {
        self.pois.iter()
    }

    pub fn get(&self, index: usize) -> Option<&Poi> {
        self.pois.get(index)
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        self.pois.iter().map(|p| p.node).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.pois.iter().map(|p| p.label.as_str()).collect()
    }

    pub fn position(&self, node: NodeId) -> Option<usize> {
        self.pois.iter().position(|p| p.node == node)
    }

    pub fn position_of_label(&self, label: &str) -> Option<usize> {
        self.pois.iter().position(|p| p.label == label)
    }

    /// Checks every POI references a node of `net`.
    pub fn validate(&self, net: &Network) -> Result<()> {
        match self.pois.iter().find(|p| !net.contains(p.node)) {
            Some(p) => Err(Error::UnknownNode(p.node)),
            None => Ok(()),
        }
    }

    /// Copy with the POI at `index` moved to `node`; label and position kept.
    pub fn with_relocated(&self, index: usize, node: NodeId) -> Result<PoiSet> {
        let mut pois = self.pois.clone();
        pois[index].node = node;
        PoiSet::new(pois)
    }

    pub fn with_added(&self, poi: Poi) -> Result<PoiSet> {
        let mut pois = self.pois.clone();
        pois.push(poi);
        PoiSet::new(pois)
    }

    pub fn without(&self, node: NodeId) -> Result<PoiSet> {
        let index = self.position(node).ok_or(Error::PoiNotFound(node))?;
        let mut pois = self.pois.clone();
        pois.remove(index);
        PoiSet::new(pois)
    }
}

impl TryFrom<Vec<Poi>> for PoiSet {
    type Error = Error;

    fn try_from(pois: Vec<Poi>) -> Result<Self> {
        PoiSet::new(pois)
    }
}

impl From<PoiSet> for Vec<Poi> {
    fn from(set: PoiSet) -> Self {
        set.pois
    }
}

impl<'a> IntoIterator for &'a PoiSet {
    type Item = &'a Poi;
    type IntoIter = std::slice::Iter<'a, Poi>;

    fn into_iter(self) -> Self::IntoIter {
        self.pois.iter()
    }
}

/// Node nearest to `point` by great-circle distance, smallest id on ties.
pub fn nearest_node(net: &Network, point: GeoPoint) -> Option<NodeId> {
    let unit = point.unit();
    let mut best: Option<(NodeId, f64)> = None;
    for v in net.node_ids() {
        let d = if net.pos(v) == point {
            0.0
        } else {
            unit.distance_m(net.unit(v))
        };
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((v, d));
        }
    }
    best.map(|(v, _)| v)
}

/// Snaps labelled coordinates onto their nearest network nodes.
pub fn snap_pois(net: &Network, coords: &[(GeoPoint, String)]) -> Result<PoiSet> {
    if net.node_count() == 0 {
        return Err(Error::NoNodes);
    }
    let pois = coords
        .iter()
        .map(|(point, label)| Poi::new(nearest_node(net, *point).expect("non-empty network"), label.clone()))
        .collect();
    PoiSet::new(pois)
}

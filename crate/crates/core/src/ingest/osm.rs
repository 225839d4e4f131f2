//! OpenStreetMap XML extracts to a street network.

use std::collections::{BTreeSet, HashMap};
use std::io::BufRead;

use log::warn;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Error, Result};
use crate::geo::GeoPoint;
use crate::network::{EdgeSpec, Network, Node, NodeId};

/// Which `highway=*` values become streets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HighwayProfile {
    pub name: String,
    /// Empty means every highway value is accepted.
    pub allowed: BTreeSet<String>,
}

const DRIVE: &[&str] = &[
    "motorway",
    "trunk",
    "primary",
    "secondary",
    "tertiary",
    "residential",
    "unclassified",
    "living_street",
    "motorway_link",
    "trunk_link",
    "primary_link",
    "secondary_link",
    "tertiary_link",
];

const WALK_EXTRA: &[&str] = &["service", "pedestrian", "footway", "path", "steps", "track", "cycleway"];

impl HighwayProfile {
    /// Motor-vehicle streets plus their `_link` ramps. This is the default.
    pub fn drive() -> Self {
        HighwayProfile {
            name: "drive".into(),
            allowed: DRIVE.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// `drive` plus service roads, footways, paths and similar.
    pub fn walk() -> Self {
        HighwayProfile {
            name: "walk".into(),
            allowed: DRIVE.iter().chain(WALK_EXTRA).map(|s| s.to_string()).collect(),
        }
    }

    pub fn all() -> Self {
        HighwayProfile {
            name: "all".into(),
            allowed: BTreeSet::new(),
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "drive" | "default" => Some(Self::drive()),
            "walk" => Some(Self::walk()),
            "all" => Some(Self::all()),
            _ => None,
        }
    }

    pub fn allows(&self, highway: &str) -> bool {
        self.allowed.is_empty() || self.allowed.contains(highway)
    }
}

impl Default for HighwayProfile {
    fn default() -> Self {
        Self::drive()
    }
}

#[derive(Debug)]
pub struct OsmExtract {
    pub network: Network,
    pub ways_kept: usize,
    /// Ways that were skipped, with the reason.
    pub warnings: Vec<String>,
}

#[derive(Default)]
struct Way {
    id: String,
    refs: Vec<i64>,
    highway: Option<String>,
    oneway: Option<String>,
}

enum Oneway {
    Forward,
    Backward,
    Both,
}

impl Way {
    fn oneway(&self) -> Oneway {
        match self.oneway.as_deref() {
            Some("yes" | "true" | "1") => Oneway::Forward,
            Some("-1" | "reverse") => Oneway::Backward,
            _ => Oneway::Both,
        }
    }
}

fn attr(e: &BytesStart<'_>, key: &[u8]) -> Result<Option<String>> {
    for a in e.attributes() {
        let a = a.map_err(|err| Error::Xml(err.to_string()))?;
        if a.key.as_ref() == key {
            let v = a.unescape_value().map_err(|err| Error::Xml(err.to_string()))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

fn required<T: std::str::FromStr>(e: &BytesStart<'_>, key: &str) -> Result<T> {
    let element = String::from_utf8_lossy(e.name().as_ref()).into_owned();
    let raw = attr(e, key.as_bytes())?.ok_or_else(|| Error::Xml(format!("<{element}> without {key}")))?;
    raw.parse()
        .map_err(|_| Error::Xml(format!("<{element}> has invalid {key}='{raw}'")))
}

/// Parses an OSM XML document. Node ids are assigned densely in the order the
/// used nodes appear in the file; the OSM id is kept as `external_ref`.
pub fn parse_osm_xml<R: BufRead>(input: R, profile: &HighwayProfile) -> Result<OsmExtract> {
    let mut reader = Reader::from_reader(input);
    let mut buf = Vec::new();
    let mut coords: HashMap<i64, GeoPoint> = HashMap::new();
    let mut node_order: Vec<i64> = Vec::new();
    let mut ways: Vec<Way> = Vec::new();
    let mut current: Option<Way> = None;
    let mut depth = 0usize;

    loop {
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| Error::Xml(format!("at byte {}: {e}", reader.buffer_position())))?;
        let (start, empty) = match &event {
            Event::Start(e) => (Some(e), false),
            Event::Empty(e) => (Some(e), true),
            Event::End(e) => {
                depth = depth.saturating_sub(1);
                if e.name().as_ref() == b"way" {
                    ways.extend(current.take());
                }
                (None, false)
            }
            Event::Eof => break,
            _ => (None, false),
        };
        let Some(e) = start else {
            buf.clear();
            continue;
        };
        if !empty {
            depth += 1;
        }
        match e.name().as_ref() {
            b"node" => {
                let id: i64 = required(e, "id")?;
                let lat: f64 = required(e, "lat")?;
                let lon: f64 = required(e, "lon")?;
                let pos = GeoPoint::new(lat, lon).map_err(|err| Error::Xml(format!("node {id}: {err}")))?;
                if coords.insert(id, pos).is_none() {
                    node_order.push(id);
                }
            }
            b"way" => {
                let way = Way {
                    id: required::<String>(e, "id")?,
                    ..Way::default()
                };
                if empty {
                    ways.push(way);
                } else {
                    current = Some(way);
                }
            }
            b"nd" => {
                if let Some(way) = current.as_mut() {
                    way.refs.push(required(e, "ref")?);
                }
            }
            b"tag" => {
                if let Some(way) = current.as_mut() {
                    let k = attr(e, b"k")?.unwrap_or_default();
                    let v = attr(e, b"v")?.unwrap_or_default();
                    match k.as_str() {
                        "highway" => way.highway = Some(v),
                        "oneway" => way.oneway = Some(v),
                        _ => {}
                    }
                }
            }
            _ => {}
        }
        buf.clear();
    }
    if depth != 0 || current.is_some() {
        return Err(Error::Xml("unexpected end of document".into()));
    }

    let mut warnings = Vec::new();
    let mut segments: Vec<(i64, i64)> = Vec::new();
    let mut ways_kept = 0;
    for way in &ways {
        let Some(highway) = way.highway.as_deref() else {
            continue;
        };
        if !profile.allows(highway) {
            continue;
        }
        if let Some(missing) = way.refs.iter().find(|r| !coords.contains_key(r)) {
            let msg = format!("way {} references missing node {missing}; skipped", way.id);
            warn!("{msg}");
            warnings.push(msg);
            continue;
        }
        if way.refs.len() < 2 {
            warnings.push(format!("way {} has fewer than two nodes; skipped", way.id));
            continue;
        }
        ways_kept += 1;
        let direction = way.oneway();
        for pair in way.refs.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b {
                continue;
            }
            match direction {
                Oneway::Forward => segments.push((a, b)),
                Oneway::Backward => segments.push((b, a)),
                Oneway::Both => {
                    segments.push((a, b));
                    segments.push((b, a));
                }
            }
        }
    }

    let used: BTreeSet<i64> = segments.iter().flat_map(|&(a, b)| [a, b]).collect();
    let mut dense: HashMap<i64, NodeId> = HashMap::with_capacity(used.len());
    let mut nodes = Vec::with_capacity(used.len());
    for osm_id in node_order.into_iter().filter(|id| used.contains(id)) {
        let node = Node::new(nodes.len(), coords[&osm_id]).with_ref(osm_id.to_string());
        dense.insert(osm_id, node.id);
        nodes.push(node);
    }
    let edges: Vec<EdgeSpec> = segments
        .iter()
        .map(|(a, b)| EdgeSpec {
            source: dense[a],
            target: dense[b],
            weight: None,
        })
        .collect();
    let network = Network::build(nodes, edges)?;
    Ok(OsmExtract {
        network,
        ways_kept,
        warnings,
    })
}

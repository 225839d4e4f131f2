//! NETGEO: a line-oriented text format for geo-referenced networks.
//!
//! ```text
//! # comment
//! N <id> <lat> <lon>
//! E <source> <target> [weight_meters]
//! P <node> <label>
//! ```
//!
//! Node ids must cover `0..n` exactly (any order). Edges without a weight get
//! the great-circle length of the segment.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::geo::GeoPoint;
use crate::ingest::poi::{Poi, PoiSet};
use crate::network::{EdgeSpec, Network, Node, NodeId};

pub fn parse_netgeo<R: BufRead>(reader: R) -> Result<(Network, Option<PoiSet>)> {
    let mut nodes: BTreeMap<u32, (GeoPoint, usize)> = BTreeMap::new();
    let mut edges: Vec<(usize, u32, u32, Option<f64>)> = Vec::new();
    let mut pois: Vec<(usize, u32, String)> = Vec::new();

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&kind, args)) = tokens.split_first() else {
            continue;
        };
        match kind {
            "N" => {
                let [id, lat, lon] = args else {
                    return Err(Error::parse(line_no, "expected `N <id> <lat> <lon>`"));
                };
                let id = parse_id(line_no, id)?;
                let lat = parse_f64(line_no, lat)?;
                let lon = parse_f64(line_no, lon)?;
                let pos = GeoPoint::new(lat, lon).map_err(|e| Error::parse(line_no, e.to_string()))?;
                if nodes.insert(id, (pos, line_no)).is_some() {
                    return Err(Error::parse(line_no, format!("duplicate node id {id}")));
                }
            }
            "E" => {
                let (s, t, w) = match args {
                    [s, t] => (s, t, None),
                    [s, t, w] => (s, t, Some(parse_f64(line_no, w)?)),
                    _ => return Err(Error::parse(line_no, "expected `E <source> <target> [weight]`")),
                };
                edges.push((line_no, parse_id(line_no, s)?, parse_id(line_no, t)?, w));
            }
            "P" => {
                let [node, label] = args else {
                    return Err(Error::parse(line_no, "expected `P <node> <label>`"));
                };
                pois.push((line_no, parse_id(line_no, node)?, label.to_string()));
            }
            other => return Err(Error::parse(line_no, format!("unknown record type '{other}'"))),
        }
    }

    if nodes.is_empty() {
        return Err(Error::NoNodes);
    }
    for (expected, (&id, &(_, line_no))) in nodes.iter().enumerate() {
        if id as usize != expected {
            return Err(Error::parse(
                line_no,
                format!("node ids must be contiguous from 0; id {expected} is missing"),
            ));
        }
    }
    let n = nodes.len();
    let known = |line_no: usize, id: u32| {
        if (id as usize) < n {
            Ok(NodeId(id))
        } else {
            Err(Error::parse(line_no, format!("unknown node {id}")))
        }
    };

    let mut specs = Vec::with_capacity(edges.len());
    for &(line_no, s, t, w) in &edges {
        let (s, t) = (known(line_no, s)?, known(line_no, t)?);
        if s == t {
            return Err(Error::parse(line_no, format!("self-loop on node {s}")));
        }
        if let Some(w) = w {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::parse(line_no, format!("invalid weight {w}")));
            }
        }
        specs.push(EdgeSpec { source: s, target: t, weight: w });
    }
    let node_list = nodes.into_values().enumerate().map(|(i, (pos, _))| Node::new(i, pos)).collect();
    let net = Network::build(node_list, specs)?;

    let poi_set = if pois.is_empty() {
        None
    } else {
        let mut list = Vec::with_capacity(pois.len());
        for (line_no, node, label) in pois {
            list.push(Poi::new(known(line_no, node)?, label));
        }
        Some(PoiSet::new(list)?)
    };
    Ok((net, poi_set))
}

pub fn parse_netgeo_str(text: &str) -> Result<(Network, Option<PoiSet>)> {
    parse_netgeo(text.as_bytes())
}

fn parse_id(line: usize, token: &str) -> Result<u32> {
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid node id '{token}'")))
}

fn parse_f64(line: usize, token: &str) -> Result<f64> {
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid number '{token}'")))
}

/// Writes `net` (and optionally POIs) with explicit edge weights. Floats use
/// the shortest representation that parses back to the same value.
pub fn write_netgeo<W: Write>(mut out: W, net: &Network, pois: Option<&PoiSet>) -> Result<()> {
    writeln!(out, "# {} nodes, {} edges", net.node_count(), net.edge_count())?;
    for node in net.nodes() {
        write!(out, "N {} {} {}", node.id, node.pos.lat(), node.pos.lon())?;
        match &node.external_ref {
            Some(r) => writeln!(out, " # ref={r}")?,
            None => writeln!(out)?,
        }
    }
    for e in net.edges() {
        writeln!(out, "E {} {} {}", e.source, e.target, e.weight.get())?;
    }
    for poi in pois.into_iter().flatten() {
        writeln!(out, "P {} {}", poi.node, poi.label)?;
    }
    Ok(())
}

pub fn netgeo_string(net: &Network, pois: Option<&PoiSet>) -> String {
    let mut buf = Vec::new();
    write_netgeo(&mut buf, net, pois).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

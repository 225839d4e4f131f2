//! Turning external data into a [`Network`](crate::Network) and a
//! [`PoiSet`].

mod netgeo;
mod osm;
mod poi;

pub use netgeo::{netgeo_string, parse_netgeo, parse_netgeo_str, write_netgeo};
pub use osm::{parse_osm_xml, HighwayProfile, OsmExtract};
pub use poi::{nearest_node, snap_pois, Poi, PoiSet};

use std::io::BufRead;

use crate::error::{Error, Result};
use crate::geo::GeoPoint;
use crate::network::{Network, NodeId};

/// Keeps only the largest strongly connected component and carries the
/// POIs over to the renumbered nodes.
pub fn restrict_to_largest_scc(net: &Network, pois: Option<&PoiSet>) -> Result<(Network, Option<PoiSet>)> {
    let (sub, old_ids) = net.largest_scc();
    let Some(set) = pois else {
        return Ok((sub, None));
    };
    let mut new_id = vec![None; net.node_count()];
    for (i, old) in old_ids.iter().enumerate() {
        new_id[old.index()] = Some(NodeId::new(i));
    }
    let moved = set
        .iter()
        .map(|p| match new_id.get(p.node.index()).copied().flatten() {
            Some(n) => Ok(Poi::new(n, p.label.clone())),
            None => Err(Error::OutsideComponent {
                label: p.label.clone(),
                node: p.node,
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((sub, Some(PoiSet::new(moved)?)))
}

/// Reads a POI coordinate list: one `<lat> <lon> <label>` per line, `#`
/// comments allowed.
pub fn parse_poi_coords<R: BufRead>(reader: R) -> Result<Vec<(GeoPoint, String)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let content = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.as_slice() {
            [] => continue,
            [lat, lon, label] => {
                let parse = |t: &str| {
                    t.parse::<f64>()
                        .map_err(|_| Error::parse(i + 1, format!("invalid number '{t}'")))
                };
                let point = GeoPoint::new(parse(lat)?, parse(lon)?).map_err(|e| Error::parse(i + 1, e.to_string()))?;
                out.push((point, label.to_string()));
            }
            _ => return Err(Error::parse(i + 1, "expected `<lat> <lon> <label>`")),
        }
    }
    Ok(out)
}

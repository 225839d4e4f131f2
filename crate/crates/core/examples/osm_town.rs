//! Load an OpenStreetMap extract, keep the largest strongly connected
//! component, snap POIs and track them. Also writes the NETGEO conversion.
//!
//! cargo run --example osm_town [town.osm town.pois [out.netgeo]]

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use urbanet::ingest::{netgeo_string, parse_osm_xml, parse_poi_coords, restrict_to_largest_scc, snap_pois, HighwayProfile};
use urbanet::report::render_table;
use urbanet::{track, Direction};

fn main() -> urbanet::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut args = std::env::args().skip(1);
    let osm = args.next().map(PathBuf::from).unwrap_or(fixtures.join("town_b.osm"));
    let poi_file = args.next().map(PathBuf::from).unwrap_or(fixtures.join("town_b.pois"));
    let out = args.next();

    let extract = parse_osm_xml(BufReader::new(File::open(&osm)?), &HighwayProfile::drive())?;
    println!(
        "{}: {} ways kept, {} nodes, {} edges",
        osm.display(),
        extract.ways_kept,
        extract.network.node_count(),
        extract.network.edge_count()
    );
    for w in &extract.warnings {
        println!("  warning: {w}");
    }

    let (net, _) = restrict_to_largest_scc(&extract.network, None)?;
    println!("largest component: {} nodes, {} edges", net.node_count(), net.edge_count());

    let coords = parse_poi_coords(BufReader::new(File::open(&poi_file)?))?;
    let pois = snap_pois(&net, &coords)?;
    for poi in pois.iter() {
        let node = net.node(poi.node).unwrap();
        println!("  {} -> node {} (osm {})", poi.label, poi.node, node.external_ref.as_deref().unwrap_or("?"));
    }

    println!("\n{}", render_table(&track(&net, &pois, Direction::Outward)?));

    if let Some(out) = out {
        std::fs::write(&out, netgeo_string(&net, Some(&pois)))?;
        println!("wrote {out}");
    }
    Ok(())
}

//! GeoJSON with partition, inconsistency, centrality and relocation layers.
//!
//! cargo run --example geojson_layers [out.geojson]

use urbanet::centrality::perimeter_centrality;
use urbanet::report::{export_geojson, Layers};
use urbanet::{perimeter_partition, reduce, synth, track, Direction};

fn main() {
    let (net, pois) = synth::clustered_grid();
    let direction = Direction::Inward;
    let partition = perimeter_partition(&net, &pois).unwrap();
    let report = track(&net, &pois, direction).unwrap();
    let centrality = perimeter_centrality(&net, &pois, direction).unwrap();
    let plan = reduce(&net, &pois, direction).unwrap();

    let doc = export_geojson(
        &net,
        &Layers {
            partition: Some(&partition),
            report: Some(&report),
            centrality: Some(&centrality),
            pois: Some(&pois),
            plan: Some(&plan),
            bbox: None,
        },
    );
    let features = doc["features"].as_array().map_or(0, Vec::len);
    let text = serde_json::to_string_pretty(&doc).unwrap();
    match std::env::args().nth(1) {
        Some(path) => {
            std::fs::write(&path, text).unwrap();
            println!("{features} features written to {path}");
        }
        None => println!("{text}"),
    }
}

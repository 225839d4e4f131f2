//! Inconsistency tables for one network in all three travel directions.
//!
//! cargo run --example track_directions

use urbanet::report::render_table;
use urbanet::{synth, track, Direction};

fn main() {
    let (net, pois) = synth::clustered_grid();
    println!("{} nodes, {} edges, {} POIs\n", net.node_count(), net.edge_count(), pois.len());
    for direction in Direction::ALL {
        let report = track(&net, &pois, direction).expect("fixture POIs are valid");
        println!("{}", render_table(&report));
        for (k, nodes) in report.per_poi.iter().enumerate() {
            if !nodes.is_empty() {
                let ids: Vec<String> = nodes.iter().map(|v| v.to_string()).collect();
                println!("  {}: {}", report.pois.labels()[k], ids.join(" "));
            }
        }
        println!();
    }
}

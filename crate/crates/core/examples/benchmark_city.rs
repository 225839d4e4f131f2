//! Full reduce on a ~50k-intersection synthetic city with 16 POIs.
//!
//! cargo run --release --example benchmark_city [seed]

use std::time::Instant;

use urbanet::synth::{benchmark_city_params, random_city, random_pois};
use urbanet::{reduce, Direction};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let t = Instant::now();
    let net = random_city(&benchmark_city_params(seed));
    let pois = random_pois(&net, 16, seed);
    println!(
        "city: {} nodes, {} edges, built in {:.2?}",
        net.node_count(),
        net.edge_count(),
        t.elapsed()
    );
    println!("threads: {}", rayon::current_num_threads());
    let t = Instant::now();
    let plan = reduce(&net, &pois, Direction::Inward).expect("valid fixture");
    println!(
        "reduce: {} moves, {} -> {} in {:.2?}",
        plan.moves.len(),
        plan.totals_before,
        plan.totals_after,
        t.elapsed()
    );
}

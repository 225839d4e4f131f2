//! Greedy relocation on a random one-way city, with one POI pinned.
//!
//! cargo run --release --example reduce_city [seed]

use urbanet::report::{render_comparison, render_plan};
use urbanet::synth::{random_city, random_pois, CityParams};
use urbanet::{reduce_with_options, track, Direction, ReduceOptions};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let net = random_city(&CityParams {
        one_way_fraction: 0.3,
        drop_fraction: 0.05,
        ..CityParams::new(30, 30, seed)
    });
    let pois = random_pois(&net, 6, seed);

    let pinned = pois.get(0).expect("six POIs").node;
    let options = ReduceOptions {
        pinned: [pinned].into(),
        ..Default::default()
    };
    let plan = reduce_with_options(&net, &pois, Direction::Inward, &options).expect("valid POIs");
    println!("{} stays at node {pinned}", pois.get(0).unwrap().label);
    print!("{}", render_plan(&plan));

    for (i, round) in plan.rounds.iter().enumerate() {
        let evaluated = round.candidates.iter().filter(|c| c.total.is_some()).count();
        println!("round {}: {evaluated} candidates evaluated, committed {:?}", i + 1, round.committed);
    }

    let before = track(&net, &plan.initial_pois, Direction::Inward).unwrap();
    let after = track(&net, &plan.final_pois, Direction::Inward).unwrap();
    println!("\n{}", render_comparison(&before, &after));
}

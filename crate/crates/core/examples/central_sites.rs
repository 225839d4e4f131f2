//! Straightness centrality inside each POI's perimeter, and the most central
//! intersection of each.
//!
//! cargo run --example central_sites

use urbanet::centrality::perimeter_centrality;
use urbanet::scenarios::case_study_one;
use urbanet::{extract_central, perimeter_partition, straightness, Direction};

fn main() {
    let cs = case_study_one();
    let (net, pois) = cs.baseline();
    let part = perimeter_partition(&net, &pois).unwrap();

    for (k, poi) in pois.iter().enumerate() {
        let members = part.members(k);
        let field = straightness(&net, members, Direction::Absolute).unwrap();
        let best = extract_central(&field);
        println!(
            "{:<11} at {:>4}: {:>3} nodes, central {:>4} ({:.4}), own score {:.4}",
            poi.label,
            poi.node,
            members.len(),
            best,
            field.score(best).unwrap(),
            field.score(poi.node).unwrap_or(0.0)
        );
    }

    // the merged field is what the map layer shows
    let field = perimeter_centrality(&net, &pois, Direction::Inward).unwrap();
    let (lo, hi) = field
        .scores()
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    println!("\ninward field over {} nodes, range {lo:.4}..{hi:.4}", field.len());
}

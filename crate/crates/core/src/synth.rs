//! Synthetic street networks: regular grids, randomized grid cities, and the
//! small named fixtures used by tests, examples and the service.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geo::GeoPoint;
use crate::ingest::{Poi, PoiSet};
use crate::network::{EdgeSpec, Network, NodeId};

/// South-west corner of every synthetic grid (lat, lon).
pub const GRID_ORIGIN: (f64, f64) = (-22.02, -47.90);

fn grid_point(row: usize, col: usize, spacing_deg: f64) -> GeoPoint {
    GeoPoint::new(
        GRID_ORIGIN.0 + row as f64 * spacing_deg,
        GRID_ORIGIN.1 + col as f64 * spacing_deg,
    )
    .expect("grid stays within valid coordinates")
}

/// Grid streets as (a, b) node pairs: every east-west segment, then every
/// north-south segment. Node `row * cols + col` sits at row `row` (north
/// is up) and column `col`.
fn grid_streets(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut streets = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols.saturating_sub(1) {
            streets.push((r * cols + c, r * cols + c + 1));
        }
    }
    for r in 0..rows.saturating_sub(1) {
        for c in 0..cols {
            streets.push((r * cols + c, (r + 1) * cols + c));
        }
    }
    streets
}

/// Regular grid with automatic great-circle weights. Without
/// `bidirectional` every street points east or north.
pub fn grid(rows: usize, cols: usize, spacing_deg: f64, bidirectional: bool) -> Network {
    let points: Vec<GeoPoint> = (0..rows * cols)
        .map(|i| grid_point(i / cols, i % cols, spacing_deg))
        .collect();
    let edges = grid_streets(rows, cols).into_iter().flat_map(|(a, b)| {
        let back = bidirectional.then(|| EdgeSpec::auto(b, a));
        std::iter::once(EdgeSpec::auto(a, b)).chain(back)
    });
    Network::from_points(&points, edges).expect("grid is well formed")
}

/// A grid city with jittered intersections, closed streets and one-way
/// streets.
#[derive(Clone, Debug, PartialEq)]
pub struct CityParams {
    pub rows: usize,
    pub cols: usize,
    pub spacing_deg: f64,
    /// Maximum displacement of an intersection, as a fraction of spacing.
    pub jitter: f64,
    /// Fraction of streets that are one-way (random orientation).
    pub one_way_fraction: f64,
    /// Fraction of streets removed entirely.
    pub drop_fraction: f64,
    pub seed: u64,
}

impl CityParams {
    pub fn new(rows: usize, cols: usize, seed: u64) -> Self {
        CityParams {
            rows,
            cols,
            spacing_deg: 0.001,
            jitter: 0.25,
            one_way_fraction: 0.0,
            drop_fraction: 0.0,
            seed,
        }
    }
}

pub fn random_city(params: &CityParams) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let s = params.spacing_deg;
    let points: Vec<GeoPoint> = (0..params.rows * params.cols)
        .map(|i| {
            let (r, c) = (i / params.cols, i % params.cols);
            let dlat = rng.random_range(-1.0..=1.0) * params.jitter * s;
            let dlon = rng.random_range(-1.0..=1.0) * params.jitter * s;
            let base = grid_point(r, c, s);
            GeoPoint::new(base.lat() + dlat, base.lon() + dlon).expect("jitter stays small")
        })
        .collect();
    let mut edges = Vec::new();
    for (a, b) in grid_streets(params.rows, params.cols) {
        if rng.random_bool(params.drop_fraction) {
            continue;
        }
        if rng.random_bool(params.one_way_fraction) {
            if rng.random_bool(0.5) {
                edges.push(EdgeSpec::auto(a, b));
            } else {
                edges.push(EdgeSpec::auto(b, a));
            }
        } else {
            edges.push(EdgeSpec::auto(a, b));
            edges.push(EdgeSpec::auto(b, a));
        }
    }
    Network::from_points(&points, edges).expect("city is well formed")
}

/// `k` distinct random nodes labelled `poi00`, `poi01`, ...
pub fn random_pois(net: &Network, k: usize, seed: u64) -> PoiSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes: Vec<NodeId> = sample(&mut rng, net.node_count(), k)
        .into_iter()
        .map(NodeId::new)
        .collect();
    PoiSet::from_nodes(&nodes).expect("distinct sample")
}

/// Node id of a grid cell.
pub fn cell(cols: usize, row: usize, col: usize) -> NodeId {
    NodeId::new(row * cols + col)
}

/// Three intersections on the equator: A (node 0), B (node 1) and X (node 2)
/// between them, closer to A. Streets X->B, B->A, A->X and B->X force X to
/// reach A only through B. POIs are A and B.
pub fn three_node() -> (Network, PoiSet) {
    let pts = [(0.0, 0.0), (0.0, 0.002), (0.0, 0.0009)].map(|(a, o)| GeoPoint::new(a, o).unwrap());
    let edges = [(2, 1), (1, 0), (0, 2), (1, 2)].map(|(s, t)| EdgeSpec::auto(s, t));
    let net = Network::from_points(&pts, edges).expect("fixture");
    let pois = PoiSet::new(vec![Poi::new(NodeId(0), "A"), Poi::new(NodeId(1), "B")]).expect("fixture");
    (net, pois)
}

/// 12x12 two-way grid with four POIs packed into the south-west quadrant.
pub fn clustered_grid() -> (Network, PoiSet) {
    let net = grid(12, 12, 0.001, true);
    let nodes = [cell(12, 1, 1), cell(12, 1, 3), cell(12, 3, 1), cell(12, 3, 4)];
    (net, PoiSet::from_nodes(&nodes).expect("fixture"))
}

/// Parameters of the large benchmark city: about 50,000 intersections and
/// 130,000 directed street segments.
pub fn benchmark_city_params(seed: u64) -> CityParams {
    CityParams {
        rows: 224,
        cols: 224,
        spacing_deg: 0.0009,
        jitter: 0.2,
        one_way_fraction: 0.6,
        drop_fraction: 0.07,
        seed,
    }
}

/// Named fixtures for the CLI and the service. Returns the network and the
/// fixture's own POIs, if it has any.
pub fn fixture(name: &str, seed: u64) -> Option<(Network, Option<PoiSet>)> {
    let with = |(n, p): (Network, PoiSet)| Some((n, Some(p)));
    match name {
        "three_node" => with(three_node()),
        "clustered_grid" => with(clustered_grid()),
        "case_study_one" => with(crate::scenarios::case_study_one().baseline()),
        "case_study_two" => with(crate::scenarios::case_study_two().baseline()),
        "grid" => Some((grid(12, 12, 0.001, true), None)),
        "city" => {
            let net = random_city(&CityParams {
                one_way_fraction: 0.25,
                drop_fraction: 0.05,
                ..CityParams::new(20, 20, seed)
            });
            let pois = random_pois(&net, 6, seed);
            Some((net, Some(pois)))
        }
        "benchmark_city" => {
            let net = random_city(&benchmark_city_params(seed));
            let pois = random_pois(&net, 16, seed);
            Some((net, Some(pois)))
        }
        _ => None,
    }
}

pub const FIXTURE_NAMES: &[&str] = &[
    "three_node",
    "clustered_grid",
    "case_study_one",
    "case_study_two",
    "grid",
    "city",
    "benchmark_city",
];

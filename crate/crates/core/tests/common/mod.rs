//! Brute-force oracles and the random instance family shared by the
//! integration tests and the acceptance suite.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use urbanet::synth::{random_city, random_pois, CityParams};
use urbanet::{great_circle, Direction, Network, NodeId, PoiSet};

/// All-pairs shortest path lengths, `d[i][j]` from `i` to `j`.
pub fn floyd_warshall(net: &Network) -> Vec<Vec<f64>> {
    let n = net.node_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in net.edges() {
        let w = e.weight.get();
        let cell = &mut d[e.source.index()][e.target.index()];
        if w < *cell {
            *cell = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i][k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = dik + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Index of the smallest finite value; the earliest wins ties.
pub fn argmin(values: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, v) in values.enumerate() {
        if v.is_finite() && best.is_none_or(|(_, b)| v < b) {
            best = Some((k, v));
        }
    }
    best.map(|(k, _)| k)
}

/// Inconsistent nodes per POI straight from the set definitions:
/// perimeter minus network region, with nodes that reach no POI left out
/// unless `strict`.
pub fn oracle_track(net: &Network, pois: &PoiSet, direction: Direction, strict: bool) -> Vec<Vec<NodeId>> {
    let d = floyd_warshall(net);
    let nodes = pois.nodes();
    let mut out = vec![Vec::new(); pois.len()];
    for v in 0..net.node_count() {
        let here = net.pos(NodeId::new(v));
        let perimeter = argmin(nodes.iter().map(|p| great_circle(here, net.pos(*p)).get())).expect("finite");
        let to = argmin(nodes.iter().map(|p| d[v][p.index()]));
        let from = argmin(nodes.iter().map(|p| d[p.index()][v]));
        // None = skipped, Some(bad)
        let judge = |region: Option<usize>| match region {
            Some(k) => Some(k != perimeter),
            None if strict => Some(true),
            None => None,
        };
        let verdict = match direction {
            Direction::Inward => judge(to),
            Direction::Outward => judge(from),
            Direction::Absolute => match (judge(to), judge(from)) {
                (Some(a), Some(b)) => Some(a && b),
                _ => None,
            },
        };
        if verdict == Some(true) {
            out[perimeter].push(NodeId::new(v));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub index: usize,
    pub params: CityParams,
    pub net: Network,
    pub pois: PoiSet,
}

/// Instance `i` of the random family: jittered grids 5x5 to 20x20, 10-40%
/// one-way streets, 2-8 POIs.
pub fn instance(i: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + i as u64);
    let rows = rng.random_range(5..=20);
    let cols = rng.random_range(5..=20);
    let params = CityParams {
        one_way_fraction: rng.random_range(0.10..=0.40),
        ..CityParams::new(rows, cols, rng.random())
    };
    let net = random_city(&params);
    let k = rng.random_range(2..=8);
    let pois = random_pois(&net, k, rng.random());
    Instance {
        index: i,
        params,
        net,
        pois,
    }
}

/// Instance `i` with every street two-way.
pub fn bidirectional_instance(i: usize) -> Instance {
    let mut inst = instance(i);
    inst.params.one_way_fraction = 0.0;
    inst.net = random_city(&inst.params);
    inst
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

mod common;

use common::rel_close;
use proptest::prelude::*;
use urbanet::synth::{random_city, CityParams};
use urbanet::{extract_central, great_circle, straightness, Direction, Network, NodeId};

/// Shortest `from -> to` length by trying every simple path that stays
/// inside `members`.
fn enumerate_shortest(net: &Network, members: &[NodeId], from: NodeId, to: NodeId) -> f64 {
    fn dfs(net: &Network, members: &[NodeId], at: NodeId, to: NodeId, on_path: &mut Vec<NodeId>, len: f64, best: &mut f64) {
        if at == to {
            *best = best.min(len);
            return;
        }
        for (next, w) in net.out_edges(at) {
            if members.contains(&next) && !on_path.contains(&next) {
                on_path.push(next);
                dfs(net, members, next, to, on_path, len + w, best);
                on_path.pop();
            }
        }
    }
    let mut best = f64::INFINITY;
    dfs(net, members, from, to, &mut vec![from], 0.0, &mut best);
    best
}

fn ratio(inline: f64, network: f64) -> f64 {
    if network.is_finite() && network > 0.0 {
        inline / network
    } else {
        0.0
    }
}

fn oracle_scores(net: &Network, members: &[NodeId], direction: Direction) -> Vec<f64> {
    let n = members.len();
    members
        .iter()
        .map(|&i| {
            if n < 2 {
                return 0.0;
            }
            let sum: f64 = members
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| {
                    let inline = great_circle(net.pos(i), net.pos(j)).get();
                    let inward = ratio(inline, enumerate_shortest(net, members, j, i));
                    let outward = ratio(inline, enumerate_shortest(net, members, i, j));
                    match direction {
                        Direction::Inward => inward,
                        Direction::Outward => outward,
                        Direction::Absolute => (inward + outward) / 2.0,
                    }
                })
                .sum();
            sum / (n - 1) as f64
        })
        .collect()
}

#[test]
fn matches_path_enumeration() {
    for seed in 0..30u64 {
        let net = random_city(&CityParams {
            one_way_fraction: 0.4,
            drop_fraction: 0.1,
            ..CityParams::new(3, 3, seed)
        });
        let members: Vec<NodeId> = (0..9u32).filter(|i| (i + seed as u32) % 4 != 0).map(NodeId).collect();
        for direction in Direction::ALL {
            let field = straightness(&net, &members, direction).unwrap();
            let expected = oracle_scores(&net, &members, direction);
            for (k, (got, want)) in field.scores().iter().zip(&expected).enumerate() {
                assert!(rel_close(*got, *want, 1e-12), "seed {seed} {direction} member {k}: {got} vs {want}");
            }
            let best = expected.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let central = extract_central(&field);
            let first_best = members[expected.iter().position(|s| *s == best).unwrap()];
            assert!(
                central == first_best || rel_close(field.score(central).unwrap(), best, 1e-12),
                "seed {seed} {direction}"
            );
        }
    }
}

#[test]
fn straight_pair_scores_exactly_one() {
    let pts = [(-22.0, -47.9), (-22.0, -47.89)].map(|(a, o)| urbanet::GeoPoint::new(a, o).unwrap());
    let net = Network::from_points(&pts, [urbanet::EdgeSpec::auto(0, 1), urbanet::EdgeSpec::auto(1, 0)]).unwrap();
    for direction in Direction::ALL {
        let field = straightness(&net, &[NodeId(0), NodeId(1)], direction).unwrap();
        assert_eq!(field.scores(), &[1.0, 1.0]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scores_stay_in_unit_interval(
        rows in 2usize..8,
        cols in 2usize..8,
        one_way in 0.0f64..0.5,
        seed in any::<u64>(),
        direction in prop::sample::select(Direction::ALL.to_vec()),
    ) {
        let net = random_city(&CityParams { one_way_fraction: one_way, ..CityParams::new(rows, cols, seed) });
        let members: Vec<NodeId> = net.node_ids().collect();
        let field = straightness(&net, &members, direction).unwrap();
        for &s in field.scores() {
            prop_assert!((0.0..=1.0 + 1e-9).contains(&s), "score {}", s);
        }
    }
}

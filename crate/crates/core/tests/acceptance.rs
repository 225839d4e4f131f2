//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! cargo test --release --test acceptance

mod common;

use std::collections::HashSet;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::{bidirectional_instance, instance, oracle_track, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use urbanet::ingest::{parse_osm_xml, parse_poi_coords, restrict_to_largest_scc, snap_pois, HighwayProfile};
use urbanet::report::{format_percent, render_table, table_rows};
use urbanet::scenarios::{case_study_one, case_study_two};
use urbanet::synth::{benchmark_city_params, random_city, random_pois};
use urbanet::{
    great_circle, network_partition, perimeter_partition, reduce, straightness, track, track_with_options,
    Direction, EdgeSpec, FieldDirection, GeoPoint, InconsistencyReport, Network, NodeId, Partition, Poi, PoiSet,
    TrackOptions,
};

const INSTANCES: usize = 200;

struct Outcome {
    passed: bool,
    detail: String,
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        passed: false,
        detail: detail.into(),
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    Outcome { passed: ok, detail }
}

fn partition_violations(part: &Partition, n: usize) -> usize {
    let mut seen = vec![false; n];
    let mut bad = 0;
    let mut count = 0;
    for members in part.all_members() {
        for v in members {
            if std::mem::replace(&mut seen[v.index()], true) {
                bad += 1;
            }
            count += 1;
        }
    }
    if count != part.assigned_count() {
        bad += 1;
    }
    bad + part.unassigned().filter(|v| seen[v.index()]).count()
}

fn partition_laws(instances: &[Instance]) -> Outcome {
    let mut violations = 0;
    for inst in instances {
        let n = inst.net.node_count();
        let perimeter = perimeter_partition(&inst.net, &inst.pois).unwrap();
        violations += partition_violations(&perimeter, n);
        if perimeter.assigned_count() != n {
            violations += 1;
        }
        for dir in [FieldDirection::ToPoi, FieldDirection::FromPoi] {
            violations += partition_violations(&network_partition(&inst.net, &inst.pois, dir).unwrap(), n);
        }
    }
    check(
        violations == 0,
        format!("{} instances, 3 partitions each, {violations} violations", instances.len()),
    )
}

fn oracle_equivalence(instances: &[Instance]) -> Outcome {
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for inst in instances.iter().filter(|i| i.net.node_count() <= 64) {
        for direction in Direction::ALL {
            for strict in [false, true] {
                let options = TrackOptions {
                    strict_unreachable: strict,
                };
                let got = track_with_options(&inst.net, &inst.pois, direction, options).unwrap();
                if got.per_poi != oracle_track(&inst.net, &inst.pois, direction, strict) {
                    mismatches.push(format!("#{} {direction} strict={strict}", inst.index));
                }
                compared += 1;
            }
        }
    }
    if compared == 0 {
        return fail("no instance with at most 64 nodes");
    }
    check(
        mismatches.is_empty(),
        format!(
            "{} comparisons on {} small instances, mismatches: {:?}",
            compared,
            compared / 6,
            mismatches
        ),
    )
}

fn osm_towns() -> Vec<(String, Network, PoiSet)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    ["town_a", "town_b", "town_c"]
        .iter()
        .map(|t| {
            let file = BufReader::new(File::open(dir.join(format!("{t}.osm"))).unwrap());
            let extract = parse_osm_xml(file, &HighwayProfile::default()).unwrap();
            let (net, _) = restrict_to_largest_scc(&extract.network, None).unwrap();
            let coords = parse_poi_coords(BufReader::new(File::open(dir.join(format!("{t}.pois"))).unwrap())).unwrap();
            let pois = snap_pois(&net, &coords).unwrap();
            (t.to_string(), net, pois)
        })
        .collect()
}

struct ReduceStats {
    runs: usize,
    increases: usize,
    twice_moved: usize,
    too_many_rounds: usize,
    improved: usize,
    per_poi_setbacks: usize,
}

fn reduce_all(instances: &[Instance], towns: &[(String, Network, PoiSet)]) -> ReduceStats {
    let mut s = ReduceStats {
        runs: 0,
        increases: 0,
        twice_moved: 0,
        too_many_rounds: 0,
        improved: 0,
        per_poi_setbacks: 0,
    };
    let cases = instances
        .iter()
        .map(|i| (format!("#{}", i.index), &i.net, &i.pois))
        .chain(towns.iter().map(|(name, n, p)| (name.clone(), n, p)));
    for (name, net, pois) in cases {
        for direction in Direction::ALL {
            let plan = reduce(net, pois, direction).unwrap();
            s.runs += 1;
            if plan.totals_after > plan.totals_before {
                s.increases += 1;
                println!("    increase on {name} {direction}: {} -> {}", plan.totals_before, plan.totals_after);
            }
            if plan.totals_after < plan.totals_before {
                s.improved += 1;
            }
            let mut seen = HashSet::new();
            if !plan.moves.iter().all(|m| seen.insert(m.poi)) {
                s.twice_moved += 1;
            }
            // the last round is the one that found nothing to commit
            if plan.moves.len() > pois.len() || plan.rounds.len() > pois.len() + 1 {
                s.too_many_rounds += 1;
            }
            let setbacks = plan.per_poi_increases();
            if !setbacks.is_empty() {
                s.per_poi_setbacks += 1;
                if !name.starts_with('#') {
                    for (k, b, a) in setbacks {
                        println!("    setback on {name} {direction}: POI {k} {b} -> {a}");
                    }
                }
            }
        }
    }
    s
}

fn same_report(a: &InconsistencyReport, b: &InconsistencyReport) -> bool {
    a.per_poi == b.per_poi && a.total == b.total && a.consistent_per_poi == b.consistent_per_poi
}

fn symmetry() -> Outcome {
    let mut differing = Vec::new();
    let mut nonzero = 0;
    for i in 0..INSTANCES {
        let inst = bidirectional_instance(i);
        let reports: Vec<_> = Direction::ALL
            .iter()
            .map(|&d| track(&inst.net, &inst.pois, d).unwrap())
            .collect();
        if reports[0].total > 0 {
            nonzero += 1;
        }
        if !(same_report(&reports[0], &reports[1]) && same_report(&reports[0], &reports[2])) {
            differing.push(i);
        }
    }
    check(
        differing.is_empty(),
        format!("{INSTANCES} two-way instances ({nonzero} with inconsistencies), differing: {differing:?}"),
    )
}

fn haversine(a: GeoPoint, b: GeoPoint) -> f64 {
    let (la1, lo1, la2, lo2) = (
        a.lat().to_radians(),
        a.lon().to_radians(),
        b.lat().to_radians(),
        b.lon().to_radians(),
    );
    let h = ((la2 - la1) / 2.0).sin().powi(2) + la1.cos() * la2.cos() * ((lo2 - lo1) / 2.0).sin().powi(2);
    2.0 * 6_378_000.0 * h.sqrt().min(1.0).asin()
}

fn geometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut asym = 0;
    let mut nonzero_identity = 0;
    for k in 0..10_000 {
        let a = GeoPoint::new(rng.random_range(-89.0..89.0), rng.random_range(-180.0..180.0)).unwrap();
        let b = if k % 2 == 0 {
            GeoPoint::new(rng.random_range(-89.0..89.0), rng.random_range(-180.0..180.0)).unwrap()
        } else {
            // city scale
            GeoPoint::new(
                (a.lat() + rng.random_range(-0.05..0.05)).clamp(-90.0, 90.0),
                a.lon() + rng.random_range(-0.05..0.05),
            )
            .unwrap()
        };
        let d = great_circle(a, b).get();
        let h = haversine(a, b);
        if h > 0.0 {
            worst = worst.max((d - h).abs() / h);
        }
        if great_circle(b, a).get() != d {
            asym += 1;
        }
        if great_circle(a, a).get() != 0.0 {
            nonzero_identity += 1;
        }
    }
    check(
        worst <= 1e-3 && asym == 0 && nonzero_identity == 0,
        format!("10000 pairs, worst relative error {worst:.2e}, asymmetric {asym}, identity failures {nonzero_identity}"),
    )
}

fn straightness_bound(instances: &[Instance]) -> Outcome {
    let mut max_score: f64 = 0.0;
    let mut below_zero = 0;
    let mut fields = 0;
    for inst in instances.iter().filter(|i| i.net.node_count() <= 150) {
        let all: Vec<NodeId> = inst.net.node_ids().collect();
        for d in Direction::ALL {
            let field = straightness(&inst.net, &all, d).unwrap();
            for &s in field.scores() {
                max_score = max_score.max(s);
                if s < 0.0 {
                    below_zero += 1;
                }
            }
            fields += 1;
        }
    }
    let pts = [(-22.0, -47.9), (-22.0005, -47.8991)].map(|(a, o)| GeoPoint::new(a, o).unwrap());
    let pair = Network::from_points(&pts, [EdgeSpec::auto(0, 1), EdgeSpec::auto(1, 0)]).unwrap();
    let pair_ok = Direction::ALL.iter().all(|&d| {
        straightness(&pair, &[NodeId(0), NodeId(1)], d)
            .unwrap()
            .scores()
            .iter()
            .all(|&s| s == 1.0)
    });
    check(
        max_score <= 1.0 + 1e-9 && below_zero == 0 && pair_ok,
        format!("{fields} fields, max score {max_score:.15}, negative {below_zero}, straight pair exactly 1.0: {pair_ok}"),
    )
}

fn performance() -> Outcome {
    let seed = 7;
    let net = random_city(&benchmark_city_params(seed));
    let pois = random_pois(&net, 16, seed);
    let started = Instant::now();
    let plan = reduce(&net, &pois, Direction::Inward).unwrap();
    let elapsed = started.elapsed();
    let threads = rayon::current_num_threads();
    check(
        elapsed < Duration::from_secs(60) && net.node_count() >= 50_000 && net.edge_count() >= 129_000,
        format!(
            "{} nodes, {} edges, 16 POIs: {} moves, {} -> {} in {:.1?} on {threads} thread(s)",
            net.node_count(),
            net.edge_count(),
            plan.moves.len(),
            plan.totals_before,
            plan.totals_after,
            elapsed
        ),
    )
}

fn case_studies() -> Outcome {
    let one = case_study_one();
    let base = one.track_baseline().unwrap().total;
    let manual = track(&one.network, &one.manual_pois().unwrap(), one.direction).unwrap().total;
    let suggested = one.suggest().unwrap().totals_after;

    let two = case_study_two();
    let base2 = two.track_baseline().unwrap().total;
    let merged = track(&two.network, &two.merged_pois().unwrap(), two.direction).unwrap().total;
    let merged_reduced = two.suggest().unwrap().totals_after;

    check(
        manual > suggested && merged < base2 && merged_reduced <= merged,
        format!(
            "one: baseline {base}, manual {manual}, suggested {suggested}; two: baseline {base2}, merged {merged}, merged+reduce {merged_reduced}"
        ),
    )
}

fn table_rendering() -> Outcome {
    // the first row is 13 of 559; the rest fill up the total
    let rest = 559 - 13;
    let nodes: Vec<NodeId> = (0..rest + 13 + 2).map(|i| NodeId::new(i as usize)).collect();
    let pois = PoiSet::new(vec![Poi::new(NodeId(0), "01"), Poi::new(NodeId(1), "02")]).unwrap();
    let report = InconsistencyReport {
        direction: Direction::Inward,
        pois,
        per_poi: vec![nodes[2..15].to_vec(), nodes[15..15 + rest as usize].to_vec()],
        consistent_per_poi: vec![Vec::new(), Vec::new()],
        total: 559,
        skipped_unreachable: 0,
    };
    let cell = format_percent(table_rows(&report)[0].percent);
    let table = render_table(&report);
    check(
        cell == "2.3%" && table.lines().any(|l| l.starts_with("01") && l.ends_with("2.3%")),
        format!("13 of 559 renders as {cell}"),
    )
}

fn main() {
    let started = Instant::now();
    let instances: Vec<Instance> = (0..INSTANCES).map(instance).collect();
    let towns = osm_towns();
    let stats = reduce_all(&instances, &towns);

    let results: Vec<(&str, Outcome)> = vec![
        ("partition laws", partition_laws(&instances)),
        ("oracle equivalence", oracle_equivalence(&instances)),
        (
            "monotonicity",
            check(
                stats.increases == 0,
                format!(
                    "{} reduce runs ({INSTANCES} instances + 3 OSM towns, 3 directions), {} increases, {} improved, {} with per-POI setbacks",
                    stats.runs, stats.increases, stats.improved, stats.per_poi_setbacks
                ),
            ),
        ),
        (
            "single-move rule",
            check(
                stats.twice_moved == 0 && stats.too_many_rounds == 0,
                format!(
                    "{} plans, {} with a POI moved twice, {} over the iteration bound",
                    stats.runs, stats.twice_moved, stats.too_many_rounds
                ),
            ),
        ),
        ("symmetry", symmetry()),
        ("geometry", geometry()),
        ("straightness bound", straightness_bound(&instances)),
        ("performance", performance()),
        ("case studies", case_studies()),
        ("table rendering", table_rendering()),
    ];

    let mut failed = 0;
    for (name, outcome) in &results {
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        if !outcome.passed {
            failed += 1;
        }
        println!("{tag}  {name}: {}", outcome.detail);
    }
    println!(
        "{} of {} criteria passed in {:.1?}",
        results.len() - failed,
        results.len(),
        started.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

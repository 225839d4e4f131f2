//! Text tables and GeoJSON layers.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::centrality::CentralityField;
use crate::geo::GeoPoint;
use crate::inconsistency::{Direction, InconsistencyReport};
use crate::ingest::PoiSet;
use crate::network::{Network, NodeId};
use crate::partition::Partition;
use crate::reducer::RelocationPlan;

/// One table row: count and its share of the direction's total.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub poi_label: String,
    pub count: usize,
    pub percent: f64,
}

pub fn table_rows(report: &InconsistencyReport) -> Vec<TableRow> {
    report
        .pois
        .iter()
        .zip(&report.per_poi)
        .map(|(poi, set)| TableRow {
            poi_label: poi.label.clone(),
            count: set.len(),
            percent: percent(set.len(), report.total),
        })
        .collect()
}

/// Flat JSON view of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub direction: Direction,
    pub total: usize,
    pub skipped_unreachable: usize,
    pub pois: Vec<PoiSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoiSummary {
    pub label: String,
    pub node: NodeId,
    pub count: usize,
    pub percent: f64,
    pub inconsistent: Vec<NodeId>,
}

pub fn summarize(report: &InconsistencyReport) -> ReportSummary {
    ReportSummary {
        direction: report.direction,
        total: report.total,
        skipped_unreachable: report.skipped_unreachable,
        pois: report
            .pois
            .iter()
            .zip(&report.per_poi)
            .map(|(p, set)| PoiSummary {
                label: p.label.clone(),
                node: p.node,
                count: set.len(),
                percent: percent(set.len(), report.total),
                inconsistent: set.clone(),
            })
            .collect(),
    }
}

fn percent(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * count as f64 / total as f64
    }
}

pub fn format_percent(p: f64) -> String {
    format!("{p:.1}%")
}

fn label_width(labels: impl Iterator<Item = usize>) -> usize {
    labels.chain([5]).max().unwrap_or(5)
}

/// Per-POI inconsistency counts with a total row.
///
/// ```text
/// inward inconsistencies
/// POI       #       %
/// A         1  100.0%
/// B         0    0.0%
/// Total     1  100.0%
/// ```
pub fn render_table(report: &InconsistencyReport) -> String {
    let rows = table_rows(report);
    let w = label_width(rows.iter().map(|r| r.poi_label.len()));
    let mut out = String::new();
    writeln!(out, "{} inconsistencies", report.direction).unwrap();
    writeln!(out, "{:<w$} {:>6} {:>7}", "POI", "#", "%").unwrap();
    for r in &rows {
        writeln!(out, "{:<w$} {:>6} {:>7}", r.poi_label, r.count, format_percent(r.percent)).unwrap();
    }
    let total_pct = if report.total > 0 { 100.0 } else { 0.0 };
    writeln!(out, "{:<w$} {:>6} {:>7}", "Total", report.total, format_percent(total_pct)).unwrap();
    out
}

/// Side-by-side counts before and after a relocation. Rows follow the
/// POI order of `before`, then labels that only exist in `after`; labels are
/// matched by name.
pub fn render_comparison(before: &InconsistencyReport, after: &InconsistencyReport) -> String {
    let before_rows = table_rows(before);
    let after_rows = table_rows(after);
    let w = label_width(before_rows.iter().chain(&after_rows).map(|r| r.poi_label.len()));
    let mut out = String::new();
    writeln!(out, "{} inconsistencies", before.direction).unwrap();
    writeln!(out, "{:<w$} | {:^15} | {:^15}", "", "Original City", "Enhanced City").unwrap();
    writeln!(out, "{:<w$} | {:>6} {:>8} | {:>6} {:>8}", "POI", "#", "%", "#", "%").unwrap();
    for b in &before_rows {
        let a = after_rows.iter().find(|r| r.poi_label == b.poi_label);
        let (ac, ap) = a.map_or(("---".to_string(), "---".to_string()), |r| {
            (r.count.to_string(), format_percent(r.percent))
        });
        writeln!(
            out,
            "{:<w$} | {:>6} {:>8} | {:>6} {:>8}",
            b.poi_label,
            b.count,
            format_percent(b.percent),
            ac,
            ap
        )
        .unwrap();
    }
    for a in after_rows
        .iter()
        .filter(|a| !before_rows.iter().any(|b| b.poi_label == a.poi_label))
    {
        writeln!(
            out,
            "{:<w$} | {:>6} {:>8} | {:>6} {:>8}",
            a.poi_label,
            "---",
            "---",
            a.count,
            format_percent(a.percent)
        )
        .unwrap();
    }
    let pct = |t: usize| format_percent(if t > 0 { 100.0 } else { 0.0 });
    writeln!(
        out,
        "{:<w$} | {:>6} {:>8} | {:>6} {:>8}",
        "Total",
        before.total,
        pct(before.total),
        after.total,
        pct(after.total)
    )
    .unwrap();
    out
}

/// `inconsistencies: 559 -> 399 (160 fewer)`
pub fn summary_line(before: usize, after: usize) -> String {
    let delta = if after <= before {
        format!("{} fewer", before - after)
    } else {
        format!("{} more", after - before)
    };
    format!("inconsistencies: {before} -> {after} ({delta})")
}

/// Move list and totals of a relocation plan.
pub fn render_plan(plan: &RelocationPlan) -> String {
    let mut out = String::new();
    if plan.moves.is_empty() {
        writeln!(out, "no moves").unwrap();
    }
    for m in &plan.moves {
        writeln!(out, "move {} from node {} to node {} (total {})", m.label, m.old, m.new, m.total_after).unwrap();
    }
    writeln!(out, "{}", summary_line(plan.totals_before, plan.totals_after)).unwrap();
    out
}

/// Axis-aligned bounding box in degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox {
    pub min_lon: f64,
    pub min_lat: f64,
    pub max_lon: f64,
    pub max_lat: f64,
}

impl BBox {
    pub fn contains(&self, p: GeoPoint) -> bool {
        (self.min_lon..=self.max_lon).contains(&p.lon()) && (self.min_lat..=self.max_lat).contains(&p.lat())
    }
}

impl FromStr for BBox {
    type Err = String;

    /// `min_lon,min_lat,max_lon,max_lat`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("invalid bbox '{s}': {e}"))?;
        match parts.as_slice() {
            &[min_lon, min_lat, max_lon, max_lat] if min_lon <= max_lon && min_lat <= max_lat => Ok(BBox {
                min_lon,
                min_lat,
                max_lon,
                max_lat,
            }),
            _ => Err(format!("invalid bbox '{s}': expected min_lon,min_lat,max_lon,max_lat")),
        }
    }
}

/// What to draw on top of the bare network.
#[derive(Clone, Copy, Debug, Default)]
pub struct Layers<'a> {
    pub partition: Option<&'a Partition>,
    pub report: Option<&'a InconsistencyReport>,
    pub centrality: Option<&'a CentralityField>,
    pub pois: Option<&'a PoiSet>,
    pub plan: Option<&'a RelocationPlan>,
    pub bbox: Option<BBox>,
}

fn point(p: GeoPoint) -> Value {
    json!({ "type": "Point", "coordinates": [p.lon(), p.lat()] })
}

fn feature(geometry: Value, properties: Map<String, Value>) -> Value {
    json!({ "type": "Feature", "geometry": geometry, "properties": properties })
}

/// Network as a GeoJSON `FeatureCollection`: one Point per node, one
/// LineString per directed edge, plus a Point per POI and a LineString per
/// relocation when those layers are present. Coordinates are `[lon, lat]`.
pub fn export_geojson(net: &Network, layers: &Layers<'_>) -> Value {
    let inside = |p: GeoPoint| layers.bbox.is_none_or(|b| b.contains(p));
    let n = net.node_count();
    let labels: Option<Vec<String>> = layers
        .pois
        .or(layers.report.map(|r| &r.pois))
        .map(|set| set.iter().map(|p| p.label.clone()).collect());
    let flags = layers.report.map(|r| r.node_flags(n));
    let report_labels: Option<Vec<&str>> = layers.report.map(|r| r.pois.labels());

    let mut role = vec!["node"; n];
    if let Some(pois) = layers.pois {
        for p in pois {
            role[p.node.index()] = "poi";
        }
    }
    if let Some(plan) = layers.plan {
        for m in &plan.moves {
            role[m.old.index()] = "old_poi";
            role[m.new.index()] = "new_poi";
        }
    }
    let scaled = layers.centrality.map(|field| {
        let (lo, hi) = field
            .scores()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        let mut per_node = vec![None; n];
        for (v, s) in field.iter() {
            let unit = if hi > lo {
                (s - lo) / (hi - lo)
            } else if hi > 0.0 {
                1.0
            } else {
                0.0
            };
            per_node[v.index()] = Some((s, unit));
        }
        per_node
    });

    let mut features = Vec::new();
    for node in net.nodes() {
        if !inside(node.pos) {
            continue;
        }
        let v = node.id.index();
        let mut props = Map::new();
        props.insert("kind".into(), json!("node"));
        props.insert("id".into(), json!(v));
        if let Some(r) = &node.external_ref {
            props.insert("ref".into(), json!(r));
        }
        props.insert("role".into(), json!(role[v]));
        if let Some(part) = layers.partition {
            let label = part
                .poi_of(node.id)
                .and_then(|k| labels.as_ref().map(|l| l[k].clone()));
            props.insert("poi".into(), json!(label));
        }
        if let Some(flags) = &flags {
            props.insert("inconsistent".into(), json!(flags[v].is_some()));
            if let (Some(k), None) = (flags[v], layers.partition) {
                props.insert("poi".into(), json!(report_labels.as_ref().expect("report")[k]));
            }
        }
        if let Some(scaled) = &scaled {
            let (raw, unit) = scaled[v].map_or((Value::Null, Value::Null), |(r, u)| (json!(r), json!(u)));
            props.insert("centrality".into(), unit);
            props.insert("centrality_raw".into(), raw);
        }
        features.push(feature(point(node.pos), props));
    }
    for e in net.edges() {
        let (a, b) = (net.pos(e.source), net.pos(e.target));
        if !(inside(a) && inside(b)) {
            continue;
        }
        let mut props = Map::new();
        props.insert("kind".into(), json!("edge"));
        props.insert("source".into(), json!(e.source.index()));
        props.insert("target".into(), json!(e.target.index()));
        props.insert("weight".into(), json!(e.weight.get()));
        let geom = json!({ "type": "LineString", "coordinates": [[a.lon(), a.lat()], [b.lon(), b.lat()]] });
        features.push(feature(geom, props));
    }
    if let Some(pois) = layers.pois {
        for (k, p) in pois.iter().enumerate() {
            let pos = net.pos(p.node);
            if !inside(pos) {
                continue;
            }
            let mut props = Map::new();
            props.insert("kind".into(), json!("poi"));
            props.insert("label".into(), json!(p.label));
            props.insert("node".into(), json!(p.node.index()));
            if let Some(r) = layers.report {
                if let Some(set) = r.pois.position_of_label(&p.label).map(|i| &r.per_poi[i]) {
                    props.insert("inconsistencies".into(), json!(set.len()));
                }
            }
            props.insert("order".into(), json!(k));
            features.push(feature(point(pos), props));
        }
    }
    if let Some(plan) = layers.plan {
        for m in &plan.moves {
            let (a, b) = (net.pos(m.old), net.pos(m.new));
            let mut props = Map::new();
            props.insert("kind".into(), json!("relocation"));
            props.insert("label".into(), json!(m.label));
            props.insert("old".into(), json!(m.old.index()));
            props.insert("new".into(), json!(m.new.index()));
            let geom = json!({ "type": "LineString", "coordinates": [[a.lon(), a.lat()], [b.lon(), b.lat()]] });
            features.push(feature(geom, props));
        }
    }
    json!({ "type": "FeatureCollection", "features": features })
}

//! Command-line front end. `run` does all the work so tests can drive it
//! in-process; the binary only forwards `std::env::args`.
//!
//! Exit codes: 0 success, 1 unreadable or malformed input, 2 invalid POIs.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{ArgGroup, Args, Parser, Subcommand};

use crate::centrality::{extract_central, straightness};
use crate::error::Error;
use crate::inconsistency::{track_with_options, Direction, TrackOptions};
use crate::ingest::{
    parse_netgeo, parse_osm_xml, parse_poi_coords, restrict_to_largest_scc, snap_pois, write_netgeo, HighwayProfile,
    PoiSet,
};
use crate::network::{Network, NodeId};
use crate::partition::perimeter_partition;
use crate::reducer::{reduce_with_options, PoiEdit, ReduceOptions, Relocate};
use crate::report::{export_geojson, render_comparison, render_plan, render_table, summary_line, Layers};
use crate::service::{self, ServiceConfig};
use crate::synth;

#[derive(Debug, Parser)]
#[command(name = "urbanet", version, about = "Distance-based inconsistencies in street networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count inconsistent nodes per POI.
    Track {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        analysis: Analysis,
    },
    /// Greedily relocate POIs to lower the total.
    Reduce {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        analysis: Analysis,
        /// Keep this POI in place (label or node id). Repeatable.
        #[arg(long, value_name = "POI")]
        pin: Vec<String>,
        /// Give up after this many seconds.
        #[arg(long, value_name = "SECS")]
        timeout: Option<f64>,
    },
    /// Straightness centrality of a POI's perimeter or the whole network.
    Centrality {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        analysis: Analysis,
        /// Restrict to this POI's perimeter (label).
        #[arg(long, value_name = "LABEL")]
        poi: Option<String>,
    },
    /// Track a hypothetical edit of the POI set.
    Whatif {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        analysis: Analysis,
        #[arg(long, value_name = "NODE")]
        add: Option<u32>,
        /// Label for the added POI.
        #[arg(long, value_name = "LABEL", requires = "add")]
        label: Option<String>,
        #[arg(long, value_name = "NODE")]
        remove: Option<u32>,
        /// Move a POI: `OLD:NEW` node ids.
        #[arg(long = "move", value_name = "OLD:NEW", value_parser = parse_move)]
        relocate: Option<Relocate>,
    },
    /// Run the local HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Write committed POI sets here.
        #[arg(long, value_name = "DIR")]
        snapshot_dir: Option<PathBuf>,
        /// Upper bound for reduce requests, in seconds.
        #[arg(long, default_value_t = 120)]
        reduce_timeout: u64,
    },
    /// Convert OSM XML to NETGEO.
    Convert {
        #[arg(long, value_name = "PATH")]
        osm: PathBuf,
        #[arg(long, default_value = "default", value_name = "NAME")]
        profile: String,
        #[arg(long)]
        largest_scc: bool,
        /// POI coordinate list to snap and emit as `P` records.
        #[arg(long, value_name = "PATH")]
        pois: Option<PathBuf>,
        /// Output file; standard output if absent.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["net", "osm", "fixture"])))]
pub struct Source {
    /// NETGEO network file.
    #[arg(long, value_name = "PATH")]
    pub net: Option<PathBuf>,
    /// OSM XML extract.
    #[arg(long, value_name = "PATH")]
    pub osm: Option<PathBuf>,
    /// Built-in synthetic network.
    #[arg(long, value_name = "NAME")]
    pub fixture: Option<String>,
    /// Highway profile for --osm: default, drive, walk or all.
    #[arg(long, default_value = "default", value_name = "NAME")]
    pub profile: String,
    /// Seed for randomized fixtures.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep only the largest strongly connected component.
    #[arg(long)]
    pub largest_scc: bool,
    /// POI coordinates (`<lat> <lon> <label>` per line), snapped to nodes.
    /// Overrides POIs carried by the network source.
    #[arg(long, value_name = "PATH")]
    pub pois: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct Analysis {
    #[arg(long, default_value = "inward")]
    pub direction: Direction,
    /// Count nodes that cannot reach any POI as inconsistent.
    #[arg(long)]
    pub strict_unreachable: bool,
    /// Also write a GeoJSON layer file.
    #[arg(long, value_name = "PATH")]
    pub geojson: Option<PathBuf>,
}

impl Analysis {
    fn options(&self) -> TrackOptions {
        TrackOptions {
            strict_unreachable: self.strict_unreachable,
        }
    }
}

fn parse_move(s: &str) -> Result<Relocate, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected OLD:NEW, got '{s}'"))?;
    let id = |t: &str| t.trim().parse::<u32>().map(NodeId).map_err(|e| format!("invalid node '{t}': {e}"));
    Ok(Relocate { from: id(a)?, to: id(b)? })
}

/// An error message with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_poi_error() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

fn profile(name: &str) -> Result<HighwayProfile, Failure> {
    HighwayProfile::by_name(name).ok_or_else(|| input_error(format!("unknown profile '{name}'")))
}

/// Network plus POIs, after the optional component restriction.
pub fn load(source: &Source, err: &mut dyn Write) -> Result<(Network, PoiSet), Failure> {
    let (mut net, mut pois) = if let Some(path) = &source.net {
        parse_netgeo(open(path)?).map_err(with_path(path))?
    } else if let Some(path) = &source.osm {
        let extract = parse_osm_xml(open(path)?, &profile(&source.profile)?).map_err(with_path(path))?;
        for w in &extract.warnings {
            let _ = writeln!(err, "warning: {w}");
        }
        (extract.network, None)
    } else {
        let name = source.fixture.as_deref().expect("clap enforces one source");
        synth::fixture(name, source.seed).ok_or_else(|| {
            input_error(format!(
                "unknown fixture '{name}' (known: {})",
                synth::FIXTURE_NAMES.join(", ")
            ))
        })?
    };
    if let Some(path) = &source.pois {
        let coords = parse_poi_coords(open(path)?).map_err(with_path(path))?;
        if source.largest_scc {
            net = net.largest_scc().0;
        }
        pois = Some(snap_pois(&net, &coords)?);
    } else if source.largest_scc {
        (net, pois) = restrict_to_largest_scc(&net, pois.as_ref())?;
    }
    let pois = pois.ok_or_else(|| Failure {
        code: 2,
        message: "no POIs: pass --pois or use a network with P records".into(),
    })?;
    pois.validate(&net)?;
    Ok((net, pois))
}

fn write_geojson(path: &Path, net: &Network, layers: &Layers<'_>) -> Result<(), Failure> {
    let doc = export_geojson(net, layers);
    let text = serde_json::to_string_pretty(&doc).expect("json values serialize");
    std::fs::write(path, text + "\n").map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn resolve_poi(pois: &PoiSet, key: &str) -> Result<NodeId, Failure> {
    if let Some(k) = pois.position_of_label(key) {
        return Ok(pois.get(k).expect("position").node);
    }
    key.parse::<u32>()
        .ok()
        .map(NodeId)
        .filter(|n| pois.position(*n).is_some())
        .ok_or_else(|| Failure {
            code: 2,
            message: format!("no POI '{key}'"),
        })
}

fn cmd_track(source: &Source, analysis: &Analysis, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let (net, pois) = load(source, err)?;
    let report = track_with_options(&net, &pois, analysis.direction, analysis.options())?;
    let _ = writeln!(
        out,
        "network: {} nodes, {} edges, {} POIs",
        net.node_count(),
        net.edge_count(),
        pois.len()
    );
    let _ = write!(out, "{}", render_table(&report));
    if report.skipped_unreachable > 0 {
        let _ = writeln!(out, "skipped (no POI reachable): {}", report.skipped_unreachable);
    }
    if let Some(path) = &analysis.geojson {
        let layers = Layers {
            report: Some(&report),
            pois: Some(&pois),
            ..Default::default()
        };
        write_geojson(path, &net, &layers)?;
    }
    Ok(())
}

fn cmd_reduce(
    source: &Source,
    analysis: &Analysis,
    pin: &[String],
    timeout: Option<f64>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let (net, pois) = load(source, err)?;
    let pinned = pin.iter().map(|k| resolve_poi(&pois, k)).collect::<Result<_, _>>()?;
    let time_budget = match timeout {
        Some(t) if t.is_finite() && t >= 0.0 => Some(Duration::from_secs_f64(t)),
        Some(t) => return Err(input_error(format!("invalid timeout {t}"))),
        None => None,
    };
    let options = ReduceOptions {
        track: analysis.options(),
        pinned,
        time_budget,
    };
    let plan = reduce_with_options(&net, &pois, analysis.direction, &options)?;
    let before = track_with_options(&net, &pois, analysis.direction, analysis.options())?;
    let after = track_with_options(&net, &plan.final_pois, analysis.direction, analysis.options())?;
    let _ = write!(out, "{}", render_plan(&plan));
    let _ = writeln!(out);
    let _ = write!(out, "{}", render_comparison(&before, &after));
    if let Some(path) = &analysis.geojson {
        let layers = Layers {
            report: Some(&after),
            pois: Some(&plan.final_pois),
            plan: Some(&plan),
            ..Default::default()
        };
        write_geojson(path, &net, &layers)?;
    }
    Ok(())
}

fn cmd_centrality(
    source: &Source,
    analysis: &Analysis,
    poi: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let (net, pois) = load(source, err)?;
    let (scope, members) = match poi {
        Some(label) => {
            let k = pois.position_of_label(label).ok_or_else(|| Failure {
                code: 2,
                message: format!("no POI labelled '{label}'"),
            })?;
            let part = perimeter_partition(&net, &pois)?;
            (format!("perimeter of {label}"), part.members(k).to_vec())
        }
        None => ("whole network".to_string(), net.node_ids().collect()),
    };
    let field = straightness(&net, &members, analysis.direction)?;
    let _ = writeln!(
        out,
        "{} straightness, {}, {} nodes",
        analysis.direction,
        scope,
        field.len()
    );
    let _ = writeln!(out, "{:>8} {:>10}", "node", "score");
    for (v, s) in field.iter() {
        let _ = writeln!(out, "{:>8} {:>10.8}", v, s);
    }
    let _ = writeln!(out, "central: node {}", extract_central(&field));
    if let Some(path) = &analysis.geojson {
        let layers = Layers {
            centrality: Some(&field),
            pois: Some(&pois),
            ..Default::default()
        };
        write_geojson(path, &net, &layers)?;
    }
    Ok(())
}

fn cmd_whatif(
    source: &Source,
    analysis: &Analysis,
    edit: &PoiEdit,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let (net, pois) = load(source, err)?;
    let before = track_with_options(&net, &pois, analysis.direction, analysis.options())?;
    let edited = edit.apply(&net, &pois)?;
    let after = track_with_options(&net, &edited, analysis.direction, analysis.options())?;
    let _ = write!(out, "{}", render_comparison(&before, &after));
    let added: Vec<_> = edited
        .iter()
        .filter(|p| pois.position_of_label(&p.label).is_none())
        .collect();
    for p in added {
        let k = edited.position_of_label(&p.label).expect("present");
        let _ = writeln!(out, "new {} at node {}: {}", p.label, p.node, after.per_poi[k].len());
    }
    let _ = writeln!(out, "{}", summary_line(before.total, after.total));
    if let Some(path) = &analysis.geojson {
        let layers = Layers {
            report: Some(&after),
            pois: Some(&edited),
            ..Default::default()
        };
        write_geojson(path, &net, &layers)?;
    }
    Ok(())
}

fn cmd_serve(
    host: IpAddr,
    port: u16,
    snapshot_dir: Option<PathBuf>,
    reduce_timeout: u64,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let config = ServiceConfig {
        snapshot_dir,
        reduce_timeout: Duration::from_secs(reduce_timeout),
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| input_error(e.to_string()))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(SocketAddr::new(host, port))
            .await
            .map_err(|e| input_error(format!("cannot bind {host}:{port}: {e}")))?;
        let addr = listener.local_addr().map_err(|e| input_error(e.to_string()))?;
        let _ = writeln!(err, "listening on http://{addr}");
        let _ = err.flush();
        service::serve_on(listener, config)
            .await
            .map_err(|e| input_error(e.to_string()))
    })
}

fn cmd_convert(
    osm: &Path,
    profile_name: &str,
    largest_scc: bool,
    pois_path: Option<&Path>,
    out_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let extract = parse_osm_xml(open(osm)?, &profile(profile_name)?).map_err(with_path(osm))?;
    for w in &extract.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let mut net = extract.network;
    if largest_scc {
        net = net.largest_scc().0;
    }
    let pois = match pois_path {
        Some(path) => Some(snap_pois(&net, &parse_poi_coords(open(path)?).map_err(with_path(path))?)?),
        None => None,
    };
    let _ = writeln!(
        err,
        "{} ways kept, {} nodes, {} edges",
        extract.ways_kept,
        net.node_count(),
        net.edge_count()
    );
    match out_path {
        Some(path) => {
            let file = File::create(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            write_netgeo(std::io::BufWriter::new(file), &net, pois.as_ref())?;
        }
        None => write_netgeo(out, &net, pois.as_ref())?,
    }
    Ok(())
}

pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Track { source, analysis } => cmd_track(&source, &analysis, out, err),
        Command::Reduce {
            source,
            analysis,
            pin,
            timeout,
        } => cmd_reduce(&source, &analysis, &pin, timeout, out, err),
        Command::Centrality { source, analysis, poi } => cmd_centrality(&source, &analysis, poi.as_deref(), out, err),
        Command::Whatif {
            source,
            analysis,
            add,
            label,
            remove,
            relocate,
        } => {
            let edit = PoiEdit {
                add: add.map(|n| crate::reducer::AddPoi { node: NodeId(n), label }),
                remove: remove.map(NodeId),
                relocate,
            };
            cmd_whatif(&source, &analysis, &edit, out, err)
        }
        Command::Serve {
            port,
            host,
            snapshot_dir,
            reduce_timeout,
        } => cmd_serve(host, port, snapshot_dir, reduce_timeout, err),
        Command::Convert {
            osm,
            profile,
            largest_scc,
            pois,
            out: out_path,
        } => cmd_convert(&osm, &profile, largest_scc, pois.as_deref(), out_path.as_deref(), out, err),
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("urbanet").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn track_three_node_fixture() {
        let (code, out, _) = run_str(&["track", "--fixture", "three_node"]);
        assert_eq!(code, 0);
        assert!(out.contains("Total      1  100.0%"), "{out}");
    }

    #[test]
    fn missing_file_is_exit_1() {
        let (code, _, err) = run_str(&["track", "--net", "/nonexistent/city.netgeo"]);
        assert_eq!(code, 1);
        assert!(err.contains("/nonexistent/city.netgeo"));
    }

    #[test]
    fn duplicate_poi_is_exit_2() {
        let (code, _, err) = run_str(&["whatif", "--fixture", "three_node", "--add", "0"]);
        assert_eq!(code, 2);
        assert!(err.contains("duplicate POI"), "{err}");
    }

    #[test]
    fn source_is_required() {
        let (code, _, _) = run_str(&["track"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn move_parser() {
        assert_eq!(
            parse_move("3:7").unwrap(),
            Relocate {
                from: NodeId(3),
                to: NodeId(7)
            }
        );
        assert!(parse_move("3-7").is_err());
    }

    #[test]
    fn reduce_on_consistent_input_prints_no_moves() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.netgeo");
        let net = synth::grid(5, 6, 0.001, true);
        let pois = PoiSet::from_nodes(&[NodeId(12), NodeId(17)]).unwrap();
        std::fs::write(&path, crate::ingest::netgeo_string(&net, Some(&pois))).unwrap();
        let (code, out, _) = run_str(&["reduce", "--net", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.starts_with("no moves\n"), "{out}");
        assert!(out.contains("inconsistencies: 0 -> 0 (0 fewer)"));
    }
}

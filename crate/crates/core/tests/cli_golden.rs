//! Runs the real binary and compares its standard output with files under
//! `tests/golden`. Set `UPDATE_GOLDEN=1` to rewrite them.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> String {
    manifest_dir().join("tests/fixtures").join(name).display().to_string()
}

fn urbanet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_urbanet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn golden(name: &str, args: &[&str]) {
    let out = urbanet(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let path = manifest_dir().join("tests/golden").join(name);
    let got = String::from_utf8(out.stdout).unwrap();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(got, want, "output of {args:?} differs from {name}");
    let again = urbanet(args);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), got, "{args:?} is not deterministic");
}

#[test]
fn track_golden() {
    golden("track_three_node.txt", &["track", "--fixture", "three_node"]);
    golden(
        "track_case_one_absolute.txt",
        &["track", "--fixture", "case_study_one", "--direction", "absolute"],
    );
    golden(
        "track_five_ways.txt",
        &["track", "--osm", &fixture("five_ways.osm"), "--pois", &fixture("five_ways.pois"), "--direction", "outward"],
    );
}

#[test]
fn reduce_golden() {
    golden("reduce_clustered_grid.txt", &["reduce", "--fixture", "clustered_grid"]);
    golden(
        "reduce_case_one_pinned.txt",
        &["reduce", "--fixture", "case_study_one", "--pin", "hospital01", "--pin", "hospital05"],
    );
}

#[test]
fn centrality_golden() {
    golden("centrality_three_node.txt", &["centrality", "--fixture", "three_node"]);
    golden(
        "centrality_case_two_perimeter.txt",
        &["centrality", "--fixture", "case_study_two", "--poi", "school05", "--direction", "absolute"],
    );
}

#[test]
fn whatif_golden() {
    golden("whatif_case_one_add.txt", &["whatif", "--fixture", "case_study_one", "--add", "417", "--label", "manual"]);
    golden("whatif_case_two_remove.txt", &["whatif", "--fixture", "case_study_two", "--remove", "209", "--direction", "absolute"]);
}

#[test]
fn convert_golden() {
    golden("convert_five_ways.netgeo", &["convert", "--osm", &fixture("five_ways.osm"), "--pois", &fixture("five_ways.pois")]);
}

#[test]
fn symmetric_fixture_has_equal_directions() {
    let totals: Vec<String> = ["inward", "outward", "absolute"]
        .iter()
        .map(|d| {
            let out = urbanet(&["track", "--fixture", "grid", "--pois", &fixture("grid.pois"), "--direction", d]);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            let text = String::from_utf8(out.stdout).unwrap();
            text.lines().find(|l| l.starts_with("Total")).unwrap().to_string()
        })
        .collect();
    assert_eq!(totals[0], totals[1]);
    assert_eq!(totals[0], totals[2]);
}

#[test]
fn exit_codes() {
    let missing = urbanet(&["track", "--net", "/definitely/not/here.netgeo"]);
    assert_eq!(missing.status.code(), Some(1));
    let dup = urbanet(&["whatif", "--fixture", "three_node", "--add", "1"]);
    assert_eq!(dup.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&dup.stderr).contains("duplicate POI"));
    let unknown = urbanet(&["track", "--fixture", "three_node", "--direction", "sideways"]);
    assert_eq!(unknown.status.code(), Some(2));
    let no_pois = urbanet(&["track", "--osm", &fixture("five_ways.osm")]);
    assert_eq!(no_pois.status.code(), Some(2));
    let bad_xml = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(bad_xml.path(), "<osm><node id='1' lat='0' lon='0'>").unwrap();
    let broken = urbanet(&["convert", "--osm", bad_xml.path().to_str().unwrap()]);
    assert_eq!(broken.status.code(), Some(1));
}

#[test]
fn geojson_output_counts_features() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("layers.geojson");
    let out = urbanet(&["track", "--fixture", "clustered_grid", "--geojson", path.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let features = doc["features"].as_array().unwrap();
    // 144 nodes, 528 directed edges, 4 POIs
    assert_eq!(features.len(), 144 + 528 + 4);
    let flagged = features.iter().filter(|f| f["properties"]["inconsistent"] == true).count();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let total: usize = stdout
        .lines()
        .find(|l| l.starts_with("Total"))
        .and_then(|l| l.split_whitespace().nth(1))
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(flagged, total);
}

#[test]
fn serve_answers_health() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_urbanet"))
        .args(["serve", "--port", "0"])
        .stderr(Stdio::piped())
        .stdout(Stdio::null())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stderr.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().strip_prefix("listening on http://").expect("banner").to_string();
    let mut stream = TcpStream::connect(&addr).unwrap();
    write!(stream, "GET /health HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n").unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("\"ok\""));
}

//! Start the HTTP service on a free port, drive one session through it with
//! plain HTTP/1.1 requests and shut down.
//!
//! cargo run --example local_service

use serde_json::{json, Value};
use std::io::{Read, Write};
use std::net::{SocketAddr, TcpStream};

use tokio::net::TcpListener;
use urbanet::service::{serve_on, ServiceConfig};

fn call(addr: SocketAddr, method: &str, path: &str, body: Option<Value>) -> (u16, Value) {
    let body = body.map(|b| b.to_string()).unwrap_or_default();
    let mut stream = TcpStream::connect(addr).unwrap();
    let request = format!(
        "{method} {path} HTTP/1.1\r\nHost: {addr}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    );
    stream.write_all(request.as_bytes()).unwrap();
    let mut raw = String::new();
    stream.read_to_string(&mut raw).unwrap();
    let status = raw[9..12].parse().unwrap();
    let payload = raw.split_once("\r\n\r\n").map_or("", |(_, b)| b);
    (status, serde_json::from_str(payload).unwrap_or(Value::Null))
}

fn main() {
    let runtime = tokio::runtime::Runtime::new().unwrap();
    let listener = runtime.block_on(TcpListener::bind("127.0.0.1:0")).unwrap();
    let addr = listener.local_addr().unwrap();
    runtime.spawn(serve_on(listener, ServiceConfig::default()));
    println!("service on http://{addr}");

    let (status, session) = call(addr, "POST", "/sessions", Some(json!({ "fixture": "case_study_one" })));
    let id = session["id"].as_str().unwrap().to_string();
    println!("POST /sessions -> {status}, session {id}, total {}", session["report"]["total"]);

    let edit = json!({ "edit": { "add": { "node": 417, "label": "clinic" } } });
    let (status, out) = call(addr, "POST", &format!("/sessions/{id}/whatif"), Some(edit));
    println!("POST whatif -> {status}, delta {}", out["diff"]["delta"]);

    let (status, out) = call(addr, "POST", &format!("/sessions/{id}/reduce"), Some(json!({})));
    let moves = out["moves"].as_array().map_or(0, Vec::len);
    println!("POST reduce -> {status}, {moves} moves, total after {}", out["totals_after"]);

    let (status, out) = call(addr, "GET", &format!("/sessions/{id}/layers?centrality=none"), None);
    println!("GET layers -> {status}, {} features", out["features"].as_array().map_or(0, Vec::len));
}

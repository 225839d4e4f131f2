//! Local HTTP API for interactive planning sessions.
//!
//! A session holds one network and an evolving POI set. Queries (`layers`,
//! `track`, `whatif`, `reduce`) never change a session; `commit` does.
//! Request and response bodies are JSON, map layers are GeoJSON. See the
//! README for the schema.

use std::collections::{BTreeSet, HashMap};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::CorsLayer;

use crate::centrality::{perimeter_centrality, straightness, CentralityField};
use crate::error::Error;
use crate::geo::GeoPoint;
use crate::inconsistency::{track_with_options, Direction, InconsistencyReport, TrackOptions};
use crate::ingest::{
    nearest_node, parse_netgeo_str, parse_osm_xml, restrict_to_largest_scc, snap_pois, HighwayProfile, Poi, PoiSet,
};
use crate::network::{Network, NodeId};
use crate::partition::{network_partition, perimeter_partition, Partition};
use crate::paths::FieldDirection;
use crate::reducer::{reduce_with_options, PoiEdit, ReduceOptions, RelocationPlan};
use crate::report::{export_geojson, summarize, BBox, Layers, ReportSummary};
use crate::synth;

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    /// Where committed POI sets are written, one JSON file per session.
    pub snapshot_dir: Option<PathBuf>,
    /// Upper bound for a single reduce request.
    pub reduce_timeout: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            snapshot_dir: None,
            reduce_timeout: Duration::from_secs(120),
        }
    }
}

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub network: Arc<Network>,
    pub pois: PoiSet,
    pub direction: Direction,
    pub options: TrackOptions,
    pub baseline: InconsistencyReport,
    pub history: Vec<PoiEdit>,
}

#[derive(Debug)]
struct Slot {
    commit: tokio::sync::Mutex<()>,
    current: RwLock<Arc<Session>>,
}

impl Slot {
    fn snapshot(&self) -> Arc<Session> {
        self.current.read().expect("session lock").clone()
    }
}

#[derive(Debug)]
pub struct AppState {
    config: ServiceConfig,
    sessions: RwLock<HashMap<String, Arc<Slot>>>,
    next_id: AtomicU64,
}

impl AppState {
    fn slot(&self, id: &str) -> Result<Arc<Slot>, ApiError> {
        self.sessions
            .read()
            .expect("session table")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown session '{id}'")))
    }
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::DuplicatePoi { .. } | Error::DuplicateLabel(_) => StatusCode::CONFLICT,
            e if e.is_poi_error() => StatusCode::BAD_REQUEST,
            Error::EmptyMembers => StatusCode::BAD_REQUEST,
            Error::Timeout(_) => StatusCode::GATEWAY_TIMEOUT,
            Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &Bytes, on_error: fn(String) -> ApiError) -> ApiResult<T> {
    let body: &[u8] = if body.iter().all(u8::is_ascii_whitespace) {
        b"{}"
    } else {
        body
    };
    serde_json::from_slice(body).map_err(|e| on_error(format!("invalid request body: {e}")))
}

async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> ApiResult<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordPoi {
    pub lat: f64,
    pub lon: f64,
    pub label: String,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadRequest {
    pub fixture: Option<String>,
    pub seed: Option<u64>,
    pub netgeo: Option<String>,
    pub osm: Option<String>,
    pub profile: Option<String>,
    #[serde(default)]
    pub largest_scc: bool,
    pub pois: Option<Vec<Poi>>,
    pub poi_coords: Option<Vec<CoordPoi>>,
    pub direction: Option<Direction>,
    #[serde(default)]
    pub strict_unreachable: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub nodes: usize,
    pub edges: usize,
    pub direction: Direction,
    pub strict_unreachable: bool,
    pub pois: PoiSet,
    pub report: ReportSummary,
    pub edits: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn view(s: &Session, warnings: Vec<String>) -> SessionView {
    SessionView {
        id: s.id.clone(),
        nodes: s.network.node_count(),
        edges: s.network.edge_count(),
        direction: s.direction,
        strict_unreachable: s.options.strict_unreachable,
        pois: s.pois.clone(),
        report: summarize(&s.baseline),
        edits: s.history.len(),
        warnings,
    }
}

fn load_network(req: &LoadRequest) -> ApiResult<(Network, Option<PoiSet>, Vec<String>)> {
    let given = [req.fixture.is_some(), req.netgeo.is_some(), req.osm.is_some()];
    if given.iter().filter(|g| **g).count() != 1 {
        return Err(ApiError::unprocessable("give exactly one of `fixture`, `netgeo`, `osm`"));
    }
    if let Some(name) = &req.fixture {
        let (net, pois) = synth::fixture(name, req.seed.unwrap_or(0))
            .ok_or_else(|| ApiError::unprocessable(format!("unknown fixture '{name}'")))?;
        return Ok((net, pois, Vec::new()));
    }
    if let Some(text) = &req.netgeo {
        let (net, pois) = parse_netgeo_str(text)?;
        return Ok((net, pois, Vec::new()));
    }
    let text = req.osm.as_deref().expect("checked above");
    let name = req.profile.as_deref().unwrap_or("default");
    let profile =
        HighwayProfile::by_name(name).ok_or_else(|| ApiError::unprocessable(format!("unknown profile '{name}'")))?;
    let extract = parse_osm_xml(text.as_bytes(), &profile)?;
    Ok((extract.network, None, extract.warnings))
}

fn build_session(id: String, req: LoadRequest) -> ApiResult<(Session, Vec<String>)> {
    let (net, mut pois, warnings) = load_network(&req)?;
    let mut net = net;
    if req.largest_scc {
        let (sub, moved) = restrict_to_largest_scc(&net, pois.as_ref())?;
        net = sub;
        pois = moved;
    }
    if let Some(list) = req.pois {
        pois = Some(PoiSet::new(list)?);
    }
    if let Some(coords) = req.poi_coords {
        let coords = coords
            .into_iter()
            .map(|c| Ok((GeoPoint::new(c.lat, c.lon)?, c.label)))
            .collect::<Result<Vec<_>, Error>>()?;
        pois = Some(snap_pois(&net, &coords)?);
    }
    let pois = pois.ok_or(Error::EmptyPoiSet)?;
    pois.validate(&net)?;
    let direction = req.direction.unwrap_or_default();
    let options = TrackOptions {
        strict_unreachable: req.strict_unreachable,
    };
    let baseline = track_with_options(&net, &pois, direction, options)?;
    let session = Session {
        id,
        network: Arc::new(net),
        pois,
        direction,
        options,
        baseline,
        history: Vec::new(),
    };
    Ok((session, warnings))
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok" }))
}

async fn create_session(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Response> {
    let req: LoadRequest = parse_body(&body, ApiError::unprocessable)?;
    let id = format!("s{}", state.next_id.fetch_add(1, Ordering::Relaxed) + 1);
    let (session, warnings) = blocking(move || build_session(id, req)).await?;
    let body = view(&session, warnings);
    let slot = Slot {
        commit: tokio::sync::Mutex::new(()),
        current: RwLock::new(Arc::new(session)),
    };
    state
        .sessions
        .write()
        .expect("session table")
        .insert(body.id.clone(), Arc::new(slot));
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn get_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    let s = state.slot(&id)?.snapshot();
    Ok(Json(view(&s, Vec::new())))
}

#[derive(Debug, Default, Deserialize)]
pub struct LayersQuery {
    pub bbox: Option<String>,
    /// `perimeter` (default), `network` or `none`.
    pub centrality: Option<String>,
    /// `perimeter`, `to`, `from`; absent means no partition layer.
    pub partition: Option<String>,
    pub direction: Option<String>,
}

fn parse_direction(raw: Option<&str>, fallback: Direction) -> ApiResult<Direction> {
    raw.map_or(Ok(fallback), |d| d.parse().map_err(ApiError::bad_request))
}

async fn layers(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<LayersQuery>,
) -> ApiResult<Json<Value>> {
    let s = state.slot(&id)?.snapshot();
    let bbox = q
        .bbox
        .as_deref()
        .map(str::parse::<BBox>)
        .transpose()
        .map_err(ApiError::bad_request)?;
    let direction = parse_direction(q.direction.as_deref(), s.direction)?;
    blocking(move || {
        let net = &*s.network;
        let report = if direction == s.direction {
            s.baseline.clone()
        } else {
            track_with_options(net, &s.pois, direction, s.options)?
        };
        let field: Option<CentralityField> = match q.centrality.as_deref().unwrap_or("perimeter") {
            "perimeter" => Some(perimeter_centrality(net, &s.pois, direction)?),
            "network" => {
                let all: Vec<NodeId> = net.node_ids().collect();
                Some(straightness(net, &all, direction)?)
            }
            "none" => None,
            other => return Err(ApiError::bad_request(format!("unknown centrality layer '{other}'"))),
        };
        let partition: Option<Partition> = match q.partition.as_deref() {
            None => None,
            Some("perimeter") => Some(perimeter_partition(net, &s.pois)?),
            Some("to") => Some(network_partition(net, &s.pois, FieldDirection::ToPoi)?),
            Some("from") => Some(network_partition(net, &s.pois, FieldDirection::FromPoi)?),
            Some(other) => return Err(ApiError::bad_request(format!("unknown partition '{other}'"))),
        };
        let doc = export_geojson(
            net,
            &Layers {
                partition: partition.as_ref(),
                report: Some(&report),
                centrality: field.as_ref(),
                pois: Some(&s.pois),
                plan: None,
                bbox,
            },
        );
        Ok(Json(doc))
    })
    .await
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackRequest {
    pub direction: Option<Direction>,
}

async fn track_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<ReportSummary>> {
    let s = state.slot(&id)?.snapshot();
    let req: TrackRequest = parse_body(&body, ApiError::bad_request)?;
    let direction = req.direction.unwrap_or(s.direction);
    if direction == s.direction {
        return Ok(Json(summarize(&s.baseline)));
    }
    blocking(move || Ok(Json(summarize(&track_with_options(&s.network, &s.pois, direction, s.options)?)))).await
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhatIfRequest {
    #[serde(default)]
    pub edit: PoiEdit,
    pub direction: Option<Direction>,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct PoiDelta {
    pub label: String,
    pub before: Option<usize>,
    pub after: Option<usize>,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDiff {
    pub total_before: usize,
    pub total_after: usize,
    pub delta: i64,
    pub per_poi: Vec<PoiDelta>,
}

/// Per-label comparison; labels of `before` first, then labels only in
/// `after`.
pub fn diff(before: &InconsistencyReport, after: &InconsistencyReport) -> ReportDiff {
    let count = |r: &InconsistencyReport, label: &str| r.pois.position_of_label(label).map(|k| r.per_poi[k].len());
    let mut per_poi: Vec<PoiDelta> = before
        .pois
        .iter()
        .map(|p| PoiDelta {
            label: p.label.clone(),
            before: count(before, &p.label),
            after: count(after, &p.label),
        })
        .collect();
    per_poi.extend(
        after
            .pois
            .iter()
            .filter(|p| before.pois.position_of_label(&p.label).is_none())
            .map(|p| PoiDelta {
                label: p.label.clone(),
                before: None,
                after: count(after, &p.label),
            }),
    );
    ReportDiff {
        total_before: before.total,
        total_after: after.total,
        delta: after.total as i64 - before.total as i64,
        per_poi,
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WhatIfResponse {
    pub report: ReportSummary,
    pub diff: ReportDiff,
}

async fn whatif(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<WhatIfResponse>> {
    let s = state.slot(&id)?.snapshot();
    let req: WhatIfRequest = parse_body(&body, ApiError::bad_request)?;
    blocking(move || {
        let net = &*s.network;
        let direction = req.direction.unwrap_or(s.direction);
        let before = if direction == s.direction {
            s.baseline.clone()
        } else {
            track_with_options(net, &s.pois, direction, s.options)?
        };
        let edited = req.edit.apply(net, &s.pois)?;
        let after = track_with_options(net, &edited, direction, s.options)?;
        Ok(Json(WhatIfResponse {
            report: summarize(&after),
            diff: diff(&before, &after),
        }))
    })
    .await
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceRequest {
    pub direction: Option<Direction>,
    pub timeout_secs: Option<f64>,
    #[serde(default)]
    pub pinned: Vec<NodeId>,
}

async fn reduce_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<RelocationPlan>> {
    let s = state.slot(&id)?.snapshot();
    let req: ReduceRequest = parse_body(&body, ApiError::bad_request)?;
    let limit = state.config.reduce_timeout;
    let budget = match req.timeout_secs {
        Some(t) if t.is_finite() && t >= 0.0 => Duration::from_secs_f64(t).min(limit),
        Some(t) => return Err(ApiError::bad_request(format!("invalid timeout {t}"))),
        None => limit,
    };
    if let Some(bad) = req.pinned.iter().find(|n| s.pois.position(**n).is_none()) {
        return Err(Error::PoiNotFound(*bad).into());
    }
    blocking(move || {
        let options = ReduceOptions {
            track: s.options,
            pinned: req.pinned.into_iter().collect::<BTreeSet<_>>(),
            time_budget: Some(budget),
        };
        let direction = req.direction.unwrap_or(s.direction);
        Ok(Json(reduce_with_options(&s.network, &s.pois, direction, &options)?))
    })
    .await
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommitRequest {
    /// Replaces the whole POI set, e.g. with an accepted plan's
    /// `final_pois`. Applied before `edit`.
    pub pois: Option<Vec<Poi>>,
    pub edit: Option<PoiEdit>,
    pub direction: Option<Direction>,
}

#[derive(Serialize)]
struct Snapshot<'a> {
    id: &'a str,
    direction: Direction,
    pois: &'a PoiSet,
    history: &'a [PoiEdit],
}

fn write_snapshot(dir: &std::path::Path, s: &Session) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let doc = Snapshot {
        id: &s.id,
        direction: s.direction,
        pois: &s.pois,
        history: &s.history,
    };
    let text = serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)?;
    std::fs::write(dir.join(format!("{}.json", s.id)), text)
}

async fn commit(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<SessionView>> {
    let slot = state.slot(&id)?;
    let req: CommitRequest = parse_body(&body, ApiError::bad_request)?;
    if req.pois.is_none() && req.edit.is_none() && req.direction.is_none() {
        return Err(ApiError::bad_request("commit needs `pois`, `edit` or `direction`"));
    }
    let _serial = slot.commit.lock().await;
    let s = slot.snapshot();
    let next = blocking(move || {
        let net = &*s.network;
        let mut pois = match req.pois {
            Some(list) => {
                let set = PoiSet::new(list)?;
                set.validate(net)?;
                set
            }
            None => s.pois.clone(),
        };
        let mut history = s.history.clone();
        if let Some(edit) = req.edit {
            pois = edit.apply(net, &pois)?;
            history.push(edit);
        }
        let direction = req.direction.unwrap_or(s.direction);
        let baseline = track_with_options(net, &pois, direction, s.options)?;
        Ok(Session {
            id: s.id.clone(),
            network: s.network.clone(),
            pois,
            direction,
            options: s.options,
            baseline,
            history,
        })
    })
    .await?;
    if let Some(dir) = &state.config.snapshot_dir {
        if let Err(e) = write_snapshot(dir, &next) {
            log::warn!("snapshot of session {} failed: {e}", next.id);
        }
    }
    let body = view(&next, Vec::new());
    *slot.current.write().expect("session lock") = Arc::new(next);
    Ok(Json(body))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapRequest {
    pub lat: f64,
    pub lon: f64,
}

async fn snap(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<Value>> {
    let s = state.slot(&id)?.snapshot();
    let req: SnapRequest = parse_body(&body, ApiError::bad_request)?;
    let point = GeoPoint::new(req.lat, req.lon).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let node = nearest_node(&s.network, point).expect("sessions have nodes");
    let pos = s.network.pos(node);
    Ok(Json(json!({ "node": node, "lat": pos.lat(), "lon": pos.lon() })))
}

pub fn router(config: ServiceConfig) -> Router {
    let state = Arc::new(AppState {
        config,
        sessions: RwLock::new(HashMap::new()),
        next_id: AtomicU64::new(0),
    });
    Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/layers", get(layers))
        .route("/sessions/{id}/track", post(track_session))
        .route("/sessions/{id}/whatif", post(whatif))
        .route("/sessions/{id}/reduce", post(reduce_session))
        .route("/sessions/{id}/commit", post(commit))
        .route("/sessions/{id}/snap", post(snap))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    serve_on(listener, config).await
}

pub async fn serve_on(listener: tokio::net::TcpListener, config: ServiceConfig) -> std::io::Result<()> {
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

//! HTTP session API over the roomfem pipeline.
//!
//! Each session walks `EMPTY → SCANNED → SPACED → MESHED → SOLVED`. Stored
//! artifacts are served with the library's own writers, so a GET returns the
//! same bytes as calling `roomfem_core::io` on the same inputs.

mod error;
mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use roomfem_core::fem::{assemble_point_sources, dirichlet_nodes, solve_with_loads, SolverOptions};
use roomfem_core::geometry::{reconstruct_space, ExtractionParams, Vec3};
use roomfem_core::io::{self, ScanFormat};
use roomfem_core::meshgen::mesh_space;
use serde::Deserialize;
use serde_json::json;
use uuid::Uuid;

pub use error::{ApiError, ErrorBody};
pub use session::{Session, Stage};

pub const DEFAULT_PORT: u16 = 8080;

/// Scans can be large; the default 2 MB body limit is too small.
const BODY_LIMIT: usize = 512 * 1024 * 1024;

type SessionRef = Arc<tokio::sync::Mutex<Session>>;

#[derive(Default)]
pub struct AppState {
    sessions: Mutex<HashMap<Uuid, SessionRef>>,
    persist: Option<PathBuf>,
}

impl AppState {
    /// In-memory store, optionally mirrored to one folder per session.
    /// Existing session folders under `persist` are loaded.
    pub fn new(persist: Option<PathBuf>) -> std::io::Result<Arc<AppState>> {
        let mut sessions = HashMap::new();
        if let Some(dir) = &persist {
            std::fs::create_dir_all(dir)?;
            for entry in std::fs::read_dir(dir)? {
                let entry = entry?;
                let Some(id) = entry.file_name().to_str().and_then(|s| Uuid::parse_str(s).ok()) else {
                    continue;
                };
                let session = Session::load(&entry.path())
                    .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, format!("session {id}: {e}")))?;
                sessions.insert(id, Arc::new(tokio::sync::Mutex::new(session)));
            }
        }
        Ok(Arc::new(AppState {
            sessions: Mutex::new(sessions),
            persist,
        }))
    }

    fn session(&self, id: &str) -> Result<SessionRef, ApiError> {
        let uuid = Uuid::parse_str(id).map_err(|_| ApiError::not_found(id))?;
        self.sessions
            .lock()
            .expect("session map poisoned")
            .get(&uuid)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }

    fn save(&self, id: &str, session: &Session) -> Result<(), ApiError> {
        if let Some(dir) = &self.persist {
            session
                .save(&dir.join(id))
                .map_err(|e| ApiError::internal(format!("persisting session {id}: {e}")))?;
        }
        Ok(())
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}/scan", post(upload_scan))
        .route("/api/sessions/{id}/space", post(build_space).get(get_space))
        .route("/api/sessions/{id}/mesh", post(generate_mesh).get(get_mesh))
        .route("/api/sessions/{id}/problem", put(set_problem).get(get_problem))
        .route("/api/sessions/{id}/solve", post(solve))
        .route("/api/sessions/{id}/solution", get(get_solution))
        .route("/api/sessions/{id}/status", get(get_status))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

/// Port from `ROOMFEM_PORT`, falling back to 8080.
pub fn port_from_env() -> u16 {
    std::env::var("ROOMFEM_PORT")
        .ok()
        .and_then(|p| p.parse().ok())
        .unwrap_or(DEFAULT_PORT)
}

pub async fn serve(port: u16, persist: Option<PathBuf>) -> std::io::Result<()> {
    let app = router(AppState::new(persist)?);
    let listener = tokio::net::TcpListener::bind(SocketAddr::from(([0, 0, 0, 0], port))).await?;
    eprintln!("roomfem service listening on {}", listener.local_addr()?);
    axum::serve(listener, app).await
}

type ApiResult = Result<Response, ApiError>;

/// Runs CPU-bound library work off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))
}

fn json_bytes(bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], bytes).into_response()
}

/// Parses an optional JSON control body; an empty body means all defaults.
fn control_body<T: for<'de> Deserialize<'de> + Default>(body: &[u8]) -> Result<T, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ApiError::parse(e.to_string()))
}

fn status_body(id: &str, s: &Session) -> serde_json::Value {
    json!({
        "id": id,
        "stage": s.stage(),
        "solving": s.solving,
        "error": s.last_error,
        "mesh_checksum": s.mesh.as_deref().map(io::mesh_checksum),
        "solve": s.stats.map(|st| json!({
            "iterations": st.iterations,
            "relative_residual": st.final_relative_residual,
        })),
    })
}

async fn create_session(State(app): State<Arc<AppState>>) -> ApiResult {
    let id = Uuid::new_v4();
    let session = Session::default();
    app.save(&id.to_string(), &session)?;
    app.sessions
        .lock()
        .expect("session map poisoned")
        .insert(id, Arc::new(tokio::sync::Mutex::new(session)));
    Ok(Json(json!({ "id": id.to_string() })).into_response())
}

#[derive(Deserialize)]
struct ScanQuery {
    format: Option<String>,
}

async fn upload_scan(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<ScanQuery>,
    body: Bytes,
) -> ApiResult {
    let session = app.session(&id)?;
    let format: ScanFormat = q.format.as_deref().unwrap_or("ply").parse()?;
    let mut s = session.lock().await;
    s.require_idle()?;
    let import = io::read_surface_scan(&body, format)?;
    s.set_scan(import.mesh);
    app.save(&id, &s)?;
    Ok(Json(json!({
        "stage": s.stage(),
        "vertices": s.scan.as_ref().map_or(0, |m| m.vertices().len()),
        "triangles": s.scan.as_ref().map_or(0, |m| m.triangles().len()),
        "dropped_faces": import.dropped_faces,
    }))
    .into_response())
}

/// Extraction parameters; unset fields take the library defaults.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SpaceRequest {
    dist_tol: Option<f64>,
    angle_tol: Option<f64>,
    min_area: Option<f64>,
    max_planes: Option<usize>,
    seed: Option<u64>,
    candidates: Option<usize>,
    up: Option<[f64; 3]>,
}

impl SpaceRequest {
    fn params(&self) -> ExtractionParams {
        let d = ExtractionParams::default();
        ExtractionParams {
            dist_tol: self.dist_tol.unwrap_or(d.dist_tol),
            angle_tol: self.angle_tol.unwrap_or(d.angle_tol),
            min_area: self.min_area.unwrap_or(d.min_area),
            max_planes: self.max_planes.unwrap_or(d.max_planes),
            seed: self.seed.unwrap_or(d.seed),
            candidates: self.candidates.unwrap_or(d.candidates),
        }
    }
}

/// Body is either extraction parameters or an explicit Space document
/// (recognised by its `footprint` field).
async fn build_space(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let session = app.session(&id)?;
    let mut s = session.lock().await;
    s.require_idle()?;
    s.require(Stage::Scanned)?;
    let is_space_doc = serde_json::from_slice::<serde_json::Value>(&body)
        .ok()
        .is_some_and(|v| v.get("footprint").is_some());
    let space = if is_space_doc {
        io::read_space(&body)?
    } else {
        let req: SpaceRequest = control_body(&body)?;
        let up = req.up.map_or(Vec3::z(), Vec3::from);
        let scan = s.scan.clone().expect("stage SCANNED has a scan");
        blocking(move || reconstruct_space(&scan, &req.params(), up)).await??
    };
    let bytes = io::write_space(&space);
    s.set_space(space);
    app.save(&id, &s)?;
    Ok(json_bytes(bytes))
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct MeshRequest {
    target_h: Option<f64>,
    #[serde(default)]
    refine: u32,
}

async fn generate_mesh(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let session = app.session(&id)?;
    let req: MeshRequest = control_body(&body)?;
    let target_h = req
        .target_h
        .ok_or_else(|| ApiError::parse("mesh request needs \"target_h\""))?;
    let mut s = session.lock().await;
    s.require_idle()?;
    s.require(Stage::Spaced)?;
    let space = s.space.clone().expect("stage SPACED has a space");
    let mesh = blocking(move || mesh_space(&space, target_h, req.refine)).await??;
    let bytes = io::write_mesh(&mesh);
    s.set_mesh(mesh);
    app.save(&id, &s)?;
    Ok(json_bytes(bytes))
}

/// Stores a problem after checking its sources and tags against the mesh.
/// An empty `dirichlet` map is accepted here and refused at solve time.
async fn set_problem(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let session = app.session(&id)?;
    let problem = io::read_problem(&body)?;
    let mut s = session.lock().await;
    s.require_idle()?;
    s.require(Stage::Meshed)?;
    let mesh = s.mesh.clone().expect("stage MESHED has a mesh");
    assemble_point_sources(&mesh, &problem.sources)?;
    if !problem.dirichlet.is_empty() {
        dirichlet_nodes(&mesh, &problem.dirichlet)?;
    }
    let bytes = io::write_problem(&problem);
    s.set_problem(problem);
    app.save(&id, &s)?;
    Ok(json_bytes(bytes))
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SolveRequest {
    tol: Option<f64>,
    max_iter: Option<usize>,
}

#[derive(Deserialize)]
struct SolveQuery {
    #[serde(default)]
    wait: bool,
}

/// Validates synchronously, then solves off the request path. Returns 202
/// and the client polls `/status`; with `?wait=true` it answers 200 once
/// the solve has finished.
async fn solve(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<SolveQuery>,
    body: Bytes,
) -> ApiResult {
    let session = app.session(&id)?;
    let req: SolveRequest = control_body(&body)?;
    let defaults = SolverOptions::default();
    let opts = SolverOptions {
        tol: req.tol.unwrap_or(defaults.tol),
        max_iter: req.max_iter.or(defaults.max_iter),
    };
    let (mesh, loads, nodes) = {
        let mut s = session.lock().await;
        s.require_idle()?;
        s.require(Stage::Meshed)?;
        let mesh = s.mesh.clone().expect("stage MESHED has a mesh");
        let nodes = dirichlet_nodes(&mesh, &s.problem.dirichlet)?;
        let loads = assemble_point_sources(&mesh, &s.problem.sources)?;
        s.solving = true;
        s.last_error = None;
        (mesh, loads, nodes)
    };

    let task = tokio::task::spawn_blocking(move || solve_with_loads(&mesh, loads, &nodes, &opts));
    let finish = {
        let session = session.clone();
        let app = app.clone();
        let id = id.clone();
        async move {
            let result = task.await;
            let mut s = session.lock().await;
            s.solving = false;
            match result {
                Ok(Ok((field, stats))) => {
                    s.solution = Some(field);
                    s.stats = Some(stats);
                }
                Ok(Err(e)) => s.last_error = Some(ApiError::from(e).body),
                Err(e) => s.last_error = Some(ApiError::internal(e.to_string()).body),
            }
            if let Err(e) = app.save(&id, &s) {
                s.last_error = Some(e.body);
            }
        }
    };

    if q.wait {
        finish.await;
        let s = session.lock().await;
        if let Some(err) = &s.last_error {
            let status = if err.error == "Internal" {
                StatusCode::INTERNAL_SERVER_ERROR
            } else {
                StatusCode::UNPROCESSABLE_ENTITY
            };
            return Err(ApiError {
                status,
                body: err.clone(),
            });
        }
        Ok(Json(status_body(&id, &s)).into_response())
    } else {
        tokio::spawn(finish);
        let s = session.lock().await;
        Ok((StatusCode::ACCEPTED, Json(status_body(&id, &s))).into_response())
    }
}

async fn get_space(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let session = app.session(&id)?;
    let s = session.lock().await;
    s.require(Stage::Spaced)?;
    Ok(json_bytes(io::write_space(
        s.space.as_ref().expect("stage SPACED has a space"),
    )))
}

async fn get_mesh(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let session = app.session(&id)?;
    let s = session.lock().await;
    s.require(Stage::Meshed)?;
    Ok(json_bytes(io::write_mesh(
        s.mesh.as_deref().expect("stage MESHED has a mesh"),
    )))
}

async fn get_problem(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let session = app.session(&id)?;
    let s = session.lock().await;
    s.require(Stage::Meshed)?;
    Ok(json_bytes(io::write_problem(&s.problem)))
}

async fn get_solution(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let session = app.session(&id)?;
    let s = session.lock().await;
    s.require(Stage::Solved)?;
    let mesh = s.mesh.as_deref().expect("stage SOLVED has a mesh");
    let field = s.solution.as_ref().expect("stage SOLVED has a solution");
    Ok(json_bytes(io::write_solution_json(mesh, field)?))
}

async fn get_status(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let session = app.session(&id)?;
    let s = session.lock().await;
    Ok(Json(status_body(&id, &s)).into_response())
}

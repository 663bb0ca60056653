//! JSON-over-HTTP service for interactive tracking.
//!
//! | route | body | reply |
//! |---|---|---|
//! | `POST /sessions` | `{image_path? , image_base64?, config?}` | session id, image size, trajectories |
//! | `GET /sessions/{id}/trajectories` | | trajectories and a `ζ` preview PNG (data URL) |
//! | `POST /sessions/{id}/track` | `{points: [[x, y], ...], metric?}` | tracked path and report |
//! | `GET /sessions/{id}/image` | | the session image as PNG |
//!
//! Errors reply with a status code and `{error, detail}`.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine as _;
use serde::{Deserialize, Serialize};
use tubetrack_core::graph::{SeedNode, TrackedPath};
use tubetrack_core::pipeline::Leg;
use tubetrack_core::{GrayImage, PipelineConfig, Pixel};

use crate::config::{apply_overrides, image_hash, parse_weighting};
use crate::error::{Error, Result};
use crate::io::{decode_image, encode_png8, encode_plane8, read_image};
use crate::session::{session_id, PrepareStats, Session, TrajectoriesDoc};

/// Shared sessions plus one build lock per session id, so concurrent
/// requests for the same image and configuration prepare it once.
#[derive(Debug)]
pub struct SessionStore {
    base: PipelineConfig,
    cache_dir: Option<PathBuf>,
    allow_paths: bool,
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    building: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl SessionStore {
    /// `allow_paths` lets clients name image files on the server.
    pub fn new(base: PipelineConfig, cache_dir: Option<PathBuf>, allow_paths: bool) -> Self {
        SessionStore {
            base,
            cache_dir,
            allow_paths,
            sessions: RwLock::new(HashMap::new()),
            building: Mutex::new(HashMap::new()),
        }
    }

    pub fn get(&self, id: &str) -> Result<Arc<Session>> {
        self.sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| Error::UnknownSession(id.to_string()))
    }

    /// Returns the existing session for this image and configuration or
    /// prepares a new one. Blocking.
    pub fn open(&self, image: GrayImage, overrides: Option<&serde_json::Value>) -> Result<(Arc<Session>, Option<PrepareStats>)> {
        let cfg = match overrides {
            Some(o) => apply_overrides(&self.base, o)?,
            None => self.base.clone(),
        };
        let id = session_id(&image_hash(&image), &cfg);
        if let Ok(s) = self.get(&id) {
            return Ok((s, None));
        }
        let lock = self
            .building
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .entry(id.clone())
            .or_default()
            .clone();
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        if let Ok(s) = self.get(&id) {
            return Ok((s, None));
        }
        let (session, stats) = Session::prepare(image, &cfg, self.cache_dir.as_deref())?;
        let session = Arc::new(session);
        self.sessions
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(id.clone(), session.clone());
        self.building.lock().unwrap_or_else(|e| e.into_inner()).remove(&id);
        Ok((session, Some(stats)))
    }
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/trajectories", get(trajectories))
        .route("/sessions/{id}/track", post(track))
        .route("/sessions/{id}/image", get(image))
        .layer(DefaultBodyLimit::max(64 << 20))
        .with_state(store)
}

pub struct ApiError(pub Error);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e)
    }
}

#[derive(Serialize)]
struct ErrorBody {
    error: &'static str,
    detail: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            Error::UnknownSession(_) => StatusCode::NOT_FOUND,
            Error::NoRoute { .. } | Error::Core(tubetrack_core::Error::NoRoute { .. }) => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            Error::Core(tubetrack_core::Error::Unreachable { .. })
            | Error::Core(tubetrack_core::Error::BacktrackStalled { .. })
            | Error::Core(tubetrack_core::Error::Generation(_))
            | Error::Core(tubetrack_core::Error::ZeroVector)
            | Error::Corrupt { .. } => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        let body = ErrorBody {
            error: self.0.code(),
            detail: self.0.detail(),
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T> + Send + 'static) -> Result<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| Error::Request(format!("worker failed: {e}")))?
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub image_path: Option<String>,
    pub image_base64: Option<String>,
    pub config: Option<serde_json::Value>,
}

#[derive(Debug, Serialize)]
pub struct SessionCreated {
    pub session_id: String,
    pub width: usize,
    pub height: usize,
    pub config: PipelineConfig,
    /// Absent when the session already existed.
    pub prepared: Option<PrepareStats>,
    #[serde(flatten)]
    pub trajectories: TrajectoriesDoc,
}

async fn create_session(State(store): State<Arc<SessionStore>>, Json(req): Json<CreateSession>) -> ApiResult<Json<SessionCreated>> {
    let image = match (&req.image_path, &req.image_base64) {
        (Some(_), Some(_)) => return Err(Error::Request("give either image_path or image_base64".into()).into()),
        (None, None) => return Err(Error::Request("missing image_path or image_base64".into()).into()),
        (Some(p), None) => {
            if !store.allow_paths {
                return Err(Error::Request("image paths are disabled on this server".into()).into());
            }
            let p = PathBuf::from(p);
            blocking(move || read_image(&p)).await?
        }
        (None, Some(b)) => {
            let bytes = base64::engine::general_purpose::STANDARD
                .decode(b.trim())
                .map_err(|e| Error::Request(format!("image_base64: {e}")))?;
            decode_image(&bytes)?
        }
    };
    let config = req.config;
    let st = store.clone();
    let (session, prepared) = blocking(move || st.open(image, config.as_ref())).await?;
    Ok(Json(SessionCreated {
        session_id: session.id().to_string(),
        width: session.image().width(),
        height: session.image().height(),
        config: session.config().clone(),
        prepared,
        trajectories: session.trajectories_doc(),
    }))
}

#[derive(Debug, Serialize)]
pub struct TrajectoriesReply {
    #[serde(flatten)]
    pub trajectories: TrajectoriesDoc,
    /// `data:image/png;base64,...` of the vessel score, stretched to 8 bits.
    pub zeta_preview: String,
}

async fn trajectories(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult<Json<TrajectoriesReply>> {
    let s = store.get(&id)?;
    let f = &s.extraction().features;
    let zeta: Vec<f64> = f.zeta().iter().map(|&v| v as f64).collect();
    let png = encode_plane8(f.width(), f.height(), &zeta);
    Ok(Json(TrajectoriesReply {
        trajectories: s.trajectories_doc(),
        zeta_preview: format!(
            "data:image/png;base64,{}",
            base64::engine::general_purpose::STANDARD.encode(png)
        ),
    }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackRequest {
    pub points: Vec<[f64; 2]>,
    pub metric: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct TrackReply {
    pub metric: &'static str,
    #[serde(flatten)]
    pub path: TrackedPath,
    pub seeds: Vec<SeedNode>,
    pub legs: Vec<Leg>,
    pub seconds: f64,
}

async fn track(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    Json(req): Json<TrackRequest>,
) -> ApiResult<Json<TrackReply>> {
    let s = store.get(&id)?;
    let weighting = match &req.metric {
        Some(m) => parse_weighting(m)?,
        None => s.config().weighting(),
    };
    if req.points.len() < 2 {
        return Err(Error::Request("tracking needs at least two points".into()).into());
    }
    let mut seeds = Vec::with_capacity(req.points.len());
    for [x, y] in &req.points {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::Request("point coordinates must be finite".into()).into());
        }
        seeds.push(Pixel::new(x.round() as i32, y.round() as i32));
    }
    let r = blocking(move || s.track(&seeds, weighting)).await?;
    Ok(Json(TrackReply {
        metric: r.metric,
        path: r.path,
        seeds: r.seeds,
        legs: r.legs,
        seconds: r.seconds,
    }))
}

async fn image(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult<Response> {
    let s = store.get(&id)?;
    let png = encode_png8(s.image());
    Ok(([(header::CONTENT_TYPE, "image/png")], png).into_response())
}

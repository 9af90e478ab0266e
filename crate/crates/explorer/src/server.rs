//! HTTP endpoints.

use std::sync::Arc;
use std::time::Duration;

use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use cubiclab::classify::Budgets;
use cubiclab::grid::{Resolution, Window};
use cubiclab::slice::SliceConfig;
use cubiclab::Complex64;
use serde::Deserialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::cache::{cache_key, Lookup, TileCache};
use crate::config::ServiceConfig;
use crate::jobs::{self, PetalJob, PointJob, RaysJob};
use crate::pool::WorkerPool;

pub const RETRY_AFTER_SECS: u64 = 2;
pub const DEFAULT_DYNAMICS_RES: u32 = 256;
pub const DEFAULT_PETAL_SAMPLES: usize = 256;
pub const DEFAULT_RAYS_PERIOD: u32 = 3;

#[derive(Debug, Clone)]
pub struct AppState {
    pub cache: Arc<TileCache>,
    pub pool: WorkerPool,
    pub wait: Duration,
}

impl AppState {
    pub fn new(config: &ServiceConfig) -> std::io::Result<Self> {
        Ok(Self {
            cache: Arc::new(TileCache::new(config.cache_dir.clone())?),
            pool: WorkerPool::new(config.workers),
            wait: Duration::from_millis(config.wait_ms),
        })
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            message: message.into(),
        }
    }
}

impl From<cubiclab::Error> for ApiError {
    fn from(e: cubiclab::Error) -> Self {
        if e.is_validation() {
            Self::bad_request(e.to_string())
        } else {
            Self::internal(e.to_string())
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn lambda_of(re: Option<f64>, im: Option<f64>) -> Complex64 {
    Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0))
}

#[derive(Debug, Deserialize)]
pub struct SliceQuery {
    lambda_re: Option<f64>,
    lambda_im: Option<f64>,
    x0: Option<f64>,
    y0: Option<f64>,
    x1: Option<f64>,
    y1: Option<f64>,
    res: Option<u32>,
    orbit_budget: Option<usize>,
    dynamic_budget: Option<usize>,
}

#[derive(Debug, Deserialize)]
pub struct PointQuery {
    lambda_re: Option<f64>,
    lambda_im: Option<f64>,
    b_re: Option<f64>,
    b_im: Option<f64>,
    res: Option<u32>,
    budget: Option<usize>,
    samples: Option<usize>,
    max_period: Option<u32>,
}

impl PointQuery {
    fn lambda(&self) -> Complex64 {
        lambda_of(self.lambda_re, self.lambda_im)
    }

    fn b(&self) -> Complex64 {
        Complex64::new(self.b_re.unwrap_or(0.0), self.b_im.unwrap_or(0.0))
    }
}

fn tile_response(lookup: Lookup) -> Response {
    match lookup {
        Lookup::Ready { bytes, cached } => {
            let hash = cubiclab::tile::hex(&Sha256::digest(bytes.as_slice()));
            (
                [
                    (header::CONTENT_TYPE, HeaderValue::from_static("application/octet-stream")),
                    (header::ETAG, HeaderValue::from_str(&format!("\"{hash}\"")).unwrap()),
                    (
                        header::HeaderName::from_static("x-cache"),
                        HeaderValue::from_static(if cached { "hit" } else { "miss" }),
                    ),
                ],
                bytes.as_slice().to_vec(),
            )
                .into_response()
        }
        Lookup::Pending => (
            StatusCode::SERVICE_UNAVAILABLE,
            [(header::RETRY_AFTER, RETRY_AFTER_SECS.to_string())],
            Json(json!({ "status": "computing", "retry_after": RETRY_AFTER_SECS })),
        )
            .into_response(),
        Lookup::Failed(e) => ApiError::internal(e).into_response(),
    }
}

async fn slice(State(s): State<AppState>, Query(q): Query<SliceQuery>) -> ApiResult<Response> {
    let d = Window::centered(2.5);
    let window = Window::new(
        q.x0.unwrap_or(d.x0),
        q.y0.unwrap_or(d.y0),
        q.x1.unwrap_or(d.x1),
        q.y1.unwrap_or(d.y1),
    )?;
    let defaults = Budgets::default();
    let budgets = Budgets {
        orbit: q.orbit_budget.unwrap_or(defaults.orbit),
        dynamic: q.dynamic_budget.unwrap_or(defaults.dynamic),
        ..defaults
    };
    let mut config = SliceConfig::new(lambda_of(q.lambda_re, q.lambda_im))
        .with_window(window)
        .with_budgets(budgets);
    if let Some(n) = q.res {
        config.resolution = Resolution::square(n)?;
    }
    config.validate()?;
    let key = cache_key("slice", &config);
    let lookup = s
        .cache
        .get_or_compute(key, &s.pool, s.wait, move || {
            jobs::slice_tile(&config).map_err(|e| e.to_string())
        })
        .await;
    Ok(tile_response(lookup))
}

async fn dynamics(State(s): State<AppState>, Query(q): Query<PointQuery>) -> ApiResult<Response> {
    let (lambda, b) = (q.lambda(), q.b());
    jobs::validate_point(lambda, b)?;
    let res = q.res.unwrap_or(DEFAULT_DYNAMICS_RES);
    Resolution::square(res)?;
    let budget = q.budget.unwrap_or(Budgets::default().dynamic);
    if budget == 0 {
        return Err(cubiclab::Error::ZeroBudget.into());
    }
    let key = cache_key("dynamics", &(lambda, b, res, budget));
    let lookup = s
        .cache
        .get_or_compute(key, &s.pool, s.wait, move || {
            jobs::dynamics_tile(lambda, b, res, budget).map_err(|e| e.to_string())
        })
        .await;
    Ok(tile_response(lookup))
}

async fn classify(State(s): State<AppState>, Query(q): Query<PointQuery>) -> ApiResult<Response> {
    let job = PointJob {
        lambda: q.lambda(),
        b: q.b(),
        budgets: Budgets::default(),
    };
    jobs::validate_point(job.lambda, job.b)?;
    let out = s.pool.run(move || jobs::run_classify(&job)).await?;
    Ok(Json(out).into_response())
}

async fn petal(State(s): State<AppState>, Query(q): Query<PointQuery>) -> ApiResult<Response> {
    let job = PetalJob {
        lambda: q.lambda(),
        b: q.b(),
        samples: q.samples.unwrap_or(DEFAULT_PETAL_SAMPLES).min(1 << 16),
    };
    let out = s.pool.run(move || jobs::run_petal(&job)).await?;
    Ok(Json(out).into_response())
}

async fn rays(State(s): State<AppState>, Query(q): Query<PointQuery>) -> ApiResult<Response> {
    let job = RaysJob {
        lambda: q.lambda(),
        b: q.b(),
        max_period: q.max_period.unwrap_or(DEFAULT_RAYS_PERIOD),
    };
    let out = s.pool.run(move || jobs::run_rays(&job)).await?;
    Ok(Json(out).into_response())
}

async fn health(State(s): State<AppState>) -> Json<serde_json::Value> {
    Json(json!({
        "status": "ok",
        "version": env!("CARGO_PKG_VERSION"),
        "tile_format": cubiclab::tile::VERSION,
        "workers": s.pool.workers(),
        "busy": s.pool.busy(),
        "cached_tiles": s.cache.len(),
    }))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/slice", get(slice))
        .route("/api/dynamics", get(dynamics))
        .route("/api/classify", get(classify))
        .route("/api/petal", get(petal))
        .route("/api/rays", get(rays))
        .with_state(state)
}

pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let state = AppState::new(&config)?;
    let listener = tokio::net::TcpListener::bind((config.host.as_str(), config.port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

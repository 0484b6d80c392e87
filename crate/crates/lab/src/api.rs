//! Local HTTP JSON service for the explorer.
//!
//! Every success body echoes the effective request under `request`. Errors are
//! `{"error": {"code", "message"}}` with status 400 (validation), 404 (unknown job),
//! 413 (raster too large), 422 (domain or non-convergence) or 504 (deadline; the body
//! also carries the partial result with `partial: true`).
//!
//! Rasters come back as base64 PNG with `window`, `width` and `height`; pixel
//! `(col, row)` samples the plane at
//! `(xMin + (col + 0.5) (xMax - xMin) / width, yMax - (row + 0.5) (yMax - yMin) / height)`,
//! row 0 at the top.

use std::collections::HashMap;
use std::io::Write;
use std::net::SocketAddr;
use std::sync::atomic::Ordering;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use base64::Engine as _;
use coupled_logistic::bifurcation::{closest_return_guess, hopf_bracket};
use coupled_logistic::curve::{build_gamma, invariance_defect};
use coupled_logistic::export::{encode_png, raster_image};
use coupled_logistic::geometry::Grid;
use coupled_logistic::orbit::{estimate_attractor, iterate_forward, Verdict};
use coupled_logistic::preimage::preimage_tree;
use coupled_logistic::raster::{render_basin_of_attractor, render_escape_with, BasinClass, BasinOptions, Cell, RenderControl};
use coupled_logistic::{loci, ParamPoint, PlanePoint, Rect, Strength};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::error::{LabError, LabResult};
use crate::numbers::parse_f64;

/// Largest raster accepted, in bytes of RGB pixels.
pub const MAX_RASTER_BYTES: usize = 16 * 1024 * 1024;
pub const MAX_ORBIT_STEPS: u64 = 10_000_000;
pub const MAX_ORBIT_SAMPLES: usize = 100_000;
pub const MAX_PREIMAGE_DEPTH: usize = 24;
pub const MAX_PREIMAGE_BUDGET: usize = 2_000_000;
pub const MAX_ATTRACTOR_STEPS: u64 = 100_000_000;
pub const MAX_GAMMA_GRID: usize = 1 << 16;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self { status, code, message: message.into() }
    }

    fn validation(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "validation", message)
    }
}

impl From<coupled_logistic::Error> for ApiError {
    fn from(e: coupled_logistic::Error) -> Self {
        use coupled_logistic::Error as E;
        match &e {
            E::InvalidParams { .. } | E::InvalidArgument(_) => Self::validation(e.to_string()),
            _ if e.is_non_convergence() => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "non_convergence", e.to_string()),
            _ => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "domain", e.to_string()),
        }
    }
}

fn error_body(code: &str, message: &str) -> Value {
    json!({ "error": { "code": code, "message": message } })
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(error_body(self.code, &self.message))).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

/// Cancellation table for renders that carry a `requestId`.
#[derive(Debug, Clone, Default)]
pub struct AppState {
    jobs: Arc<Mutex<HashMap<String, Arc<RenderControl>>>>,
}

impl AppState {
    fn register(&self, id: &str, control: Arc<RenderControl>) {
        self.jobs.lock().unwrap_or_else(|p| p.into_inner()).insert(id.to_string(), control);
    }

    fn finish(&self, id: &str, control: &Arc<RenderControl>) {
        let mut jobs = self.jobs.lock().unwrap_or_else(|p| p.into_inner());
        // a newer job may have reused the id
        if jobs.get(id).is_some_and(|c| Arc::ptr_eq(c, control)) {
            jobs.remove(id);
        }
    }

    fn cancel(&self, id: &str) -> bool {
        let jobs = self.jobs.lock().unwrap_or_else(|p| p.into_inner());
        match jobs.get(id) {
            Some(c) => {
                c.cancel.store(true, Ordering::Relaxed);
                true
            }
            None => false,
        }
    }

    pub fn active_jobs(&self) -> usize {
        self.jobs.lock().unwrap_or_else(|p| p.into_inner()).len()
    }
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::validation(format!("request body: {e}")))
}

fn params(mu: f64, epsilon: f64) -> Result<ParamPoint, ApiError> {
    Ok(ParamPoint::new(mu, epsilon)?)
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for Window {
    fn default() -> Self {
        Self { x_min: -0.25, x_max: 1.25, y_min: -0.25, y_max: 1.25 }
    }
}

impl Window {
    fn rect(&self) -> Result<Rect, ApiError> {
        Ok(Rect::new(self.x_min, self.x_max, self.y_min, self.y_max)?)
    }
}

fn check_raster(width: usize, height: usize) -> Result<(), ApiError> {
    if width < 2 || height < 2 {
        return Err(ApiError::validation("width and height must be at least 2"));
    }
    if width.saturating_mul(height).saturating_mul(3) > MAX_RASTER_BYTES {
        return Err(ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "too_large",
            format!("{width}x{height} exceeds the {MAX_RASTER_BYTES}-byte raster cap"),
        ));
    }
    Ok(())
}

fn png_base64(img: &image::RgbImage) -> Result<String, ApiError> {
    Ok(base64::engine::general_purpose::STANDARD.encode(encode_png(img)?))
}

fn default_width() -> usize {
    512
}

fn default_n_max() -> u64 {
    500
}

// ---- /api/loci

async fn loci_handler(Query(q): Query<HashMap<String, String>>) -> ApiResult {
    let raw = q.get("eps").ok_or_else(|| ApiError::validation("missing query parameter eps"))?;
    let eps = parse_f64(raw).map_err(|m| ApiError::validation(format!("eps: {m}")))?;
    // any positive mu validates the coupling alone
    params(1.0, eps)?;
    let l = loci(eps);
    let strength = match coupled_logistic::params::strength_of(eps) {
        Strength::Small => "small",
        Strength::Large => "large",
        Strength::Other => "other",
    };
    let mut body = serde_json::to_value(l).expect("loci serialize");
    body["strength"] = json!(strength);
    body["request"] = json!({ "eps": eps });
    Ok(Json(body).into_response())
}

// ---- /api/orbit

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct OrbitRequest {
    pub mu: f64,
    pub epsilon: f64,
    pub z0: PlanePoint,
    #[serde(default = "OrbitRequest::default_n_max")]
    pub n_max: u64,
    /// Samples returned at most; longer orbits are thinned evenly.
    #[serde(default = "OrbitRequest::default_max_samples")]
    pub max_samples: usize,
}

impl OrbitRequest {
    fn default_n_max() -> u64 {
        1000
    }

    fn default_max_samples() -> usize {
        10_000
    }
}

async fn orbit_handler(body: Bytes) -> ApiResult {
    let req: OrbitRequest = parse_body(&body)?;
    let p = params(req.mu, req.epsilon)?;
    if !req.z0.is_finite() {
        return Err(ApiError::validation("z0 must be finite"));
    }
    if req.n_max > MAX_ORBIT_STEPS {
        return Err(ApiError::validation(format!("nMax is capped at {MAX_ORBIT_STEPS}")));
    }
    if req.max_samples == 0 || req.max_samples > MAX_ORBIT_SAMPLES {
        return Err(ApiError::validation(format!("maxSamples must be in 1..={MAX_ORBIT_SAMPLES}")));
    }
    let r = req.clone();
    let orbit = blocking(move || iterate_forward(&p, r.z0, r.n_max)).await?;
    let thin = orbit.samples.len().div_ceil(req.max_samples).max(1);
    let samples: Vec<PlanePoint> = orbit.samples.iter().step_by(thin).copied().collect();
    let (verdict, escape_step) = match orbit.verdict {
        Verdict::Escaped { step } => ("escaped", Some(step)),
        Verdict::BoundedSoFar { .. } => ("bounded", None),
    };
    Ok(Json(json!({
        "request": req,
        "verdict": verdict,
        "escapeStep": escape_step,
        "stride": orbit.stride * thin as u64,
        "samples": samples,
        "syncGap": orbit.sync_gap.last(),
    }))
    .into_response())
}

// ---- /api/preimages

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PreimagesRequest {
    pub mu: f64,
    pub epsilon: f64,
    pub root: PlanePoint,
    pub depth: usize,
    #[serde(default = "PreimagesRequest::default_budget")]
    pub budget: usize,
    #[serde(default)]
    pub clip: Option<Window>,
}

impl PreimagesRequest {
    fn default_budget() -> usize {
        100_000
    }
}

async fn preimages_handler(body: Bytes) -> ApiResult {
    let req: PreimagesRequest = parse_body(&body)?;
    let p = params(req.mu, req.epsilon)?;
    if !req.root.is_finite() {
        return Err(ApiError::validation("root must be finite"));
    }
    if req.depth > MAX_PREIMAGE_DEPTH || req.budget > MAX_PREIMAGE_BUDGET {
        return Err(ApiError::validation(format!("depth is capped at {MAX_PREIMAGE_DEPTH}, budget at {MAX_PREIMAGE_BUDGET}")));
    }
    let clip = req.clip.map(|w| w.rect()).transpose()?;
    let r = req.clone();
    let tree = blocking(move || preimage_tree(&p, r.root, r.depth, r.budget, clip)).await?;
    let points: Vec<PlanePoint> = tree.levels.iter().skip(1).flatten().copied().collect();
    Ok(Json(json!({
        "request": req,
        "points": points,
        "levelCounts": tree.levels.iter().map(Vec::len).collect::<Vec<_>>(),
        "budgetExhausted": tree.budget_exhausted,
    }))
    .into_response())
}

// ---- /api/basin

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BasinRequest {
    pub mu: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub window: Window,
    #[serde(default = "default_width")]
    pub width: usize,
    #[serde(default = "default_width")]
    pub height: usize,
    #[serde(default = "default_n_max")]
    pub n_max: u64,
    #[serde(default = "BasinRequest::default_supersample")]
    pub supersample: u32,
    /// When present, cells are classified against the attractor reached from this point.
    #[serde(default)]
    pub attractor_seed: Option<PlanePoint>,
    /// Lets `DELETE /api/jobs/{id}` cancel the render.
    #[serde(default)]
    pub request_id: Option<String>,
    #[serde(default)]
    pub timeout_ms: Option<u64>,
}

impl BasinRequest {
    fn default_supersample() -> u32 {
        1
    }
}

async fn basin_handler(State(state): State<AppState>, body: Bytes) -> ApiResult {
    let req: BasinRequest = parse_body(&body)?;
    let p = params(req.mu, req.epsilon)?;
    let rect = req.window.rect()?;
    check_raster(req.width, req.height)?;
    if req.supersample == 0 || req.supersample > 8 {
        return Err(ApiError::validation("supersample must be in 1..=8"));
    }
    if req.attractor_seed.is_some_and(|z| !z.is_finite()) {
        return Err(ApiError::validation("attractorSeed must be finite"));
    }
    let control = Arc::new(match req.timeout_ms {
        Some(ms) => RenderControl::with_deadline(Instant::now() + Duration::from_millis(ms)),
        None => RenderControl::default(),
    });
    if let Some(id) = &req.request_id {
        state.register(id, control.clone());
    }
    let (r, c) = (req.clone(), control.clone());
    let outcome = blocking(move || -> coupled_logistic::Result<(image::RgbImage, bool, Value)> {
        let res = (r.width, r.height);
        match r.attractor_seed {
            None => {
                let raster = render_escape_with(&p, rect, res, r.n_max, r.supersample, &c)?;
                let stats = json!({ "boundedCells": raster.count(Cell::is_bounded), "escapedCells": raster.count(Cell::is_escaped) });
                Ok((raster_image(&raster), raster.meta.partial, stats))
            }
            Some(seed) => {
                let opts = BasinOptions { n_max: r.n_max, ..BasinOptions::default() };
                let b = render_basin_of_attractor(&p, seed, rect, res, opts, &c)?;
                let stats = json!({
                    "basinCells": b.raster.count(|c| c == Cell::Basin(BasinClass::ThisAttractor)),
                    "attractor": { "period": b.attractor.period, "cells": b.attractor.cell_count(), "fat": b.attractor.is_fat() },
                });
                Ok((raster_image(&b.raster), b.raster.meta.partial, stats))
            }
        }
    })
    .await;
    if let Some(id) = &req.request_id {
        state.finish(id, &control);
    }
    let (img, partial, stats) = outcome??;
    let cancelled = control.cancel.load(Ordering::Relaxed);
    let mut body = json!({
        "request": req,
        "png": png_base64(&img)?,
        "window": req.window,
        "width": req.width,
        "height": req.height,
        "partial": partial,
        "cancelled": cancelled,
    });
    for (k, v) in stats.as_object().expect("stats object") {
        body[k] = v.clone();
    }
    if partial && !cancelled {
        body["error"] = json!({ "code": "timeout", "message": "render deadline reached" });
        return Ok((StatusCode::GATEWAY_TIMEOUT, Json(body)).into_response());
    }
    Ok(Json(body).into_response())
}

// ---- /api/attractor

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AttractorRequest {
    pub mu: f64,
    pub epsilon: f64,
    pub z0: PlanePoint,
    #[serde(default = "AttractorRequest::default_total")]
    pub n_total: u64,
    #[serde(default = "AttractorRequest::default_transient")]
    pub n_transient: u64,
    #[serde(default)]
    pub window: Window,
    #[serde(default = "default_width")]
    pub width: usize,
    #[serde(default = "default_width")]
    pub height: usize,
}

impl AttractorRequest {
    fn default_total() -> u64 {
        1_000_000
    }

    fn default_transient() -> u64 {
        10_000
    }
}

async fn attractor_handler(body: Bytes) -> ApiResult {
    let req: AttractorRequest = parse_body(&body)?;
    let p = params(req.mu, req.epsilon)?;
    let rect = req.window.rect()?;
    check_raster(req.width, req.height)?;
    if req.n_total > MAX_ATTRACTOR_STEPS {
        return Err(ApiError::validation(format!("nTotal is capped at {MAX_ATTRACTOR_STEPS}")));
    }
    if !req.z0.is_finite() {
        return Err(ApiError::validation("z0 must be finite"));
    }
    let r = req.clone();
    let a = blocking(move || estimate_attractor(&p, r.z0, r.n_total, r.n_transient, rect, (r.width, r.height))).await??;
    let grid = Grid::new(rect, req.width, req.height)?;
    let mut img = image::RgbImage::from_pixel(grid.width as u32, grid.height as u32, image::Rgb([255, 255, 255]));
    for &c in &a.occupied_cells {
        img.put_pixel(c % grid.width as u32, c / grid.width as u32, image::Rgb([0, 0, 0]));
    }
    Ok(Json(json!({
        "request": req,
        "period": a.period,
        "fat": a.is_fat(),
        "cells": a.cell_count(),
        "areaEstimate": a.area_estimate,
        "outsideWindow": a.outside_window,
        "png": png_base64(&img)?,
        "window": req.window,
        "width": req.width,
        "height": req.height,
    }))
    .into_response())
}

// ---- /api/gamma

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GammaRequest {
    pub mu: f64,
    pub epsilon: f64,
    #[serde(default = "GammaRequest::default_grid")]
    pub grid: usize,
}

impl GammaRequest {
    fn default_grid() -> usize {
        2048
    }
}

async fn gamma_handler(body: Bytes) -> ApiResult {
    let req: GammaRequest = parse_body(&body)?;
    let p = params(req.mu, req.epsilon)?;
    if req.grid < 8 || req.grid > MAX_GAMMA_GRID {
        return Err(ApiError::validation(format!("grid must be in 8..={MAX_GAMMA_GRID}")));
    }
    let grid = req.grid;
    let (g, report) = blocking(move || build_gamma(&p, grid, coupled_logistic::curve::DEFAULT_MAX_ITERS, 1e-12)).await??;
    let defect = invariance_defect(&p, &g.assembled, 2000);
    Ok(Json(json!({
        "request": req,
        "curve": g.assembled.vertices(),
        "pieces": {
            "bottom": g.bottom.vertices(),
            "top": g.top.vertices(),
            "left": g.left.vertices(),
            "right": g.right.vertices(),
        },
        "regime": report.regime,
        "iterations": report.iterations,
        "invarianceDefect": defect,
    }))
    .into_response())
}

// ---- /api/hopf

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct HopfRequest {
    /// Start of the scan.
    pub mu: f64,
    pub epsilon: f64,
    pub mu_end: f64,
    #[serde(default = "HopfRequest::default_period")]
    pub period: usize,
    #[serde(default = "HopfRequest::default_width")]
    pub width: f64,
    #[serde(default = "HopfRequest::default_z0")]
    pub z0: PlanePoint,
    #[serde(default = "HopfRequest::default_transient")]
    pub transient: usize,
}

impl HopfRequest {
    fn default_period() -> usize {
        2
    }

    fn default_width() -> f64 {
        1e-5
    }

    fn default_z0() -> PlanePoint {
        PlanePoint::new(0.3, 0.6)
    }

    fn default_transient() -> usize {
        20_000
    }
}

async fn hopf_handler(body: Bytes) -> ApiResult {
    let req: HopfRequest = parse_body(&body)?;
    let start = params(req.mu, req.epsilon)?;
    params(req.mu_end, req.epsilon)?;
    if req.mu_end <= req.mu {
        return Err(ApiError::validation("muEnd must exceed mu"));
    }
    if req.period == 0 || req.period > coupled_logistic::orbit::MAX_PERIOD {
        return Err(ApiError::validation("period out of range"));
    }
    if !(req.width > 0.0) || req.transient > 10_000_000 {
        return Err(ApiError::validation("width must be positive and transient at most 1e7"));
    }
    let r = req.clone();
    let bracket = blocking(move || {
        let seed = closest_return_guess(&start, r.z0, r.period, r.transient, 4000)
            .ok_or(coupled_logistic::Error::NoConvergence { iterations: r.transient, residual: f64::NAN })?;
        hopf_bracket(r.epsilon, r.period, r.mu, r.mu_end, r.width, seed)
    })
    .await??;
    Ok(Json(json!({ "request": req, "bracket": bracket })).into_response())
}

// ---- /api/jobs/{id}

async fn cancel_handler(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    if state.cancel(&id) {
        Ok((StatusCode::ACCEPTED, Json(json!({ "id": id, "cancelled": true }))).into_response())
    } else {
        Err(ApiError::new(StatusCode::NOT_FOUND, "not_found", format!("no running job '{id}'")))
    }
}

fn is_local_origin(origin: &HeaderValue) -> bool {
    let Ok(s) = origin.to_str() else { return false };
    let Some(rest) = s.strip_prefix("http://").or_else(|| s.strip_prefix("https://")) else {
        return false;
    };
    let host = match rest.strip_prefix('[') {
        Some(v6) => v6.split(']').next().map(|h| format!("[{h}]")).unwrap_or_default(),
        None => rest.split(':').next().unwrap_or("").to_string(),
    };
    matches!(host.as_str(), "localhost" | "127.0.0.1" | "[::1]")
}

pub fn router(state: AppState) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(AllowOrigin::predicate(|o, _| is_local_origin(o)))
        .allow_methods([Method::GET, Method::POST, Method::DELETE])
        .allow_headers([header::CONTENT_TYPE]);
    Router::new()
        .route("/api/loci", get(loci_handler))
        .route("/api/orbit", post(orbit_handler))
        .route("/api/preimages", post(preimages_handler))
        .route("/api/basin", post(basin_handler))
        .route("/api/attractor", post(attractor_handler))
        .route("/api/gamma", post(gamma_handler))
        .route("/api/hopf", post(hopf_handler))
        .route("/api/jobs/{id}", delete(cancel_handler))
        .with_state(state)
        .layer(cors)
}

/// Serves until Ctrl-C.
pub fn serve_blocking(host: &str, port: u16, stdout: &mut dyn Write) -> LabResult<()> {
    let ip: std::net::IpAddr = host.parse().map_err(|_| LabError::usage("--host", format!("'{host}' is not an IP address")))?;
    let addr = SocketAddr::new(ip, port);
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        let local = listener.local_addr()?;
        if !ip.is_loopback() {
            writeln!(stdout, "warning: listening on a non-loopback address")?;
        }
        writeln!(stdout, "listening on http://{local}")?;
        stdout.flush()?;
        axum::serve(listener, router(AppState::default()))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| LabError::Server(e.to_string()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_origins() {
        for ok in ["http://localhost:5173", "http://127.0.0.1", "https://localhost", "http://[::1]:8080"] {
            assert!(is_local_origin(&HeaderValue::from_static(ok)), "{ok}");
        }
        for bad in ["http://example.com", "http://localhost.evil.com", "http://192.168.0.2:80", "null", "file://"] {
            assert!(!is_local_origin(&HeaderValue::from_static(bad)), "{bad}");
        }
    }

    #[test]
    fn raster_cap() {
        assert!(check_raster(2048, 2048).is_ok());
        assert_eq!(check_raster(4096, 4096).unwrap_err().status, StatusCode::PAYLOAD_TOO_LARGE);
        assert_eq!(check_raster(1, 10).unwrap_err().status, StatusCode::BAD_REQUEST);
    }

    #[test]
    fn job_registry_cancels_and_forgets() {
        let s = AppState::default();
        let c = Arc::new(RenderControl::default());
        s.register("a", c.clone());
        assert!(s.cancel("a"));
        assert!(c.stopped());
        s.finish("a", &c);
        assert!(!s.cancel("a"));
        assert_eq!(s.active_jobs(), 0);
    }
}

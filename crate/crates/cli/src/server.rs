//! JSON HTTP API over a loaded model.

use std::future::Future;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::{json, Value};

use emorec_core::predict::{Limits, PredictRequest, Predictor, TOP_WORDS};
use emorec_core::report::{TopicPositivity, TopicReport};
use emorec_core::topics::{distance_matrix, DistanceMatrix};
use emorec_core::{EmotionModel, Error, Variant};

pub const API_SCHEMA_VERSION: u32 = 1;

/// Room for JSON escaping on top of the text limit (`\u0000` is six bytes).
fn body_limit(limits: &Limits) -> usize {
    limits.max_text_bytes.saturating_mul(6).saturating_add(1024)
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelInfo {
    pub schema_version: u32,
    pub format_version: u32,
    pub variant: Variant,
    pub n_topics: Option<usize>,
    pub n_features: usize,
    pub n_emotions: usize,
    pub emotions: Vec<String>,
    pub epsilon: f64,
    pub version: &'static str,
}

pub struct AppState {
    predictor: Predictor,
    topics: Option<Vec<TopicPositivity>>,
    distances: Option<DistanceMatrix>,
    info: ModelInfo,
}

impl AppState {
    pub fn new(model: EmotionModel, limits: Limits) -> emorec_core::Result<Arc<Self>> {
        let (topics, distances) = match model.topic_profiles() {
            Some(profiles) => {
                let report = TopicReport::new(&model, None, TOP_WORDS)?;
                (
                    Some(report.positivity(model.polarity())?),
                    Some(distance_matrix(&profiles)?),
                )
            }
            None => (None, None),
        };
        let info = ModelInfo {
            schema_version: API_SCHEMA_VERSION,
            format_version: emorec_core::model::FORMAT_VERSION,
            variant: model.variant(),
            n_topics: model.partition().map(|p| p.n_topics()),
            n_features: model.n_features(),
            n_emotions: model.emotions().len(),
            emotions: model.emotions().to_vec(),
            epsilon: model.epsilon(),
            version: env!("CARGO_PKG_VERSION"),
        };
        Ok(Arc::new(AppState {
            predictor: Predictor::new(model).with_limits(limits),
            topics,
            distances,
            info,
        }))
    }
}

struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, code) = match &e {
            Error::NoTokens | Error::NoModelledTokens => (StatusCode::BAD_REQUEST, "no_modelled_tokens"),
            Error::TextTooLarge { .. } => (StatusCode::PAYLOAD_TOO_LARGE, "payload_too_large"),
            Error::DegeneratePosterior => (StatusCode::UNPROCESSABLE_ENTITY, "degenerate_posterior"),
            Error::InvalidArgument(_) => (StatusCode::BAD_REQUEST, "invalid_request"),
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({
            "schema_version": API_SCHEMA_VERSION,
            "code": self.code,
            "message": self.message,
        });
        (self.status, Json(body)).into_response()
    }
}

fn requires_topics() -> ApiError {
    ApiError::new(
        StatusCode::CONFLICT,
        "requires_topic_variant",
        Error::RequiresTopicVariant.to_string(),
    )
}

async fn predict(
    State(state): State<Arc<AppState>>,
    body: Result<Bytes, BytesRejection>,
) -> Result<Response, ApiError> {
    let body = body.map_err(|rej| {
        if rej.status() == StatusCode::PAYLOAD_TOO_LARGE {
            ApiError::new(StatusCode::PAYLOAD_TOO_LARGE, "payload_too_large", rej.body_text())
        } else {
            ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", rej.body_text())
        }
    })?;
    let req: PredictRequest = serde_json::from_slice(&body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", e.to_string()))?;
    let resp = state.predictor.predict(&req)?;
    Ok(Json(resp).into_response())
}

async fn model_info(State(state): State<Arc<AppState>>) -> Json<ModelInfo> {
    Json(state.info.clone())
}

async fn topics(State(state): State<Arc<AppState>>) -> Result<Json<Value>, ApiError> {
    let topics = state.topics.as_ref().ok_or_else(requires_topics)?;
    Ok(Json(json!({ "schema_version": API_SCHEMA_VERSION, "topics": topics })))
}

async fn distances(State(state): State<Arc<AppState>>) -> Result<Json<Value>, ApiError> {
    let d = state.distances.as_ref().ok_or_else(requires_topics)?;
    Ok(Json(json!({
        "schema_version": API_SCHEMA_VERSION,
        "labels": d.labels,
        "values": d.values,
    })))
}

async fn health() -> Json<Value> {
    Json(json!({ "schema_version": API_SCHEMA_VERSION, "status": "ok" }))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

pub fn router(state: Arc<AppState>) -> Router {
    let limit = body_limit(&state.predictor.limits());
    Router::new()
        .route("/predict", post(predict).layer(DefaultBodyLimit::max(limit)))
        .route("/model", get(model_info))
        .route("/topics", get(topics))
        .route("/emotions/distances", get(distances))
        .route("/health", get(health))
        .fallback(not_found)
        .with_state(state)
}

pub async fn serve(
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> anyhow::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await?;
    Ok(())
}

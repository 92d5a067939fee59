use super::{AnnotationError, AnnotationService, ExportFilter};
use crate::metrics::{Dimension, LikertScore, ScoreTriple};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use std::net::SocketAddr;
use std::sync::Arc;

type Shared = Arc<AnnotationService>;

#[derive(Debug)]
pub struct ApiError(AnnotationError);

impl From<AnnotationError> for ApiError {
    fn from(e: AnnotationError) -> Self {
        ApiError(e)
    }
}

impl ApiError {
    fn kind(&self) -> (StatusCode, &'static str) {
        match &self.0 {
            AnnotationError::UnknownSession(_) => (StatusCode::NOT_FOUND, "unknown_session"),
            AnnotationError::UnknownItem(_) => (StatusCode::NOT_FOUND, "unknown_item"),
            AnnotationError::NotAssigned { .. } => (StatusCode::CONFLICT, "not_assigned"),
            AnnotationError::StateViolation { .. } => (StatusCode::CONFLICT, "state_violation"),
            AnnotationError::InFlight { .. } => (StatusCode::CONFLICT, "in_flight"),
            AnnotationError::Validation(_) => (StatusCode::UNPROCESSABLE_ENTITY, "validation"),
            AnnotationError::EmptyOverlap { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "empty_overlap"),
            AnnotationError::Pool(_) | AnnotationError::Log { .. } => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind) = self.kind();
        (status, Json(json!({ "error": kind, "message": self.0.to_string() }))).into_response()
    }
}

fn invalid(msg: impl Into<String>) -> ApiError {
    ApiError(AnnotationError::Validation(msg.into()))
}

fn body(raw: Result<Json<Value>, axum::extract::rejection::JsonRejection>) -> Result<Value, ApiError> {
    raw.map(|Json(v)| v).map_err(|e| invalid(e.body_text()))
}

fn str_field<'a>(v: &'a Value, name: &str) -> Result<&'a str, ApiError> {
    v.get(name)
        .and_then(Value::as_str)
        .ok_or_else(|| invalid(format!("missing string field {name:?}")))
}

async fn open_session(
    State(svc): State<Shared>,
    raw: Result<Json<Value>, axum::extract::rejection::JsonRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let v = body(raw)?;
    let annotator = str_field(&v, "annotator_id")?;
    let seed = match v.get("seed") {
        None | Some(Value::Null) => None,
        Some(s) => Some(s.as_u64().ok_or_else(|| invalid("seed must be a non-negative integer"))?),
    };
    let session_id = svc.open_session(annotator, seed)?;
    Ok((StatusCode::CREATED, Json(json!({ "session_id": session_id }))))
}

async fn next_item(State(svc): State<Shared>, Path(session_id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(svc.next_item(&session_id)?))
}

async fn postedit(
    State(svc): State<Shared>,
    Path(item_id): Path<String>,
    raw: Result<Json<Value>, axum::extract::rejection::JsonRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let v = body(raw)?;
    let view = svc.submit_postedit(str_field(&v, "session_id")?, &item_id, str_field(&v, "text")?)?;
    Ok(Json(view))
}

async fn meaning(
    State(svc): State<Shared>,
    Path(item_id): Path<String>,
    raw: Result<Json<Value>, axum::extract::rejection::JsonRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let v = body(raw)?;
    let matches = v
        .get("matches")
        .and_then(Value::as_bool)
        .ok_or_else(|| invalid("missing boolean field \"matches\""))?;
    Ok(Json(svc.confirm_meaning(str_field(&v, "session_id")?, &item_id, matches)?))
}

async fn scores(
    State(svc): State<Shared>,
    Path(item_id): Path<String>,
    raw: Result<Json<Value>, axum::extract::rejection::JsonRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let v = body(raw)?;
    let score = |d: Dimension| -> Result<LikertScore, ApiError> {
        let raw = v
            .get(d.as_str())
            .ok_or_else(|| invalid(format!("missing score for {}", d.as_str())))?;
        LikertScore::from_json(raw).map_err(|e| invalid(format!("{}: {e}", d.as_str())))
    };
    let triple = ScoreTriple {
        grammaticality: score(Dimension::Grammaticality)?,
        fluency: score(Dimension::Fluency)?,
        meaning: score(Dimension::Meaning)?,
    };
    Ok(Json(svc.submit_scores(str_field(&v, "session_id")?, &item_id, triple)?))
}

async fn export(State(svc): State<Shared>, Query(filter): Query<ExportFilter>) -> impl IntoResponse {
    ([(header::CONTENT_TYPE, "application/x-ndjson")], svc.export(&filter))
}

#[derive(Debug, Deserialize)]
struct AgreementQuery {
    a: String,
    b: String,
    #[serde(default)]
    dimension: Option<String>,
}

async fn agreement(State(svc): State<Shared>, Query(q): Query<AgreementQuery>) -> Result<impl IntoResponse, ApiError> {
    let dims = match q.dimension.as_deref() {
        None | Some("") | Some("all") => Dimension::ALL.to_vec(),
        Some(d) => vec![d.parse::<Dimension>().map_err(|e| invalid(e.to_string()))?],
    };
    Ok(Json(svc.agreement(&q.a, &q.b, &dims)?))
}

pub fn router(service: Shared) -> Router {
    Router::new()
        .route("/sessions", post(open_session))
        .route("/sessions/{id}/next", get(next_item))
        .route("/items/{id}/postedit", post(postedit))
        .route("/items/{id}/meaning", post(meaning))
        .route("/items/{id}/scores", post(scores))
        .route("/export", get(export))
        .route("/agreement", get(agreement))
        .with_state(service)
}

/// Serves until Ctrl-C.
pub async fn serve(service: Shared, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "annotation service listening");
    axum::serve(listener, router(service))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

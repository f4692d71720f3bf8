//! HTTP+JSON routes.

use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use qalam_core::prompts::{Prompt, PromptFilter};
use serde::{Deserialize, Serialize};

use crate::session::{NewEssay, ProfilePatch, ServiceError, SessionService};

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, body: ErrorBody { code: "bad_request".into(), message: message.into() } }
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        let status = match e {
            ServiceError::NotFound { .. } => StatusCode::NOT_FOUND,
            ServiceError::Validation(_) | ServiceError::EmptyText => StatusCode::BAD_REQUEST,
            ServiceError::Unscorable => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Conflict(_) => StatusCode::CONFLICT,
            ServiceError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError { status, body: ErrorBody { code: e.code().into(), message: e.to_string() } }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type Shared = State<Arc<SessionService>>;
type ApiResult<T> = Result<T, ApiError>;

pub fn router(service: Arc<SessionService>) -> Router {
    Router::new()
        .route("/health", get(|| async { Json(serde_json::json!({"status": "ok"})) }))
        .route("/users", post(create_user))
        .route("/users/{id}", get(get_user))
        .route("/users/{id}/profile", patch(patch_profile))
        .route("/users/{id}/essays", get(user_essays))
        .route("/prompts", get(list_prompts).post(add_prompt))
        .route("/prompts/{id}", get(get_prompt))
        .route("/essays", post(create_essay))
        .route("/essays/{id}", get(get_essay))
        .route("/essays/{id}/check", post(check))
        .route("/essays/{id}/submissions", get(submissions))
        .route("/essays/{id}/submissions/{rev}", get(submission))
        .route("/essays/{id}/progress", get(progress))
        .route("/essays/{id}/diff", get(diff))
        .with_state(service)
}

async fn create_user(State(s): Shared, body: Option<Json<ProfilePatch>>) -> ApiResult<impl IntoResponse> {
    let patch = body.map(|Json(p)| p).unwrap_or_default();
    Ok((StatusCode::CREATED, Json(s.create_user(patch)?)))
}

async fn get_user(State(s): Shared, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(s.user(&id)?))
}

async fn patch_profile(
    State(s): Shared,
    Path(id): Path<String>,
    body: Result<Json<ProfilePatch>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let Json(patch) = body?;
    Ok(Json(s.upsert_profile(&id, patch)?))
}

async fn user_essays(State(s): Shared, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(s.essays_of(&id)?))
}

async fn list_prompts(State(s): Shared, query: Result<Query<PromptFilter>, QueryRejection>) -> ApiResult<impl IntoResponse> {
    let Query(filter) = query?;
    Ok(Json(s.list_prompts(&filter)))
}

async fn add_prompt(State(s): Shared, body: Result<Json<Prompt>, JsonRejection>) -> ApiResult<impl IntoResponse> {
    let Json(prompt) = body?;
    Ok((StatusCode::CREATED, Json(s.add_prompt(prompt)?)))
}

async fn get_prompt(State(s): Shared, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(s.prompt(&id)?))
}

async fn create_essay(State(s): Shared, body: Result<Json<NewEssay>, JsonRejection>) -> ApiResult<impl IntoResponse> {
    let Json(req) = body?;
    Ok((StatusCode::CREATED, Json(s.create_essay(req)?)))
}

async fn get_essay(State(s): Shared, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(s.essay(&id)?))
}

#[derive(Deserialize)]
struct CheckRequest {
    text: String,
}

async fn check(
    State(s): Shared,
    Path(id): Path<String>,
    body: Result<Json<CheckRequest>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let Json(req) = body?;
    // Remote backends block, and the pipeline itself is CPU-bound.
    let submission = tokio::task::spawn_blocking(move || s.check_submission(&id, &req.text))
        .await
        .map_err(|e| ApiError::from(ServiceError::Internal(e.to_string())))??;
    Ok((StatusCode::CREATED, Json(submission)))
}

async fn submissions(State(s): Shared, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(s.submissions(&id)?))
}

async fn submission(State(s): Shared, Path((id, rev)): Path<(String, u32)>) -> ApiResult<impl IntoResponse> {
    Ok(Json(s.submission(&id, rev)?))
}

async fn progress(State(s): Shared, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(s.progress(&id)?))
}

#[derive(Deserialize)]
struct DiffQuery {
    from: u32,
    to: u32,
}

async fn diff(
    State(s): Shared,
    Path(id): Path<String>,
    query: Result<Query<DiffQuery>, QueryRejection>,
) -> ApiResult<impl IntoResponse> {
    let Query(q) = query?;
    Ok(Json(s.diff_revisions(&id, q.from, q.to)?))
}

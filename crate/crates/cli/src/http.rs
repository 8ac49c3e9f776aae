//! Read-only HTTP service over one loaded snapshot.
//!
//! | method | path      | body                   | success                 |
//! |--------|-----------|------------------------|-------------------------|
//! | POST   | `/query`  | `{"cypher": "..."}`    | result table JSON       |
//! | POST   | `/ask`    | `{"question": "..."}`  | answer report JSON      |
//! | GET    | `/schema` |                        | catalog JSON            |
//! | GET    | `/health` |                        | `{"status", "nodes", "edges"}` |
//!
//! Errors carry `{"error", "kind"}` and, for query syntax errors, a
//! `position`. User errors are 400, backend timeouts 504, the rest 500.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::Value;
use tokio::net::TcpListener;

use crate::app::{App, AppError};

#[derive(Deserialize)]
pub struct QueryRequest {
    pub cypher: String,
}

#[derive(Deserialize)]
pub struct AskRequest {
    pub question: String,
}

impl IntoResponse for AppError {
    fn into_response(self) -> Response {
        let status = match self {
            AppError::User { .. } => StatusCode::BAD_REQUEST,
            AppError::Timeout(_) => StatusCode::GATEWAY_TIMEOUT,
            AppError::System(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(self.to_json())).into_response()
    }
}

fn bad_body(r: JsonRejection) -> AppError {
    AppError::User {
        message: r.body_text(),
        position: None,
    }
}

// Query execution and the external backend both block, so they run off the
// async workers.
async fn blocking<F>(app: Arc<App>, f: F) -> Result<Json<Value>, AppError>
where
    F: FnOnce(&App) -> Result<Value, AppError> + Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&app))
        .await
        .map_err(AppError::system)?
        .map(Json)
}

async fn query(
    State(app): State<Arc<App>>,
    body: Result<Json<QueryRequest>, JsonRejection>,
) -> Result<Json<Value>, AppError> {
    let Json(req) = body.map_err(bad_body)?;
    blocking(app, move |a| a.query_json(&req.cypher)).await
}

async fn ask(
    State(app): State<Arc<App>>,
    body: Result<Json<AskRequest>, JsonRejection>,
) -> Result<Json<Value>, AppError> {
    let Json(req) = body.map_err(bad_body)?;
    blocking(app, move |a| a.ask_json(&req.question)).await
}

async fn schema(State(app): State<Arc<App>>) -> Json<Value> {
    Json(app.schema_json())
}

async fn health(State(app): State<Arc<App>>) -> Json<Value> {
    Json(app.health_json())
}

pub fn router(app: Arc<App>) -> Router {
    Router::new()
        .route("/query", post(query))
        .route("/ask", post(ask))
        .route("/schema", get(schema))
        .route("/health", get(health))
        .with_state(app)
}

pub async fn serve(app: Arc<App>, listener: TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router(app)).await
}

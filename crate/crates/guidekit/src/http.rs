//! JSON-over-HTTP front end for [`ShareService`].

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;

use crate::service::{ApiError, ShareService};

type Shared = State<Arc<ShareService>>;

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

fn json<T: Serialize>(result: Result<T, ApiError>) -> Response {
    match result {
        Ok(v) => Json(v).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn blocking<T, F>(svc: Arc<ShareService>, f: F) -> Result<T, ApiError>
where
    F: FnOnce(&ShareService) -> Result<T, ApiError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&svc)).await.unwrap_or_else(|e| {
        Err(ApiError {
            status: 500,
            code: "internal",
            message: e.to_string(),
        })
    })
}

async fn upload_tutorial(State(svc): Shared, body: Bytes) -> Response {
    json(blocking(svc, move |s| s.upload_tutorial(&body)).await)
}

async fn list_tutorials(State(svc): Shared) -> Response {
    json(blocking(svc, |s| s.list_tutorials()).await)
}

async fn fetch_tutorial(State(svc): Shared, Path(id): Path<String>) -> Response {
    json(blocking(svc, move |s| s.fetch_tutorial(&id)).await)
}

async fn fetch_asset(State(svc): Shared, Path((id, path)): Path<(String, String)>) -> Response {
    match blocking(svc, move |s| Ok(s.store().fetch_asset(&id, &path)?)).await {
        Ok(bytes) => ([(header::CONTENT_TYPE, "application/octet-stream")], bytes).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn export_bundle(State(svc): Shared, Path(id): Path<String>) -> Response {
    match blocking(svc, move |s| Ok(s.store().export_bundle(&id)?)).await {
        Ok(bytes) => ([(header::CONTENT_TYPE, "application/zip")], bytes).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn import_bundle(State(svc): Shared, body: Bytes) -> Response {
    json(blocking(svc, move |s| Ok(s.store().import_bundle(&body)?)).await)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct AppCreated {
    app_id: String,
}

async fn upload_app(State(svc): Shared, body: Bytes) -> Response {
    json(blocking(svc, move |s| s.upload_app(&body).map(|app_id| AppCreated { app_id })).await)
}

async fn list_apps(State(svc): Shared) -> Response {
    json(blocking(svc, |s| Ok(s.store().list_apps()?)).await)
}

async fn get_app(State(svc): Shared, Path(id): Path<String>) -> Response {
    json(blocking(svc, move |s| Ok(s.store().load_app(&id)?)).await)
}

async fn create_session(State(svc): Shared, body: Bytes) -> Response {
    json(blocking(svc, move |s| s.create_remote_session(&body)).await)
}

async fn post_event(State(svc): Shared, Path(id): Path<String>, body: Bytes) -> Response {
    json(blocking(svc, move |s| s.post_remote_event(&id, &body)).await)
}

async fn get_session(State(svc): Shared, Path(id): Path<String>) -> Response {
    json(blocking(svc, move |s| s.get_remote_state(&id)).await)
}

async fn close_session(State(svc): Shared, Path(id): Path<String>) -> Response {
    match blocking(svc, move |s| s.close_remote_session(&id)).await {
        Ok(()) => StatusCode::NO_CONTENT.into_response(),
        Err(e) => e.into_response(),
    }
}

async fn fallback() -> Response {
    ApiError::not_found("no such route").into_response()
}

pub fn router(service: Arc<ShareService>) -> Router {
    Router::new()
        .route("/tutorials", post(upload_tutorial).get(list_tutorials))
        .route("/tutorials/bundle", post(import_bundle))
        .route("/tutorials/{id}", get(fetch_tutorial))
        .route("/tutorials/{id}/bundle", get(export_bundle))
        .route("/tutorials/{id}/assets/{*path}", get(fetch_asset))
        .route("/apps", post(upload_app).get(list_apps))
        .route("/apps/{id}", get(get_app))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).delete(close_session))
        .route("/sessions/{id}/events", post(post_event))
        .fallback(fallback)
        .with_state(service)
}

/// Binds `addr` and serves until the process is interrupted.
pub async fn serve(addr: SocketAddr, service: Arc<ShareService>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(service))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

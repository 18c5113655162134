//! HTTP transport for [`Service`].

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::any;
use axum::Router;
use tower_http::services::ServeDir;

use crate::service::Service;

async fn api(State(service): State<Arc<Service>>, method: Method, uri: Uri, body: Bytes) -> Response {
    let target = uri.path_and_query().map_or(uri.path(), |pq| pq.as_str()).to_string();
    let r = service.handle_request(method.as_str(), &target, &body);
    let status = StatusCode::from_u16(r.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, [(header::CONTENT_TYPE, "application/json")], r.body.to_string()).into_response()
}

pub fn router(service: Arc<Service>, static_dir: Option<PathBuf>) -> Router {
    let app = Router::new()
        .route("/api", any(api))
        .route("/api/{*rest}", any(api))
        .with_state(service);
    match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    }
}

/// Serve on an already bound listener until the task is dropped.
pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app).await
}

/// Block serving `kb_path` on 127.0.0.1:`port`.
pub fn run(kb_path: &Path, port: u16, static_dir: Option<PathBuf>) -> Result<(), String> {
    let service = Arc::new(Service::open(kb_path)?);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    runtime.block_on(async move {
        let addr = SocketAddr::from(([127, 0, 0, 1], port));
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| format!("{addr}: {e}"))?;
        eprintln!("serving {} on http://{addr}/api", kb_path.display());
        serve(listener, router(service, static_dir)).await.map_err(|e| e.to_string())
    })
}

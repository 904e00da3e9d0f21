//! Stateless JSON service over the shared request handler.

use axum::body::Bytes;
use axum::extract::DefaultBodyLimit;
use axum::http::{header, HeaderValue, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;

use crate::api::{self, Failure, Reply, Status};

/// Large enough for approximation requests near the point limit.
const BODY_LIMIT: usize = 32 << 20;

fn reply(r: Reply) -> Response {
    let status = StatusCode::from_u16(r.status.http()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, [(header::CONTENT_TYPE, r.content_type)], r.body).into_response()
}

async fn dispatch(route: &'static str, body: Bytes) -> Response {
    // handlers are CPU bound; keep them off the reactor threads
    match tokio::task::spawn_blocking(move || api::handle(route, &body)).await {
        Ok(r) => reply(r),
        Err(e) => reply(Reply {
            status: Status::Numeric,
            content_type: "application/json",
            body: Failure {
                status: Status::Numeric,
                body: api::ErrorBody {
                    error: format!("handler failed: {e}"),
                    location: None,
                    rule: Some("internal".into()),
                },
            }
            .to_json(),
        }),
    }
}

async fn fallback(method: Method, uri: Uri) -> Response {
    if method == Method::OPTIONS {
        return StatusCode::NO_CONTENT.into_response();
    }
    reply(api::handle(uri.path(), b""))
}

/// Browser clients are served from a different origin.
async fn allow_any_origin(mut res: Response) -> Response {
    let h = res.headers_mut();
    h.insert(header::ACCESS_CONTROL_ALLOW_ORIGIN, HeaderValue::from_static("*"));
    h.insert(
        header::ACCESS_CONTROL_ALLOW_METHODS,
        HeaderValue::from_static("GET, POST, OPTIONS"),
    );
    h.insert(
        header::ACCESS_CONTROL_ALLOW_HEADERS,
        HeaderValue::from_static("content-type"),
    );
    res
}

pub fn router() -> Router {
    let mut r = Router::new().route("/api/health", get(|| async { "ok" }));
    for route in api::ROUTES {
        r = r.route(
            route,
            post(move |body: Bytes| dispatch(route, body)).options(|| async { StatusCode::NO_CONTENT }),
        );
    }
    r.fallback(fallback)
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .layer(axum::middleware::map_response(allow_any_origin))
}

pub async fn bind(host: &str, port: u16) -> std::io::Result<TcpListener> {
    TcpListener::bind((host, port)).await
}

pub async fn serve(listener: TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router()).await
}

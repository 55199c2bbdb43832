//! HTTP server speaking the chunk translation protocol, backed by any
//! [`TranslationBackend`]. Used by `serve-mock` and by conformance tests.

use std::net::{SocketAddr, TcpListener};
use std::sync::atomic::{AtomicU32, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tokio::sync::oneshot;

use super::backend::TranslationBackend;

/// Deliberate misbehaviour, for exercising client error handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Answer 200 but omit the last translation of every batch.
    DropLast,
    /// Answer every translate request with this status.
    Status(u16),
    /// Answer the first `n` translate requests with 503, then behave.
    FailFirst(u32),
}

impl std::str::FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("unknown fault {s:?} (expected drop-last, status:N or fail-first:N)");
        match s.split_once(':') {
            None if s == "drop-last" => Ok(Fault::DropLast),
            Some(("status", n)) => n.parse().map(Fault::Status).map_err(|_| bad()),
            Some(("fail-first", n)) => n.parse().map(Fault::FailFirst).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ServerOptions {
    pub fault: Option<Fault>,
}

struct AppState {
    backend: Arc<dyn TranslationBackend>,
    options: ServerOptions,
    requests: AtomicUsize,
    failures_left: AtomicU32,
}

#[derive(Deserialize)]
struct Request {
    chunks: Vec<String>,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

async fn translate(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    state.requests.fetch_add(1, Ordering::SeqCst);
    let req: Request = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    match state.options.fault {
        Some(Fault::Status(code)) => {
            let status = StatusCode::from_u16(code).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
            return error(status, "injected failure");
        }
        Some(Fault::FailFirst(_)) => {
            let left = state
                .failures_left
                .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| n.checked_sub(1));
            if left.is_ok() {
                return error(StatusCode::SERVICE_UNAVAILABLE, "injected failure");
            }
        }
        _ => {}
    }
    match state.backend.translate_chunks(&req.chunks) {
        Ok(mut translations) => {
            if state.options.fault == Some(Fault::DropLast) {
                translations.pop();
            }
            Json(json!({ "translations": translations })).into_response()
        }
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/translate", post(translate))
        .route("/health", get(health))
        .with_state(state)
}

fn state(backend: Arc<dyn TranslationBackend>, options: ServerOptions) -> Arc<AppState> {
    let failures = match options.fault {
        Some(Fault::FailFirst(n)) => n,
        _ => 0,
    };
    Arc::new(AppState {
        backend,
        options,
        requests: AtomicUsize::new(0),
        failures_left: AtomicU32::new(failures),
    })
}

fn runtime() -> std::io::Result<tokio::runtime::Runtime> {
    tokio::runtime::Builder::new_current_thread().enable_all().build()
}

/// Serves on `listener` until the process exits.
pub fn serve_forever(
    listener: TcpListener,
    backend: Arc<dyn TranslationBackend>,
    options: ServerOptions,
) -> std::io::Result<()> {
    listener.set_nonblocking(true)?;
    let app = router(state(backend, options));
    runtime()?.block_on(async move {
        let listener = tokio::net::TcpListener::from_std(listener)?;
        axum::serve(listener, app).await
    })
}

/// A server running on a background thread; stops when dropped.
pub struct ServerHandle {
    addr: SocketAddr,
    state: Arc<AppState>,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<std::io::Result<()>>>,
}

impl ServerHandle {
    /// Binds `addr` (use port 0 for an ephemeral port) and starts serving.
    pub fn spawn(
        addr: &str,
        backend: Arc<dyn TranslationBackend>,
        options: ServerOptions,
    ) -> std::io::Result<ServerHandle> {
        let listener = TcpListener::bind(addr)?;
        listener.set_nonblocking(true)?;
        let local = listener.local_addr()?;
        let state = state(backend, options);
        let app = router(state.clone());
        let (tx, rx) = oneshot::channel::<()>();
        let thread = std::thread::spawn(move || {
            runtime()?.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener)?;
                axum::serve(listener, app)
                    .with_graceful_shutdown(async {
                        let _ = rx.await;
                    })
                    .await
            })
        });
        Ok(ServerHandle { addr: local, state, shutdown: Some(tx), thread: Some(thread) })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Translate requests received so far, including rejected ones.
    pub fn request_count(&self) -> usize {
        self.state.requests.load(Ordering::SeqCst)
    }

    pub fn stop(mut self) -> std::io::Result<()> {
        self.shutdown_inner()
    }

    fn shutdown_inner(&mut self) -> std::io::Result<()> {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        match self.thread.take() {
            Some(t) => t.join().unwrap_or_else(|_| Err(std::io::Error::other("server thread panicked"))),
            None => Ok(()),
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        let _ = self.shutdown_inner();
    }
}

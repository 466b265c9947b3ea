//! HTTP service over a directory of model documents.
//!
//! Mutations go through [`Store`], which serializes them per model, checks
//! the client's `base_revision` and writes the document atomically before
//! answering.

mod api;
pub mod store;

use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use axum::response::Html;
use axum::Router;
use tower_http::services::{ServeDir, ServeFile};

pub use store::{Fault, ModelSummary, Store, StoreError};

pub const DEFAULT_PORT: u16 = 7341;
pub const DEFAULT_STORE: &str = "./models";

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub bind: IpAddr,
    pub port: u16,
    pub store: PathBuf,
    /// Directory holding the web UI bundle; a placeholder page is served
    /// when absent.
    pub ui: Option<PathBuf>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            bind: IpAddr::V4(Ipv4Addr::LOCALHOST),
            port: DEFAULT_PORT,
            store: PathBuf::from(DEFAULT_STORE),
            ui: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServerError {
    #[error("cannot open store: {0}")]
    Store(#[from] StoreError),
    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        source: std::io::Error,
    },
    #[error("server failed: {0}")]
    Io(#[from] std::io::Error),
}

const PLACEHOLDER: &str = "<!doctype html>
<html><head><meta charset=\"utf-8\"><title>QualiBD</title></head>
<body>
<h1>QualiBD</h1>
<p>No web UI bundle is configured. The JSON API is available under <code>/api</code>:
<a href=\"/api/models\">/api/models</a>, <a href=\"/api/metamodel\">/api/metamodel</a>.</p>
</body></html>
";

/// The full application: JSON API plus static files.
pub fn app(store: Arc<Store>, ui: Option<PathBuf>) -> Router {
    let api = api::routes(store);
    match ui {
        Some(dir) => {
            let index = dir.join("index.html");
            api.fallback_service(ServeDir::new(dir).fallback(ServeFile::new(index)))
        }
        None => api.fallback(|| async { Html(PLACEHOLDER) }),
    }
}

/// Opens the store, binds and serves until interrupted. The bound address
/// is printed on stdout once the listener is ready.
pub async fn serve(config: ServerConfig) -> Result<(), ServerError> {
    let store = Arc::new(Store::open(&config.store)?);
    let addr = SocketAddr::new(config.bind, config.port);
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| ServerError::Bind { addr, source })?;
    let local = listener.local_addr()?;
    println!("listening on http://{local}");
    log::info!("serving store {} on {local}", config.store.display());
    axum::serve(listener, app(store, config.ui))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

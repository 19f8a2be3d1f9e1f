//! HTTP/JSON API over feasibility consultations.
//!
//! Sessions are stored one file per session (see [`store`]) and exposed
//! through the routes in [`api`]. The knowledge base is loaded once and
//! shared read-only by every request.

pub mod api;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use feaso_core::kb::KnowledgeBase;

pub use api::{router, ApiError};
pub use store::{SessionStore, StoreError};

/// Server settings.
#[derive(Debug, Clone)]
pub struct Config {
    pub store: PathBuf,
    pub listen: SocketAddr,
}

/// Serves the API until interrupted.
pub async fn serve(kb: Arc<KnowledgeBase>, config: Config) -> anyhow::Result<()> {
    let store = SessionStore::open(&config.store, kb)
        .with_context(|| format!("cannot open session store {}", config.store.display()))?;
    let app = router(Arc::new(store));
    let listener = tokio::net::TcpListener::bind(config.listen)
        .await
        .with_context(|| format!("cannot listen on {}", config.listen))?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

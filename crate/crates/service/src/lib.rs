//! HTTP front end for Deck-of-Cards elicitation sessions and stateless
//! computations over interval preference relations.
//!
//! Session mutations are optimistic: clients send the revision they last saw
//! in `If-Match` and receive the new one in `ETag` (and in the session
//! document). A stale revision gets `409 Conflict`.

pub mod compute;
pub mod error;
mod http;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use tokio::net::TcpListener;

pub use error::{Result, ServiceError};
pub use http::router;
pub use store::SessionStore;

pub const ADDR_ENV: &str = "IVALUE_ADDR";
pub const LOG_ENV: &str = "IVALUE_LOG";
pub const DEFAULT_ADDR: &str = "127.0.0.1:8080";
pub const DEFAULT_LOG: &str = "./sessions.log";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub addr: SocketAddr,
    pub log: PathBuf,
}

/// A bound listener with its replayed store, ready to serve.
pub struct Server {
    listener: TcpListener,
    store: Arc<SessionStore>,
}

impl Server {
    pub async fn bind(config: &Config) -> Result<Server> {
        let store = Arc::new(SessionStore::open(&config.log)?);
        let listener = TcpListener::bind(config.addr).await?;
        Ok(Server { listener, store })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.listener.local_addr().expect("bound listener has an address")
    }

    pub fn store(&self) -> Arc<SessionStore> {
        self.store.clone()
    }

    pub async fn run_until(self, shutdown: impl std::future::Future<Output = ()> + Send + 'static) -> Result<()> {
        log::info!("listening on {}", self.local_addr());
        axum::serve(self.listener, router(self.store))
            .with_graceful_shutdown(shutdown)
            .await?;
        Ok(())
    }

    /// Serves until Ctrl-C.
    pub async fn run(self) -> Result<()> {
        self.run_until(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
    }
}

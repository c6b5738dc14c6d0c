//! JSON-over-HTTP facade for a [`DiscoveryEngine`].
//!
//! One engine is loaded at a time. Reads clone the current `Arc` and never
//! block a rebuild; `POST /index` swaps in the new engine when its build
//! completes, and only one build may run at once.

mod error;
mod routes;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use warpgate_core::{DiscoveryEngine, IndexManifest};

pub use error::ApiError;
pub use routes::router;

/// Environment variable holding the default bind address.
pub const ADDR_ENV: &str = "WARPGATE_ADDR";
pub const DEFAULT_ADDR: &str = "127.0.0.1:8080";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobState {
    Running,
    Done,
    Failed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildJob {
    pub id: u64,
    pub state: JobState,
    pub manifest: Option<IndexManifest>,
    pub error: Option<ApiError>,
}

#[derive(Debug)]
pub struct AppState {
    engine: RwLock<Arc<DiscoveryEngine>>,
    build_guard: Arc<tokio::sync::Mutex<()>>,
    jobs: Mutex<HashMap<u64, BuildJob>>,
    next_job: AtomicU64,
    sync_wait: Duration,
}

impl AppState {
    pub fn new(engine: DiscoveryEngine) -> Self {
        Self {
            engine: RwLock::new(Arc::new(engine)),
            build_guard: Arc::new(tokio::sync::Mutex::new(())),
            jobs: Mutex::new(HashMap::new()),
            next_job: AtomicU64::new(1),
            sync_wait: Duration::from_secs(2),
        }
    }

    /// How long `POST /index` waits before answering 202 with a job id.
    pub fn with_sync_wait(mut self, wait: Duration) -> Self {
        self.sync_wait = wait;
        self
    }

    pub fn engine(&self) -> Arc<DiscoveryEngine> {
        self.engine.read().expect("engine lock poisoned").clone()
    }

    fn replace_engine(&self, engine: DiscoveryEngine) {
        *self.engine.write().expect("engine lock poisoned") = Arc::new(engine);
    }

    fn new_job(&self) -> u64 {
        let id = self.next_job.fetch_add(1, Ordering::Relaxed);
        self.set_job(BuildJob {
            id,
            state: JobState::Running,
            manifest: None,
            error: None,
        });
        id
    }

    fn set_job(&self, job: BuildJob) {
        self.jobs.lock().expect("jobs lock poisoned").insert(job.id, job);
    }

    fn job(&self, id: u64) -> Option<BuildJob> {
        self.jobs.lock().expect("jobs lock poisoned").get(&id).cloned()
    }
}

/// Bind address from `WARPGATE_ADDR`, falling back to [`DEFAULT_ADDR`].
pub fn default_addr() -> String {
    std::env::var(ADDR_ENV).unwrap_or_else(|_| DEFAULT_ADDR.to_string())
}

/// Serve until Ctrl-C.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

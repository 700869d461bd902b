use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use ureq::Agent;

/// Largest response body accepted; the biggest 10-K submissions with
/// embedded exhibits run to a few hundred megabytes.
const MAX_BODY_BYTES: u64 = 512 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    #[error("request timed out")]
    Timeout,
    #[error("connection failed: {0}")]
    Connect(String),
}

/// A blocking GET. Non-2xx statuses are responses, not errors.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str, user_agent: &str) -> Result<HttpResponse, TransportError>;
}

/// Live HTTP transport.
pub struct UreqTransport {
    agent: Agent,
}

impl UreqTransport {
    pub fn new(timeout: Duration) -> Self {
        let agent: Agent = Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        UreqTransport { agent }
    }
}

impl Default for UreqTransport {
    fn default() -> Self {
        UreqTransport::new(Duration::from_secs(60))
    }
}

impl Transport for UreqTransport {
    fn get(&self, url: &str, user_agent: &str) -> Result<HttpResponse, TransportError> {
        let mut response = self
            .agent
            .get(url)
            .header("User-Agent", user_agent)
            .header("Accept-Encoding", "identity")
            .call()
            .map_err(map_ureq_error)?;
        let status = response.status().as_u16();
        let body = response
            .body_mut()
            .with_config()
            .limit(MAX_BODY_BYTES)
            .read_to_vec()
            .map_err(map_ureq_error)?;
        Ok(HttpResponse { status, body })
    }
}

fn map_ureq_error(err: ureq::Error) -> TransportError {
    match err {
        ureq::Error::Timeout(_) => TransportError::Timeout,
        other => TransportError::Connect(other.to_string()),
    }
}

/// Serves requests from a directory laid out like the archive, so that
/// `{base}/edgar/data/1/x.txt` is read from `{root}/edgar/data/1/x.txt`.
/// Missing files answer 404. Used for offline runs and tests.
#[derive(Debug)]
pub struct ReplayTransport {
    root: PathBuf,
    base_url: String,
    requests: AtomicUsize,
}

impl ReplayTransport {
    pub fn new(root: impl Into<PathBuf>, base_url: &str) -> Self {
        ReplayTransport {
            root: root.into(),
            base_url: base_url.trim_end_matches('/').to_string(),
            requests: AtomicUsize::new(0),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Number of requests served so far, hits and misses alike.
    pub fn requests(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }
}

impl Transport for ReplayTransport {
    fn get(&self, url: &str, _user_agent: &str) -> Result<HttpResponse, TransportError> {
        self.requests.fetch_add(1, Ordering::SeqCst);
        let Some(rel) = url.strip_prefix(&self.base_url) else {
            return Err(TransportError::Connect(format!("{url} is not under {}", self.base_url)));
        };
        let rel = rel.trim_start_matches('/');
        if rel.split('/').any(|seg| seg == "..") {
            return Ok(HttpResponse { status: 403, body: Vec::new() });
        }
        match std::fs::read(self.root.join(rel)) {
            Ok(body) => Ok(HttpResponse { status: 200, body }),
            Err(_) => Ok(HttpResponse { status: 404, body: Vec::new() }),
        }
    }
}

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::backend::{BackendError, TranslationBackend};

/// Where and how to reach a chunk translation server.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendEndpoint {
    pub base_url: String,
    pub timeout: Duration,
    pub max_batch: usize,
    pub retries: u32,
    /// First retry delay; doubles on every further attempt.
    pub backoff: Duration,
}

pub const DEFAULT_TIMEOUT_MS: u64 = 30_000;
pub const DEFAULT_MAX_BATCH: usize = 16;
pub const DEFAULT_RETRIES: u32 = 3;
pub const DEFAULT_BACKOFF_MS: u64 = 100;

impl BackendEndpoint {
    pub fn new(base_url: impl Into<String>) -> Self {
        BackendEndpoint {
            base_url: base_url.into(),
            timeout: Duration::from_millis(DEFAULT_TIMEOUT_MS),
            max_batch: DEFAULT_MAX_BATCH,
            retries: DEFAULT_RETRIES,
            backoff: Duration::from_millis(DEFAULT_BACKOFF_MS),
        }
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        if self.timeout.is_zero() {
            return Err(BackendError::Endpoint("timeout must be positive".into()));
        }
        if self.max_batch == 0 {
            return Err(BackendError::Endpoint("max_batch must be at least 1".into()));
        }
        let url = self.base_url.trim();
        if !(url.starts_with("http://") || url.starts_with("https://")) {
            return Err(BackendError::Endpoint(format!("{url:?} is not an http(s) URL")));
        }
        Ok(())
    }

    fn url(&self, path: &str) -> String {
        format!("{}/{path}", self.base_url.trim().trim_end_matches('/'))
    }
}

#[derive(Serialize)]
pub(crate) struct TranslateRequest<'a> {
    pub chunks: &'a [String],
}

#[derive(Deserialize)]
pub(crate) struct TranslateResponse {
    pub translations: Vec<String>,
}

/// HTTP client for the `/translate` protocol.
///
/// Chunks are sent in batches of at most `max_batch`. A batch that fails with
/// a retriable error is re-sent up to `retries` times with exponential
/// backoff. Responses are stitched back together in input order.
pub struct RemoteBackend {
    endpoint: BackendEndpoint,
    agent: ureq::Agent,
}

impl RemoteBackend {
    pub fn new(endpoint: BackendEndpoint) -> Result<Self, BackendError> {
        endpoint.validate()?;
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(endpoint.timeout))
            .http_status_as_error(false)
            .build()
            .new_agent();
        Ok(RemoteBackend { endpoint, agent })
    }

    pub fn endpoint(&self) -> &BackendEndpoint {
        &self.endpoint
    }

    /// `GET /health`, expecting `{"status": "ok"}`.
    pub fn health(&self) -> Result<(), BackendError> {
        let mut resp = self
            .agent
            .get(&self.endpoint.url("health"))
            .call()
            .map_err(|e| transport_error(0, e))?;
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_to_string().map_err(|e| transport_error(0, e))?;
        if status != 200 {
            return Err(BackendError::Status { batch: 0, status, body });
        }
        let v: serde_json::Value = serde_json::from_str(&body)
            .map_err(|e| BackendError::Protocol { batch: 0, reason: e.to_string() })?;
        if v.get("status").and_then(|s| s.as_str()) != Some("ok") {
            return Err(BackendError::Protocol { batch: 0, reason: format!("unexpected health body {body}") });
        }
        Ok(())
    }

    fn send_batch(&self, batch: usize, chunks: &[String]) -> Result<Vec<String>, BackendError> {
        let mut resp = self
            .agent
            .post(&self.endpoint.url("translate"))
            .send_json(TranslateRequest { chunks })
            .map_err(|e| transport_error(batch, e))?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| transport_error(batch, e))?;
        if status != 200 {
            return Err(BackendError::Status { batch, status, body });
        }
        let parsed: TranslateResponse = serde_json::from_str(&body)
            .map_err(|e| BackendError::Protocol { batch, reason: format!("invalid response body: {e}") })?;
        if parsed.translations.len() != chunks.len() {
            return Err(BackendError::Protocol {
                batch,
                reason: format!("sent {} chunks, received {} translations", chunks.len(), parsed.translations.len()),
            });
        }
        Ok(parsed.translations)
    }

    fn send_with_retry(&self, batch: usize, chunks: &[String]) -> Result<Vec<String>, BackendError> {
        let mut attempt = 0u32;
        loop {
            match self.send_batch(batch, chunks) {
                Ok(out) => return Ok(out),
                Err(e) if !e.is_retriable() => return Err(e),
                Err(e) if attempt >= self.endpoint.retries => {
                    return Err(BackendError::Exhausted { batch, attempts: attempt + 1, last: Box::new(e) })
                }
                Err(e) => {
                    let delay = self.endpoint.backoff.saturating_mul(1 << attempt.min(16));
                    log::warn!("batch {batch} attempt {} failed ({e}); retrying in {delay:?}", attempt + 1);
                    std::thread::sleep(delay);
                    attempt += 1;
                }
            }
        }
    }
}

fn transport_error(batch: usize, e: ureq::Error) -> BackendError {
    match e {
        ureq::Error::Timeout(_) => BackendError::Timeout { batch },
        ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::TimedOut => BackendError::Timeout { batch },
        other => BackendError::Transport { batch, message: other.to_string() },
    }
}

impl TranslationBackend for RemoteBackend {
    fn translate_chunks(&self, chunks: &[String]) -> Result<Vec<String>, BackendError> {
        let mut out = Vec::with_capacity(chunks.len());
        for (batch, group) in chunks.chunks(self.endpoint.max_batch).enumerate() {
            out.extend(self.send_with_retry(batch, group)?);
        }
        Ok(out)
    }
}

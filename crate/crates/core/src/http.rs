//! Minimal JSON-over-HTTP plumbing shared by the remote embedding and chat
//! providers: a transport trait (so tests can count and fail calls) and an
//! exponential-backoff retry loop.

use std::time::Duration;

use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    /// Connection problems, timeouts, 429 and 5xx responses.
    #[error("retryable transport failure: {0}")]
    Retryable(String),
    #[error("transport failure: {0}")]
    Fatal(String),
}

/// POSTs a JSON body and returns the parsed JSON response.
pub trait HttpTransport: Send + Sync {
    fn post_json(&self, url: &str, api_key: Option<&str>, body: &Value) -> Result<Value, TransportError>;
}

/// Blocking HTTP transport backed by `ureq`.
#[derive(Debug, Clone)]
pub struct UreqTransport {
    agent: ureq::Agent,
}

impl UreqTransport {
    pub fn new(timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        Self { agent }
    }
}

impl Default for UreqTransport {
    fn default() -> Self {
        Self::new(Duration::from_secs(120))
    }
}

impl HttpTransport for UreqTransport {
    fn post_json(&self, url: &str, api_key: Option<&str>, body: &Value) -> Result<Value, TransportError> {
        let mut req = self.agent.post(url);
        if let Some(key) = api_key {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        match req.send_json(body) {
            Ok(mut resp) => resp
                .body_mut()
                .read_json::<Value>()
                .map_err(|e| TransportError::Fatal(format!("invalid JSON response: {e}"))),
            Err(ureq::Error::StatusCode(code)) if code == 429 || code >= 500 => {
                Err(TransportError::Retryable(format!("HTTP {code}")))
            }
            Err(ureq::Error::StatusCode(code)) => Err(TransportError::Fatal(format!("HTTP {code}"))),
            Err(e) => Err(TransportError::Retryable(e.to_string())),
        }
    }
}

/// Exponential backoff: waits `base`, `base·factor`, ... between attempts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Backoff {
    pub base: Duration,
    pub factor: u32,
    pub max_attempts: u32,
}

impl Default for Backoff {
    fn default() -> Self {
        Self {
            base: Duration::from_secs(1),
            factor: 2,
            max_attempts: 5,
        }
    }
}

impl Backoff {
    /// No waiting between attempts; for tests.
    pub fn immediate(max_attempts: u32) -> Self {
        Self {
            base: Duration::ZERO,
            factor: 2,
            max_attempts,
        }
    }

    pub fn delay_before(&self, attempt: u32) -> Duration {
        // attempt 1 runs immediately, attempt 2 after `base`, ...
        if attempt <= 1 {
            return Duration::ZERO;
        }
        self.base * self.factor.saturating_pow(attempt - 2)
    }

    /// Runs `op` until it succeeds, fails fatally, or attempts run out.
    /// Returns the last error and the number of attempts made.
    pub fn retry<T>(&self, mut op: impl FnMut() -> Result<T, TransportError>) -> Result<T, (TransportError, u32)> {
        let attempts = self.max_attempts.max(1);
        let mut last = None;
        for attempt in 1..=attempts {
            let wait = self.delay_before(attempt);
            if !wait.is_zero() {
                std::thread::sleep(wait);
            }
            match op() {
                Ok(v) => return Ok(v),
                Err(e @ TransportError::Fatal(_)) => return Err((e, attempt)),
                Err(e) => {
                    log::warn!("attempt {attempt}/{attempts} failed: {e}");
                    last = Some(e);
                }
            }
        }
        Err((last.expect("at least one attempt"), attempts))
    }
}

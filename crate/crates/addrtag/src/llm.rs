//! Chat-completion client for template augmentation.
//!
//! Wire format: `POST {endpoint}` with a JSON body `{"model", "messages",
//! "temperature"}`; the reply is read from `choices[0].message.content`.
//! Transports are pluggable so tests and offline runs can serve recorded
//! responses from disk.

use std::fmt;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use addrtag_core::augment::{parse_response, user_prompt, AugmentResult, MAX_TEMPLATES_PER_REQUEST, SYSTEM_PROMPT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ENDPOINT_ENV: &str = "ADDRTAG_LLM_ENDPOINT";
pub const API_KEY_ENV: &str = "ADDRTAG_LLM_API_KEY";
pub const MODEL_ENV: &str = "ADDRTAG_LLM_MODEL";

pub const DEFAULT_CONCURRENCY: usize = 4;
pub const MAX_RETRIES: u32 = 3;

#[derive(Clone)]
pub struct AugmentRequest {
    pub pattern_description: String,
    pub num_templates: usize,
    pub model_name: String,
    pub endpoint: String,
    pub api_key: String,
}

impl fmt::Debug for AugmentRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AugmentRequest")
            .field("pattern_description", &self.pattern_description)
            .field("num_templates", &self.num_templates)
            .field("model_name", &self.model_name)
            .field("endpoint", &self.endpoint)
            .field("api_key", &"<redacted>")
            .finish()
    }
}

impl AugmentRequest {
    pub fn new(
        pattern_description: impl Into<String>,
        num_templates: usize,
        model_name: impl Into<String>,
        endpoint: impl Into<String>,
        api_key: impl Into<String>,
    ) -> Result<Self> {
        if num_templates == 0 || num_templates > MAX_TEMPLATES_PER_REQUEST {
            return Err(Error::Config(format!(
                "num_templates must be in 1..={MAX_TEMPLATES_PER_REQUEST}, got {num_templates}"
            )));
        }
        Ok(AugmentRequest {
            pattern_description: pattern_description.into(),
            num_templates,
            model_name: model_name.into(),
            endpoint: endpoint.into(),
            api_key: api_key.into(),
        })
    }

    pub fn body(&self) -> ChatBody {
        ChatBody {
            model: self.model_name.clone(),
            messages: vec![
                ChatMessage { role: "system".into(), content: SYSTEM_PROMPT.into() },
                ChatMessage {
                    role: "user".into(),
                    content: user_prompt(&self.pattern_description, self.num_templates),
                },
            ],
            temperature: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatBody {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
}

/// Sends one request body and returns the raw response body.
pub trait ChatTransport: Sync {
    fn post(&self, endpoint: &str, api_key: &str, body: &str) -> Result<String>;
}

pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        HttpTransport { agent: ureq::AgentBuilder::new().timeout(timeout).build() }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        HttpTransport::new(Duration::from_secs(120))
    }
}

impl ChatTransport for HttpTransport {
    fn post(&self, endpoint: &str, api_key: &str, body: &str) -> Result<String> {
        let mut req = self.agent.post(endpoint).set("Content-Type", "application/json");
        if !api_key.is_empty() {
            req = req.set("Authorization", &format!("Bearer {api_key}"));
        }
        match req.send_string(body) {
            Ok(resp) => resp.into_string().map_err(|e| Error::Transport(e.to_string())),
            Err(ureq::Error::Status(status, resp)) => {
                Err(Error::Status { status, body: resp.into_string().unwrap_or_default() })
            }
            Err(ureq::Error::Transport(t)) => Err(Error::Transport(t.to_string())),
        }
    }
}

/// Serves recorded response bodies in order, cycling when exhausted, and
/// keeps every request body it receives.
pub struct FixtureTransport {
    responses: Vec<String>,
    next: AtomicUsize,
    requests: Mutex<Vec<String>>,
}

impl FixtureTransport {
    pub fn new(responses: Vec<String>) -> Self {
        FixtureTransport { responses, next: AtomicUsize::new(0), requests: Mutex::new(Vec::new()) }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Ok(FixtureTransport::new(vec![crate::corpus_io::read_utf8(path)?]))
    }

    /// Wrap plain text as a chat-completion response body.
    pub fn completion_body(content: &str) -> String {
        serde_json::json!({"choices": [{"index": 0, "message": {"role": "assistant", "content": content}}]})
            .to_string()
    }

    pub fn requests(&self) -> Vec<String> {
        self.requests.lock().expect("request log").clone()
    }
}

impl ChatTransport for FixtureTransport {
    fn post(&self, _endpoint: &str, _api_key: &str, body: &str) -> Result<String> {
        self.requests.lock().expect("request log").push(body.to_string());
        if self.responses.is_empty() {
            return Err(Error::Transport("no fixture responses".into()));
        }
        let i = self.next.fetch_add(1, Ordering::SeqCst) % self.responses.len();
        Ok(self.responses[i].clone())
    }
}

/// Exponential backoff: `base · 2^k` before retry `k + 1`. The sleep is
/// injectable so tests do not wait.
pub struct Backoff {
    pub max_retries: u32,
    pub base: Duration,
    pub sleep: Box<dyn Fn(Duration) + Send + Sync>,
}

impl Default for Backoff {
    fn default() -> Self {
        Backoff { max_retries: MAX_RETRIES, base: Duration::from_millis(500), sleep: Box::new(std::thread::sleep) }
    }
}

impl Backoff {
    pub fn delay(&self, retry: u32) -> Duration {
        self.base * 2u32.saturating_pow(retry)
    }
}

fn retryable(e: &Error) -> bool {
    match e {
        Error::Transport(_) => true,
        Error::Status { status, .. } => *status == 429 || *status >= 500,
        _ => false,
    }
}

/// Pull the assistant text out of a chat-completion response body.
pub fn completion_text(body: &str) -> Result<String> {
    let v: serde_json::Value = serde_json::from_str(body).map_err(|e| Error::Response(e.to_string()))?;
    v.pointer("/choices/0/message/content")
        .and_then(serde_json::Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| Error::Response("missing choices[0].message.content".into()))
}

pub struct LlmClient<T: ChatTransport> {
    pub transport: T,
    pub backoff: Backoff,
}

impl<T: ChatTransport> LlmClient<T> {
    pub fn new(transport: T) -> Self {
        LlmClient { transport, backoff: Backoff::default() }
    }

    pub fn with_backoff(transport: T, backoff: Backoff) -> Self {
        LlmClient { transport, backoff }
    }

    fn post_with_retry(&self, req: &AugmentRequest, body: &str) -> Result<String> {
        let mut retry = 0;
        loop {
            match self.transport.post(&req.endpoint, &req.api_key, body) {
                Err(e) if retryable(&e) && retry < self.backoff.max_retries => {
                    (self.backoff.sleep)(self.backoff.delay(retry));
                    retry += 1;
                }
                other => return other,
            }
        }
    }

    pub fn request_templates(&self, req: &AugmentRequest) -> Result<AugmentResult> {
        let body = serde_json::to_string(&req.body()).expect("plain request body");
        let response = self.post_with_retry(req, &body)?;
        Ok(parse_response(&completion_text(&response)?))
    }

    /// Run several requests with at most `limit` in flight; results keep
    /// the input order.
    pub fn request_many(&self, reqs: &[AugmentRequest], limit: usize) -> Vec<Result<AugmentResult>> {
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<Result<AugmentResult>>>> = reqs.iter().map(|_| Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..limit.max(1).min(reqs.len()) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    if i >= reqs.len() {
                        break;
                    }
                    let r = self.request_templates(&reqs[i]);
                    *slots[i].lock().expect("result slot") = Some(r);
                });
            }
        });
        slots.into_iter().map(|s| s.into_inner().expect("result slot").expect("every request ran")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn req() -> AugmentRequest {
        AugmentRequest::new("Street + House Number", 5, "test-model", "http://localhost:1/v1/chat", "k").unwrap()
    }

    struct Flaky {
        failures: AtomicUsize,
        status: Option<u16>,
        ok_body: String,
    }

    impl ChatTransport for Flaky {
        fn post(&self, _: &str, _: &str, _: &str) -> Result<String> {
            if self.failures.load(Ordering::SeqCst) > 0 {
                self.failures.fetch_sub(1, Ordering::SeqCst);
                return Err(match self.status {
                    Some(status) => Error::Status { status, body: String::new() },
                    None => Error::Transport("connection reset".into()),
                });
            }
            Ok(self.ok_body.clone())
        }
    }

    fn recording_backoff() -> (Backoff, Arc<Mutex<Vec<Duration>>>) {
        let log = Arc::new(Mutex::new(Vec::new()));
        let sink = Arc::clone(&log);
        let b = Backoff {
            max_retries: MAX_RETRIES,
            base: Duration::from_millis(100),
            sleep: Box::new(move |d| sink.lock().unwrap().push(d)),
        };
        (b, log)
    }

    #[test]
    fn body_has_model_and_messages() {
        let v = serde_json::to_value(req().body()).unwrap();
        assert_eq!(v["model"], "test-model");
        assert_eq!(v["messages"][0]["role"], "system");
        assert!(v["messages"][1]["content"].as_str().unwrap().contains("Street + House Number"));
        assert!(!format!("{:?}", req()).contains("\"k\""));
        assert!(AugmentRequest::new("x", 101, "m", "e", "k").is_err());
        assert!(AugmentRequest::new("x", 0, "m", "e", "k").is_err());
    }

    #[test]
    fn retries_with_doubling_delays() {
        let (b, log) = recording_backoff();
        let t = Flaky {
            failures: AtomicUsize::new(3),
            status: None,
            ok_body: FixtureTransport::completion_body("bývam na streetname housenumber"),
        };
        let r = LlmClient::with_backoff(t, b).request_templates(&req()).unwrap();
        assert_eq!(r.parsed_templates.len(), 1);
        let ms: Vec<u128> = log.lock().unwrap().iter().map(Duration::as_millis).collect();
        assert_eq!(ms, [100, 200, 400]);
    }

    #[test]
    fn gives_up_after_max_retries() {
        let (b, log) = recording_backoff();
        let t = Flaky { failures: AtomicUsize::new(10), status: Some(503), ok_body: String::new() };
        let err = LlmClient::with_backoff(t, b).request_templates(&req()).unwrap_err();
        assert!(matches!(err, Error::Status { status: 503, .. }));
        assert_eq!(log.lock().unwrap().len(), MAX_RETRIES as usize);
    }

    #[test]
    fn client_errors_are_not_retried() {
        let (b, log) = recording_backoff();
        let t = Flaky { failures: AtomicUsize::new(1), status: Some(401), ok_body: String::new() };
        assert!(matches!(LlmClient::with_backoff(t, b).request_templates(&req()), Err(Error::Status { status: 401, .. })));
        assert!(log.lock().unwrap().is_empty());
    }

    #[test]
    fn malformed_bodies() {
        assert!(matches!(completion_text("not json"), Err(Error::Response(_))));
        assert!(matches!(completion_text("{\"choices\":[]}"), Err(Error::Response(_))));
        let empty = FixtureTransport::new(vec![FixtureTransport::completion_body("")]);
        let r = LlmClient::new(empty).request_templates(&req()).unwrap();
        assert!(r.parsed_templates.is_empty() && r.rejected.is_empty());
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn concurrent_requests_keep_order() {
        let bodies: Vec<String> = ["streetname", "municipalityname", "postcode"]
            .iter()
            .map(|c| FixtureTransport::completion_body(c))
            .collect();
        let client = LlmClient::new(FixtureTransport::new(bodies));
        let reqs = vec![req(); 9];
        let out = client.request_many(&reqs, DEFAULT_CONCURRENCY);
        assert_eq!(out.len(), 9);
        assert!(out.iter().all(|r| r.as_ref().unwrap().parsed_templates.len() == 1));
        assert_eq!(client.transport.requests().len(), 9);
    }
}

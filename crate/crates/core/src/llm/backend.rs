use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::clock::{Clock, SystemClock};
use super::config::{ApiKey, BackendConfig, ConfigError};
use super::rate_limit::RateLimiter;
use super::transport::{ReqwestTransport, Transport};
use super::wire;
use crate::note_model::{coerce_note, repair_json, validate_note, StandardizedNote, ValidationReport};

pub const BACKOFF_BASE: Duration = Duration::from_secs(2);
const BACKOFF_CAP: Duration = Duration::from_secs(64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Transport,
    RateLimited,
    Unparseable,
    SchemaInvalid,
}

/// Result of one standardization request. Exactly one of `note` and `failure` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendOutcome {
    pub note: Option<StandardizedNote>,
    pub raw_response: String,
    pub attempts: u32,
    pub input_tokens: u64,
    pub output_tokens: u64,
    /// Seconds, including backoff.
    pub latency: f64,
    pub failure: Option<FailureKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Raw completion text or the reason none was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub text: Result<String, (FailureKind, String)>,
    /// Last HTTP body seen, if any.
    pub raw: String,
    pub attempts: u32,
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub latency: f64,
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("no JSON object in response")]
    Unparseable,
    #[error("response does not match the note schema ({} violations)", .0.violations.len())]
    SchemaInvalid(ValidationReport),
}

impl ParseError {
    pub fn kind(&self) -> FailureKind {
        match self {
            ParseError::Unparseable => FailureKind::Unparseable,
            ParseError::SchemaInvalid(_) => FailureKind::SchemaInvalid,
        }
    }
}

/// Repair, validate and coerce a model response into a note. Missing or null
/// leaves are filled with empty defaults; any other schema damage is rejected.
pub fn parse_response(raw: &str) -> Result<StandardizedNote, ParseError> {
    let value = repair_json(raw).map_err(|_| ParseError::Unparseable)?;
    let report = validate_note(&value);
    if report.valid {
        return serde_json::from_value(value).map_err(|_| ParseError::SchemaInvalid(report));
    }
    coerce_note(&value).map_err(|_| ParseError::SchemaInvalid(report))
}

pub fn estimate_tokens(text: &str) -> u64 {
    (text.chars().count() as u64).div_ceil(4)
}

/// Totals across all calls made by one backend.
#[derive(Debug, Default)]
pub struct UsageCounters {
    pub requests: AtomicU64,
    pub input_tokens: AtomicU64,
    pub output_tokens: AtomicU64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Usage {
    pub requests: u64,
    pub input_tokens: u64,
    pub output_tokens: u64,
}

pub struct LlmBackend {
    config: BackendConfig,
    key: Option<ApiKey>,
    transport: Arc<dyn Transport>,
    clock: Arc<dyn Clock>,
    limiter: RateLimiter,
    jitter: Mutex<ChaCha8Rng>,
    usage: UsageCounters,
}

impl std::fmt::Debug for LlmBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LlmBackend")
            .field("config", &self.config)
            .field("key", &self.key)
            .finish_non_exhaustive()
    }
}

impl LlmBackend {
    pub fn new(
        config: BackendConfig,
        key: Option<ApiKey>,
        transport: Arc<dyn Transport>,
        clock: Arc<dyn Clock>,
    ) -> Result<Self, ConfigError> {
        config.validate()?;
        Ok(Self {
            limiter: RateLimiter::new(config.requests_per_minute),
            config,
            key,
            transport,
            clock,
            jitter: Mutex::new(ChaCha8Rng::seed_from_u64(0)),
            usage: UsageCounters::default(),
        })
    }

    /// HTTP backend with the key read from `config.api_key_env`.
    pub fn from_env(config: BackendConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let key = ApiKey::from_env(&config.api_key_env)?;
        let transport = ReqwestTransport::new().map_err(|_| ConfigError::Endpoint)?;
        Self::new(config, Some(key), Arc::new(transport), Arc::new(SystemClock::default()))
    }

    pub fn with_jitter_seed(self, seed: u64) -> Self {
        *self.jitter.lock().unwrap() = ChaCha8Rng::seed_from_u64(seed);
        self
    }

    pub fn config(&self) -> &BackendConfig {
        &self.config
    }

    pub fn usage(&self) -> Usage {
        Usage {
            requests: self.usage.requests.load(Ordering::Relaxed),
            input_tokens: self.usage.input_tokens.load(Ordering::Relaxed),
            output_tokens: self.usage.output_tokens.load(Ordering::Relaxed),
        }
    }

    /// Delay before retry number `attempt + 1`: `2 s * 2^attempt`, capped, scaled by a
    /// uniform factor in [0.5, 1].
    fn backoff(&self, attempt: u32) -> Duration {
        let full = BACKOFF_BASE.saturating_mul(1 << attempt.min(16)).min(BACKOFF_CAP);
        let factor: f64 = self.jitter.lock().unwrap().random_range(0.5..=1.0);
        full.mul_f64(factor)
    }

    /// Send `prompt` and return the model text. Transport errors, 5xx and 429
    /// replies are retried up to `max_retries` times; other 4xx are final.
    pub fn complete(&self, prompt: &str) -> Completion {
        let started = self.clock.now();
        let body = wire::request_body(self.config.wire_format, &self.config, prompt);
        let headers = wire::request_headers(self.config.wire_format, self.key.as_ref());
        let timeout = Duration::from_secs_f64(self.config.request_timeout);
        let mut attempts = 0;
        let mut raw = String::new();
        let failure = loop {
            self.limiter.acquire(self.clock.as_ref());
            attempts += 1;
            self.usage.requests.fetch_add(1, Ordering::Relaxed);
            let response = self
                .transport
                .post_json(&self.config.endpoint_url, &headers, &body, timeout);
            let (kind, detail, retry_after) = match response {
                Ok(r) if (200..300).contains(&r.status) => {
                    raw = r.body;
                    let done = |text: Result<String, (FailureKind, String)>, i: u64, o: u64| {
                        self.usage.input_tokens.fetch_add(i, Ordering::Relaxed);
                        self.usage.output_tokens.fetch_add(o, Ordering::Relaxed);
                        Completion {
                            text,
                            raw: raw.clone(),
                            attempts,
                            input_tokens: i,
                            output_tokens: o,
                            latency: (self.clock.now() - started).as_secs_f64(),
                        }
                    };
                    return match wire::parse_reply(self.config.wire_format, &raw) {
                        Ok(reply) => {
                            let i = reply.input_tokens.unwrap_or_else(|| estimate_tokens(prompt));
                            let o = reply.output_tokens.unwrap_or_else(|| estimate_tokens(&reply.text));
                            done(Ok(reply.text), i, o)
                        }
                        Err(e) => done(Err((FailureKind::Unparseable, e)), estimate_tokens(prompt), 0),
                    };
                }
                Ok(r) if r.status == 429 => {
                    raw = r.body;
                    (FailureKind::RateLimited, "HTTP 429".to_string(), r.retry_after)
                }
                Ok(r) if r.status >= 500 => {
                    raw = r.body;
                    (FailureKind::Transport, format!("HTTP {}", r.status), None)
                }
                Ok(r) => {
                    raw = r.body;
                    break (FailureKind::Transport, format!("HTTP {}", r.status));
                }
                Err(e) => (FailureKind::Transport, e.0, None),
            };
            tracing::warn!(attempt = attempts, %detail, "model request failed");
            if attempts > self.config.max_retries {
                break (kind, detail);
            }
            let delay = retry_after.unwrap_or_else(|| self.backoff(attempts - 1));
            self.clock.sleep(delay);
        };
        Completion {
            text: Err(failure),
            raw,
            attempts,
            input_tokens: 0,
            output_tokens: 0,
            latency: (self.clock.now() - started).as_secs_f64(),
        }
    }

    /// Request a standardization of `prompt` and parse it into a note.
    pub fn submit(&self, prompt: &str) -> BackendOutcome {
        let c = self.complete(prompt);
        let mut outcome = BackendOutcome {
            note: None,
            raw_response: c.raw,
            attempts: c.attempts,
            input_tokens: c.input_tokens,
            output_tokens: c.output_tokens,
            latency: c.latency,
            failure: None,
            detail: None,
        };
        match c.text {
            Ok(text) => {
                match parse_response(&text) {
                    Ok(note) => outcome.note = Some(note),
                    Err(e) => {
                        outcome.failure = Some(e.kind());
                        outcome.detail = Some(e.to_string());
                    }
                }
                outcome.raw_response = text;
            }
            Err((kind, detail)) => {
                outcome.failure = Some(kind);
                outcome.detail = Some(detail);
            }
        }
        outcome
    }
}

/// Plain prompt-in, text-out access to a model.
pub trait TextCompletion: Sync {
    fn complete_text(&self, prompt: &str) -> Result<String, String>;
}

impl TextCompletion for LlmBackend {
    fn complete_text(&self, prompt: &str) -> Result<String, String> {
        self.complete(prompt)
            .text
            .map_err(|(kind, detail)| format!("{kind:?}: {detail}"))
    }
}

impl<F> TextCompletion for F
where
    F: Fn(&str) -> Result<String, String> + Sync,
{
    fn complete_text(&self, prompt: &str) -> Result<String, String> {
        self(prompt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::clock::VirtualClock;
    use crate::llm::transport::{HttpResponse, Scripted, ScriptedTransport};
    use crate::llm::wire::{reply_body, WireFormat};
    use crate::note_model::to_pretty_json;

    fn valid_reply() -> Scripted {
        let note = to_pretty_json(&StandardizedNote::default());
        Scripted::status(200, reply_body(WireFormat::OpenAiChat, &format!("```json\n{note}\n```"), Some((100, 50))))
    }

    fn backend(script: ScriptedTransport, retries: u32) -> (LlmBackend, Arc<VirtualClock>, Arc<ScriptedTransport>) {
        let clock = Arc::new(VirtualClock::new());
        let transport = Arc::new(script);
        let config = BackendConfig { max_retries: retries, ..BackendConfig::default() };
        let b = LlmBackend::new(config, None, transport.clone(), clock.clone()).unwrap();
        (b, clock, transport)
    }

    #[test]
    fn happy_path() {
        let (b, _, _) = backend(ScriptedTransport::new([valid_reply()]), 3);
        let o = b.submit("prompt");
        assert!(o.note.is_some());
        assert_eq!(o.failure, None);
        assert_eq!(o.attempts, 1);
        assert_eq!((o.input_tokens, o.output_tokens), (100, 50));
    }

    #[test]
    fn rate_limited_twice_then_ok() {
        let script = ScriptedTransport::new([
            Scripted::status(429, "slow down"),
            Scripted::status(429, "slow down"),
            valid_reply(),
        ]);
        let (b, clock, _) = backend(script, 3);
        let o = b.submit("prompt");
        assert_eq!(o.attempts, 3);
        assert!(o.note.is_some());
        let sleeps = clock.sleeps();
        assert_eq!(sleeps.len(), 2);
        assert!(sleeps[0] >= Duration::from_secs(1) && sleeps[0] <= Duration::from_secs(2));
        assert!(sleeps[1] >= Duration::from_secs(2) && sleeps[1] <= Duration::from_secs(4));
    }

    #[test]
    fn server_errors_exhaust_retries() {
        let (b, _, t) = backend(ScriptedTransport::repeating(Scripted::status(500, "boom")), 2);
        let o = b.submit("prompt");
        assert_eq!(o.failure, Some(FailureKind::Transport));
        assert_eq!(o.attempts, 3);
        assert!(o.note.is_none());
        assert_eq!(t.requests().len(), 3);
    }

    #[test]
    fn exhausted_rate_limit_is_reported() {
        let (b, _, _) = backend(ScriptedTransport::repeating(Scripted::status(429, "")), 1);
        let o = b.submit("prompt");
        assert_eq!(o.failure, Some(FailureKind::RateLimited));
        assert_eq!(o.attempts, 2);
    }

    #[test]
    fn client_errors_are_not_retried() {
        let (b, _, _) = backend(ScriptedTransport::repeating(Scripted::status(401, "bad key")), 3);
        let o = b.submit("prompt");
        assert_eq!((o.failure, o.attempts), (Some(FailureKind::Transport), 1));
    }

    #[test]
    fn retry_after_is_honored() {
        let script = ScriptedTransport::new([
            Scripted::Reply(HttpResponse { status: 429, body: String::new(), retry_after: Some(Duration::from_secs(7)) }),
            valid_reply(),
        ]);
        let (b, clock, _) = backend(script, 3);
        assert!(b.submit("p").note.is_some());
        assert_eq!(clock.sleeps(), vec![Duration::from_secs(7)]);
    }

    #[test]
    fn transport_failures_and_bad_text() {
        let script = ScriptedTransport::new([Scripted::Fail("reset".into())])
            .then_repeat(Scripted::status(200, reply_body(WireFormat::OpenAiChat, "I cannot do that", None)));
        let (b, _, _) = backend(script, 3);
        let o = b.submit("prompt");
        assert_eq!(o.failure, Some(FailureKind::Unparseable));
        assert_eq!(o.attempts, 2);
        assert_eq!(o.raw_response, "I cannot do that");
        assert_eq!(o.output_tokens, 4);
    }

    #[test]
    fn parse_response_cases() {
        let note = to_pretty_json(&StandardizedNote::default());
        assert!(parse_response(&format!("```json\n{note}\n```")).is_ok());
        assert!(parse_response(&format!("Here is the standardized note:\n{note}\nThanks")).is_ok());
        assert!(matches!(parse_response("I cannot do that"), Err(ParseError::Unparseable)));
        assert!(matches!(parse_response(r#"{"HISTORY": 3}"#), Err(ParseError::SchemaInvalid(_))));
        let partial = parse_response(r#"{"IMPRESSION": {"Assessment": "Stable."}}"#).unwrap();
        assert_eq!(partial.impression.assessment, "Stable.");
    }
}

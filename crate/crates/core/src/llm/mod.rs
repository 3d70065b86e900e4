//! Remote language-model backend: prompt construction, HTTP submission with
//! retry and rate limiting, response parsing and cost projection.

mod backend;
pub mod clock;
mod config;
mod cost;
mod mock;
mod prompt;
mod rate_limit;
pub mod transport;
pub mod wire;

pub use backend::{
    estimate_tokens, parse_response, BackendOutcome, Completion, FailureKind, LlmBackend, ParseError, TextCompletion, Usage,
    BACKOFF_BASE,
};
pub use clock::{Clock, SystemClock, VirtualClock};
pub use config::{ApiKey, BackendConfig, ConfigError, DEFAULT_API_KEY_ENV};
pub use cost::{estimate_cost, note_seconds, CostEstimate, NoteCost};
pub use mock::{MockBackend, TranscriptEntry};
pub use prompt::{build_prompt, instructions, EXTENSION_MARKER, PROMPT_TEMPLATE};
pub use rate_limit::RateLimiter;
pub use transport::{HttpResponse, ReqwestTransport, Scripted, ScriptedTransport, Transport, TransportError};
pub use wire::WireFormat;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::wire::WireFormat;

pub const DEFAULT_API_KEY_ENV: &str = "NOTESTD_API_KEY";

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("requests_per_minute must be positive, got {0}")]
    RequestRate(f64),
    #[error("temperature must be within [0, 2], got {0}")]
    Temperature(f64),
    #[error("request_timeout must be positive, got {0}")]
    Timeout(f64),
    #[error("cost rates must be non-negative")]
    NegativeCost,
    #[error("endpoint_url is empty")]
    Endpoint,
    #[error("API key environment variable {0} is not set")]
    MissingApiKey(String),
}

/// Settings for a remote model endpoint. Holds no secrets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BackendConfig {
    pub endpoint_url: String,
    pub model_id: String,
    pub wire_format: WireFormat,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub max_retries: u32,
    pub requests_per_minute: f64,
    /// USD per input token.
    pub cost_per_input_token: f64,
    /// USD per output token.
    pub cost_per_output_token: f64,
    /// Seconds.
    pub request_timeout: f64,
    pub api_key_env: String,
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self {
            endpoint_url: "https://api.openai.com/v1/chat/completions".into(),
            model_id: "gpt-4".into(),
            wire_format: WireFormat::OpenAiChat,
            temperature: 0.0,
            max_output_tokens: 4096,
            max_retries: 3,
            requests_per_minute: 60.0,
            cost_per_input_token: 10.0e-6,
            cost_per_output_token: 30.0e-6,
            request_timeout: 120.0,
            api_key_env: DEFAULT_API_KEY_ENV.into(),
        }
    }
}

impl BackendConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.requests_per_minute.is_nan() || self.requests_per_minute <= 0.0 {
            return Err(ConfigError::RequestRate(self.requests_per_minute));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(ConfigError::Temperature(self.temperature));
        }
        if self.request_timeout.is_nan() || self.request_timeout <= 0.0 {
            return Err(ConfigError::Timeout(self.request_timeout));
        }
        if !(self.cost_per_input_token >= 0.0 && self.cost_per_output_token >= 0.0) {
            return Err(ConfigError::NegativeCost);
        }
        if self.endpoint_url.trim().is_empty() {
            return Err(ConfigError::Endpoint);
        }
        Ok(())
    }
}

/// A provider credential. Never printed, never serialized.
#[derive(Clone)]
pub struct ApiKey(String);

impl ApiKey {
    pub fn new(key: impl Into<String>) -> Self {
        Self(key.into())
    }

    pub fn from_env(var: &str) -> Result<Self, ConfigError> {
        match std::env::var(var) {
            Ok(v) if !v.trim().is_empty() => Ok(Self(v.trim().to_string())),
            _ => Err(ConfigError::MissingApiKey(var.to_string())),
        }
    }

    pub(crate) fn expose(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ApiKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ApiKey(***)")
    }
}

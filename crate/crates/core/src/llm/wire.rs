//! Request and response shapes for supported provider APIs.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::{ApiKey, BackendConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum WireFormat {
    /// `/v1/chat/completions` style.
    #[default]
    OpenAiChat,
    /// `/v1/messages` style.
    AnthropicMessages,
}

/// Text and provider-reported token usage extracted from a reply body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub text: String,
    pub input_tokens: Option<u64>,
    pub output_tokens: Option<u64>,
}

pub fn request_body(format: WireFormat, config: &BackendConfig, prompt: &str) -> Value {
    match format {
        WireFormat::OpenAiChat => json!({
            "model": config.model_id,
            "temperature": config.temperature,
            "max_tokens": config.max_output_tokens,
            "messages": [{"role": "user", "content": prompt}],
        }),
        WireFormat::AnthropicMessages => json!({
            "model": config.model_id,
            "temperature": config.temperature,
            "max_tokens": config.max_output_tokens,
            "messages": [{"role": "user", "content": prompt}],
        }),
    }
}

pub fn request_headers(format: WireFormat, key: Option<&ApiKey>) -> Vec<(String, String)> {
    let mut headers = Vec::new();
    match format {
        WireFormat::OpenAiChat => {
            if let Some(k) = key {
                headers.push(("authorization".into(), format!("Bearer {}", k.expose())));
            }
        }
        WireFormat::AnthropicMessages => {
            headers.push(("anthropic-version".into(), "2023-06-01".into()));
            if let Some(k) = key {
                headers.push(("x-api-key".into(), k.expose().to_string()));
            }
        }
    }
    headers
}

pub fn parse_reply(format: WireFormat, body: &str) -> Result<Reply, String> {
    let v: Value = serde_json::from_str(body).map_err(|e| format!("reply is not JSON: {e}"))?;
    let (text, input, output) = match format {
        WireFormat::OpenAiChat => (
            v.pointer("/choices/0/message/content").and_then(Value::as_str).map(str::to_string),
            v.pointer("/usage/prompt_tokens").and_then(Value::as_u64),
            v.pointer("/usage/completion_tokens").and_then(Value::as_u64),
        ),
        WireFormat::AnthropicMessages => (
            v.get("content").and_then(Value::as_array).map(|blocks| {
                blocks
                    .iter()
                    .filter(|b| b.get("type").and_then(Value::as_str) == Some("text"))
                    .filter_map(|b| b.get("text").and_then(Value::as_str))
                    .collect::<String>()
            }),
            v.pointer("/usage/input_tokens").and_then(Value::as_u64),
            v.pointer("/usage/output_tokens").and_then(Value::as_u64),
        ),
    };
    let text = text.ok_or_else(|| "reply has no message text".to_string())?;
    Ok(Reply { text, input_tokens: input, output_tokens: output })
}

/// A reply body in `format` carrying `text`, as a provider would send it.
pub fn reply_body(format: WireFormat, text: &str, usage: Option<(u64, u64)>) -> String {
    let v = match format {
        WireFormat::OpenAiChat => {
            let mut v = json!({"choices": [{"index": 0, "message": {"role": "assistant", "content": text}}]});
            if let Some((i, o)) = usage {
                v["usage"] = json!({"prompt_tokens": i, "completion_tokens": o});
            }
            v
        }
        WireFormat::AnthropicMessages => {
            let mut v = json!({"type": "message", "content": [{"type": "text", "text": text}]});
            if let Some((i, o)) = usage {
                v["usage"] = json!({"input_tokens": i, "output_tokens": o});
            }
            v
        }
    };
    v.to_string()
}

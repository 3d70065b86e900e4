use std::collections::VecDeque;
use std::sync::Mutex;
use std::time::Duration;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
    pub retry_after: Option<Duration>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("transport error: {0}")]
pub struct TransportError(pub String);

/// One HTTP POST of a JSON body.
pub trait Transport: Send + Sync {
    fn post_json(
        &self,
        url: &str,
        headers: &[(String, String)],
        body: &serde_json::Value,
        timeout: Duration,
    ) -> Result<HttpResponse, TransportError>;
}

#[derive(Debug, Clone)]
pub struct ReqwestTransport {
    client: reqwest::blocking::Client,
}

impl ReqwestTransport {
    pub fn new() -> Result<Self, TransportError> {
        let client = reqwest::blocking::Client::builder()
            .build()
            .map_err(|e| TransportError(e.to_string()))?;
        Ok(Self { client })
    }
}

impl Transport for ReqwestTransport {
    fn post_json(
        &self,
        url: &str,
        headers: &[(String, String)],
        body: &serde_json::Value,
        timeout: Duration,
    ) -> Result<HttpResponse, TransportError> {
        let mut req = self
            .client
            .post(url)
            .timeout(timeout)
            .header("content-type", "application/json")
            .body(body.to_string());
        for (k, v) in headers {
            req = req.header(k.as_str(), v.as_str());
        }
        // reqwest errors can embed the URL but never header values.
        let resp = req.send().map_err(|e| TransportError(e.without_url().to_string()))?;
        let status = resp.status().as_u16();
        let retry_after = resp
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(Duration::from_secs);
        let body = resp.text().map_err(|e| TransportError(e.without_url().to_string()))?;
        Ok(HttpResponse { status, body, retry_after })
    }
}

/// A canned reply for [`ScriptedTransport`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scripted {
    Reply(HttpResponse),
    Fail(String),
}

impl Scripted {
    pub fn status(status: u16, body: impl Into<String>) -> Self {
        Scripted::Reply(HttpResponse { status, body: body.into(), retry_after: None })
    }
}

/// Replays a fixed transcript of replies, then repeats `fallback` forever.
#[derive(Debug)]
pub struct ScriptedTransport {
    script: Mutex<VecDeque<Scripted>>,
    fallback: Option<Scripted>,
    requests: Mutex<Vec<serde_json::Value>>,
}

impl ScriptedTransport {
    pub fn new(script: impl IntoIterator<Item = Scripted>) -> Self {
        Self {
            script: Mutex::new(script.into_iter().collect()),
            fallback: None,
            requests: Mutex::new(Vec::new()),
        }
    }

    pub fn repeating(reply: Scripted) -> Self {
        Self { fallback: Some(reply), ..Self::new([]) }
    }

    pub fn then_repeat(mut self, reply: Scripted) -> Self {
        self.fallback = Some(reply);
        self
    }

    /// Request bodies received so far.
    pub fn requests(&self) -> Vec<serde_json::Value> {
        self.requests.lock().unwrap().clone()
    }
}

impl Transport for ScriptedTransport {
    fn post_json(
        &self,
        _url: &str,
        _headers: &[(String, String)],
        body: &serde_json::Value,
        _timeout: Duration,
    ) -> Result<HttpResponse, TransportError> {
        self.requests.lock().unwrap().push(body.clone());
        let next = self.script.lock().unwrap().pop_front().or_else(|| self.fallback.clone());
        match next {
            Some(Scripted::Reply(r)) => Ok(r),
            Some(Scripted::Fail(msg)) => Err(TransportError(msg)),
            None => Err(TransportError("script exhausted".into())),
        }
    }
}

use std::collections::HashMap;
use std::io::BufRead;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::backend::{parse_response, FailureKind};
use crate::corpus::{CorpusError, SourceNote};
use crate::note_model::{to_pretty_json, StandardizedNote};
use crate::pipeline::{BackendFailure, StandardizationBackend};
use crate::rules::{standardize_rule_based, StandardizationResources};

/// One canned reply: either response text or a failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub accession_num: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureKind>,
}

/// Offline stand-in for a model backend.
///
/// Replies come from a transcript keyed by accession number. Notes without a
/// transcript entry get the rule engine's output, serialized and fenced the
/// way a chat model would reply, so the response still goes through parsing.
#[derive(Debug, Default)]
pub struct MockBackend {
    transcript: HashMap<String, TranscriptEntry>,
    resources: Option<Arc<StandardizationResources>>,
    calls: AtomicU64,
}

impl MockBackend {
    pub fn new(entries: impl IntoIterator<Item = TranscriptEntry>) -> Self {
        Self {
            transcript: entries.into_iter().map(|e| (e.accession_num.clone(), e)).collect(),
            ..Self::default()
        }
    }

    pub fn with_resources(mut self, resources: Arc<StandardizationResources>) -> Self {
        self.resources = Some(resources);
        self
    }

    /// Read a transcript, one JSON [`TranscriptEntry`] per line.
    pub fn from_jsonl(source: impl std::io::Read) -> Result<Self, CorpusError> {
        let mut entries = Vec::new();
        for (i, line) in std::io::BufReader::new(source).lines().enumerate() {
            let line = line.map_err(CorpusError::Io)?;
            if line.trim().is_empty() {
                continue;
            }
            let e: TranscriptEntry = serde_json::from_str(&line).map_err(|e| CorpusError::MalformedLine {
                line: i + 1,
                reason: e.to_string(),
            })?;
            entries.push(e);
        }
        Ok(Self::new(entries))
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    fn reply(&self, note: &SourceNote) -> Result<String, FailureKind> {
        if let Some(e) = self.transcript.get(&note.accession_num) {
            return match (&e.response, e.failure) {
                (_, Some(kind)) => Err(kind),
                (Some(text), None) => Ok(text.clone()),
                (None, None) => Err(FailureKind::Unparseable),
            };
        }
        let resources = self.resources.as_deref().unwrap_or_else(|| crate::resources::builtin());
        let out = standardize_rule_based(note, resources);
        Ok(format!("```json\n{}\n```", to_pretty_json(&out)))
    }
}

impl StandardizationBackend for MockBackend {
    fn name(&self) -> &str {
        "mock"
    }

    fn standardize(&self, note: &SourceNote) -> Result<StandardizedNote, BackendFailure> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let raw = self.reply(note).map_err(|kind| BackendFailure {
            kind,
            raw_response: String::new(),
            detail: "scripted failure".into(),
            attempts: 1,
        })?;
        parse_response(&raw).map_err(|e| BackendFailure {
            kind: e.kind(),
            detail: e.to_string(),
            raw_response: raw,
            attempts: 1,
        })
    }
}

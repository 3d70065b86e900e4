use serde_json::Value;
use thiserror::Error;

use super::{dedup_mentions, Gazetteer, Mention, MentionKind};
use crate::llm::TextCompletion;
use crate::note_model::StandardizedNote;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtractionError {
    #[error("model request failed: {0}")]
    Request(String),
    #[error("reply is not a JSON array of mentions")]
    Unparseable,
}

/// Prompt asking a model for one kind of mention in the relevant sections.
pub fn extraction_prompt(note: &StandardizedNote, kind: MentionKind) -> String {
    let ask = match kind {
        MentionKind::Medication => "Look for \"medications\" in the PLAN section of this standardized clinical note.",
        MentionKind::Finding => {
            "Look for \"signs and symptoms\" in the HISTORY, EXAMINATION, and IMPRESSION sections of this standardized clinical note."
        }
    };
    let sections: serde_json::Map<String, Value> = kind
        .fields()
        .filter(|f| !note.field(*f).is_empty())
        .map(|f| (f.path().to_string(), Value::String(note.field(f).to_string())))
        .collect();
    format!(
        "{ask}\nRespond with only a JSON array. Each element is an object with \"term\" (the words exactly as written in the note) and \"section\" (the section path where they appear). Use [] if there are none.\n\nSections:\n{}\n",
        serde_json::to_string_pretty(&Value::Object(sections)).expect("serializable")
    )
}

/// Turn a model reply into mentions. Items outside the searched sections, or
/// whose term does not occur in the named section, are dropped.
pub fn parse_extraction_reply(
    reply: &str,
    accession_num: &str,
    note: &StandardizedNote,
    kind: MentionKind,
    gazetteer: &Gazetteer,
) -> Result<Vec<Mention>, ExtractionError> {
    let (start, end) = match (reply.find('['), reply.rfind(']')) {
        (Some(s), Some(e)) if s < e => (s, e),
        _ => return Err(ExtractionError::Unparseable),
    };
    let items: Vec<Value> = serde_json::from_str(&reply[start..=end]).map_err(|_| ExtractionError::Unparseable)?;
    let mut out = Vec::new();
    for item in items {
        let (term, section) = match &item {
            Value::String(t) => (t.as_str(), None),
            Value::Object(o) => match o.get("term").and_then(Value::as_str) {
                Some(t) => (t, o.get("section").and_then(Value::as_str)),
                None => continue,
            },
            _ => continue,
        };
        let term = term.trim();
        if term.is_empty() {
            continue;
        }
        let candidates: Vec<_> = match section {
            Some(p) if kind.allows_path(p) => kind.fields().filter(|f| f.path() == p).collect(),
            Some(_) => continue,
            None => kind.fields().collect(),
        };
        let needle = term.to_lowercase();
        let found = candidates.into_iter().find_map(|f| {
            let text = note.field(f);
            let lower = text.to_lowercase();
            // lowercasing can change byte lengths outside ASCII; only slice when it did not
            let at = lower.find(&needle)?;
            let surface = if lower.len() == text.len() { &text[at..at + needle.len()] } else { term };
            Some((f, surface.to_string()))
        });
        let Some((field, surface)) = found else {
            tracing::debug!(term, "model returned a term not present in the note");
            continue;
        };
        out.push(Mention {
            accession_num: accession_num.to_string(),
            kind,
            normalized: gazetteer.canonical(&surface).unwrap_or_else(|| needle.clone()),
            surface,
            section_path: field.path().to_string(),
        });
    }
    Ok(dedup_mentions(out))
}

/// Model-backed extraction producing the same [`Mention`] records as the
/// gazetteer path. The gazetteer only normalizes known surface forms.
pub struct LlmExtractor<'a> {
    pub model: &'a dyn TextCompletion,
    pub gazetteer: &'a Gazetteer,
}

impl LlmExtractor<'_> {
    pub fn extract(
        &self,
        accession_num: &str,
        note: &StandardizedNote,
        kind: MentionKind,
    ) -> Result<Vec<Mention>, ExtractionError> {
        if kind.fields().all(|f| note.field(f).is_empty()) {
            return Ok(Vec::new());
        }
        let reply = self
            .model
            .complete_text(&extraction_prompt(note, kind))
            .map_err(ExtractionError::Request)?;
        parse_extraction_reply(&reply, accession_num, note, kind, self.gazetteer)
    }
}

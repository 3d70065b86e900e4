//! Corpus ingestion: CSV parsing, length/metadata filtering and JSONL persistence
//! of source notes.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::info;

use crate::text::char_count;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("column `{0}` not found in CSV header")]
    MissingColumn(String),
    #[error("input is not valid UTF-8 (first bad byte at offset {offset})")]
    EncodingError { offset: usize },
    #[error("corpus has a header but no data rows")]
    EmptyCorpus,
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("duplicate accession number `{0}`")]
    DuplicateAccession(String),
    #[error("record {line}: {reason}")]
    InvalidNote { line: usize, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The pipeline input unit: one de-identified note and its accession number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceNote {
    pub accession_num: String,
    pub note_text: String,
}

impl SourceNote {
    pub fn new(accession_num: impl Into<String>, note_text: impl Into<String>) -> Self {
        Self {
            accession_num: accession_num.into(),
            note_text: note_text.into(),
        }
    }

    /// Character count of the note text in Unicode scalar values.
    pub fn char_count(&self) -> usize {
        char_count(&self.note_text)
    }

    fn check(&self) -> Result<(), String> {
        if self.accession_num.trim().is_empty() {
            return Err("accession_num is empty".into());
        }
        if self.note_text.trim().is_empty() {
            return Err(format!(
                "note `{}` has empty note_text",
                self.accession_num
            ));
        }
        Ok(())
    }
}

/// Selection rules applied after ingestion.
///
/// `column_filters` restricts rows by metadata columns (for example
/// `setting = outpatient`, `department = Neurology`, `author_role = physician`).
/// A filter on a column the corpus does not carry is ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterCriteria {
    pub min_chars: usize,
    #[serde(default)]
    pub column_filters: BTreeMap<String, BTreeSet<String>>,
}

impl Default for FilterCriteria {
    fn default() -> Self {
        Self {
            min_chars: 2000,
            column_filters: BTreeMap::new(),
        }
    }
}

/// A parsed CSV row: the note plus every other column as metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusRow {
    pub note: SourceNote,
    pub metadata: BTreeMap<String, String>,
}

/// Why a note was removed by filtering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedNote {
    pub accession_num: String,
    pub reason: String,
}

/// Parse a CSV export into source notes.
///
/// When `id_column` is `None`, accession numbers are assigned as "1", "2", ... in
/// row order.
pub fn parse_corpus_csv(
    raw: impl Read,
    text_column: &str,
    id_column: Option<&str>,
) -> Result<Vec<SourceNote>, CorpusError> {
    Ok(parse_corpus_rows(raw, text_column, id_column)?
        .into_iter()
        .map(|r| r.note)
        .collect())
}

/// Like [`parse_corpus_csv`] but keeps the remaining columns as metadata.
pub fn parse_corpus_rows(
    mut raw: impl Read,
    text_column: &str,
    id_column: Option<&str>,
) -> Result<Vec<CorpusRow>, CorpusError> {
    let mut bytes = Vec::new();
    raw.read_to_end(&mut bytes)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CorpusError::EncodingError {
        offset: e.valid_up_to(),
    })?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .delimiter(b',')
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim_start_matches('\u{feff}') == name)
            .ok_or_else(|| CorpusError::MissingColumn(name.to_string()))
    };
    let text_idx = find(text_column)?;
    let id_idx = id_column.map(find).transpose()?;

    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        // header is line 1
        let line = record.position().map(|p| p.line() as usize).unwrap_or(i + 2);
        let accession = match id_idx {
            Some(idx) => record.get(idx).unwrap_or_default().trim().to_string(),
            None => (i + 1).to_string(),
        };
        let note = SourceNote::new(accession, record.get(text_idx).unwrap_or_default());
        note.check()
            .map_err(|reason| CorpusError::InvalidNote { line, reason })?;
        if !seen.insert(note.accession_num.clone()) {
            return Err(CorpusError::DuplicateAccession(note.accession_num));
        }
        let metadata = headers
            .iter()
            .enumerate()
            .filter(|(idx, _)| *idx != text_idx && Some(*idx) != id_idx)
            .map(|(idx, h)| (h.to_string(), record.get(idx).unwrap_or_default().to_string()))
            .collect();
        rows.push(CorpusRow { note, metadata });
    }
    if rows.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    Ok(rows)
}

/// Keep notes with at least `criteria.min_chars` characters, preserving order.
pub fn filter_notes(notes: &[SourceNote], criteria: &FilterCriteria) -> Vec<SourceNote> {
    partition_notes(notes, criteria).0
}

/// Split notes into retained and dropped, logging every drop.
pub fn partition_notes(
    notes: &[SourceNote],
    criteria: &FilterCriteria,
) -> (Vec<SourceNote>, Vec<DroppedNote>) {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for note in notes {
        match length_reason(note, criteria) {
            None => kept.push(note.clone()),
            Some(reason) => dropped.push(log_drop(note, reason)),
        }
    }
    (kept, dropped)
}

/// Apply the length filter and the metadata column filters to parsed rows.
pub fn filter_rows(
    rows: &[CorpusRow],
    criteria: &FilterCriteria,
) -> (Vec<SourceNote>, Vec<DroppedNote>) {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for row in rows {
        let column_reason = criteria.column_filters.iter().find_map(|(col, allowed)| {
            let value = row.metadata.get(col)?;
            (!allowed.contains(value.trim())).then(|| format!("{col}={value} not allowed"))
        });
        match column_reason.or_else(|| length_reason(&row.note, criteria)) {
            None => kept.push(row.note.clone()),
            Some(reason) => dropped.push(log_drop(&row.note, reason)),
        }
    }
    (kept, dropped)
}

fn length_reason(note: &SourceNote, criteria: &FilterCriteria) -> Option<String> {
    let n = note.char_count();
    (n < criteria.min_chars).then(|| format!("{n} chars < min_chars {}", criteria.min_chars))
}

fn log_drop(note: &SourceNote, reason: String) -> DroppedNote {
    info!(accession = %note.accession_num, %reason, "note filtered out");
    DroppedNote {
        accession_num: note.accession_num.clone(),
        reason,
    }
}

/// Write notes as JSONL (compact, LF-terminated). Returns the number of lines.
pub fn write_notes_jsonl(notes: &[SourceNote], mut sink: impl Write) -> Result<usize, CorpusError> {
    for note in notes {
        serde_json::to_writer(&mut sink, note).map_err(std::io::Error::from)?;
        sink.write_all(b"\n")?;
    }
    sink.flush()?;
    Ok(notes.len())
}

/// Read notes written by [`write_notes_jsonl`]. Blank lines are skipped.
pub fn read_notes_jsonl(source: impl Read) -> Result<Vec<SourceNote>, CorpusError> {
    let mut notes = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in BufReader::new(source).lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let note: SourceNote =
            serde_json::from_str(&line).map_err(|e| CorpusError::MalformedLine {
                line: line_no,
                reason: e.to_string(),
            })?;
        note.check().map_err(|reason| CorpusError::MalformedLine {
            line: line_no,
            reason,
        })?;
        if !seen.insert(note.accession_num.clone()) {
            return Err(CorpusError::DuplicateAccession(note.accession_num));
        }
        notes.push(note);
    }
    Ok(notes)
}

/// Write any serializable records as compact JSONL.
pub fn write_jsonl<T: Serialize>(items: &[T], mut sink: impl Write) -> Result<usize, CorpusError> {
    for item in items {
        serde_json::to_writer(&mut sink, item).map_err(std::io::Error::from)?;
        sink.write_all(b"\n")?;
    }
    sink.flush()?;
    Ok(items.len())
}

/// Read JSONL records, skipping blank lines.
pub fn read_jsonl<T: serde::de::DeserializeOwned>(source: impl Read) -> Result<Vec<T>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(source).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| CorpusError::MalformedLine {
            line: i + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(out)
}

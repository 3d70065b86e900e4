//! Corpus-level orchestration: run a backend over many notes, collect
//! per-note statistics and summarize them.

mod report;
mod summary;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use report::{histogram_svg, render_report, write_stats_csv, ReportFormat};
pub use summary::{aggregate, CorpusSummary, Histogram, MetricSummary, METRIC_NAMES};

use crate::corpus::SourceNote;
use crate::llm::{build_prompt, FailureKind, LlmBackend};
use crate::note_model::StandardizedNote;
use crate::rules::{standardize_rule_based, StandardizationResources};
use crate::text::char_count;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error("no statistics to aggregate")]
    EmptyInput,
    #[error("parallelism must be at least 1")]
    Parallelism,
    #[error("bins must be at least 1")]
    Bins,
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Why a backend produced no note.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendFailure {
    pub kind: FailureKind,
    pub raw_response: String,
    pub detail: String,
    pub attempts: u32,
}

/// Anything that turns a source note into a standardized note.
pub trait StandardizationBackend: Sync {
    fn name(&self) -> &str;
    fn standardize(&self, note: &SourceNote) -> Result<StandardizedNote, BackendFailure>;
}

/// The deterministic rule engine as a backend. It cannot fail.
#[derive(Debug, Clone, Copy)]
pub struct RuleBackend<'a> {
    pub resources: &'a StandardizationResources,
}

impl StandardizationBackend for RuleBackend<'_> {
    fn name(&self) -> &str {
        "rules"
    }

    fn standardize(&self, note: &SourceNote) -> Result<StandardizedNote, BackendFailure> {
        Ok(standardize_rule_based(note, self.resources))
    }
}

impl StandardizationBackend for LlmBackend {
    fn name(&self) -> &str {
        "llm"
    }

    fn standardize(&self, note: &SourceNote) -> Result<StandardizedNote, BackendFailure> {
        let outcome = self.submit(&build_prompt(note));
        match (outcome.note, outcome.failure) {
            (Some(n), _) => Ok(n),
            (None, kind) => Err(BackendFailure {
                kind: kind.unwrap_or(FailureKind::Unparseable),
                raw_response: outcome.raw_response,
                detail: outcome.detail.unwrap_or_default(),
                attempts: outcome.attempts,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoteFailure {
    pub accession_num: String,
    #[serde(flatten)]
    pub failure: BackendFailure,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BatchResult {
    pub results: Vec<(SourceNote, StandardizedNote)>,
    pub failures: Vec<NoteFailure>,
}

/// Standardize every note with at most `parallelism` in flight. Results keep
/// input order; a failing note is recorded and never aborts the batch.
pub fn standardize_corpus(
    notes: &[SourceNote],
    backend: &dyn StandardizationBackend,
    parallelism: usize,
) -> Result<BatchResult, PipelineError> {
    if parallelism == 0 {
        return Err(PipelineError::Parallelism);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| PipelineError::ThreadPool(e.to_string()))?;
    let outcomes: Vec<_> = pool.install(|| notes.par_iter().map(|n| backend.standardize(n)).collect());
    let mut batch = BatchResult::default();
    for (note, outcome) in notes.iter().zip(outcomes) {
        match outcome {
            Ok(std) => batch.results.push((note.clone(), std)),
            Err(failure) => {
                tracing::warn!(accession = %note.accession_num, kind = ?failure.kind, "standardization failed");
                batch.failures.push(NoteFailure { accession_num: note.accession_num.clone(), failure });
            }
        }
    }
    Ok(batch)
}

/// One line of `standardized.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardizedRecord {
    pub accession_num: String,
    pub note: StandardizedNote,
}

impl BatchResult {
    pub fn records(&self) -> Vec<StandardizedRecord> {
        self.results
            .iter()
            .map(|(src, note)| StandardizedRecord { accession_num: src.accession_num.clone(), note: note.clone() })
            .collect()
    }
}

/// Per-note lengths and metric counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoteStats {
    pub accession_num: String,
    pub source_chars: u64,
    pub standardized_chars: u64,
    pub grammatical_errors: u64,
    pub spelling_errors: u64,
    pub abbreviations_expanded: u64,
    pub non_standard_terms: u64,
}

impl NoteStats {
    /// Values in [`METRIC_NAMES`] order.
    pub fn values(&self) -> [u64; 6] {
        [
            self.source_chars,
            self.standardized_chars,
            self.grammatical_errors,
            self.spelling_errors,
            self.abbreviations_expanded,
            self.non_standard_terms,
        ]
    }
}

/// `standardized_chars` is the total length of all section text, in Unicode scalars.
pub fn compute_note_stats(source: &SourceNote, note: &StandardizedNote) -> NoteStats {
    let m = &note.metrics;
    NoteStats {
        accession_num: source.accession_num.clone(),
        source_chars: source.char_count() as u64,
        standardized_chars: note.populated_fields().map(|(_, t)| char_count(t) as u64).sum(),
        grammatical_errors: m.grammatical_errors,
        spelling_errors: m.spelling_errors.len() as u64,
        abbreviations_expanded: m.abbreviations_expanded.len() as u64,
        non_standard_terms: m.non_standard_terms.len() as u64,
    }
}

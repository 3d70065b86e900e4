use serde::{Deserialize, Serialize};

use super::config::BackendConfig;
use super::prompt::PROMPT_TEMPLATE;
use crate::corpus::SourceNote;
use crate::note_model::StandardizedNote;

/// Mean source note length the per-note time scale is anchored to.
pub const REFERENCE_CHARS: f64 = 6420.0;
/// Seconds for a note of [`REFERENCE_CHARS`].
pub const REFERENCE_SECONDS: f64 = 20.0;
pub const MIN_SECONDS: f64 = 5.0;
pub const MAX_SECONDS: f64 = 120.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoteCost {
    pub accession_num: String,
    pub chars: usize,
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub cost: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostEstimate {
    pub notes: usize,
    pub total_cost: f64,
    /// Seconds with one request in flight.
    pub serial_time: f64,
    /// Seconds with `parallelism` requests in flight under the rate limit.
    pub parallel_time: f64,
    pub parallelism: usize,
    pub per_note: Vec<NoteCost>,
}

pub fn note_seconds(chars: usize) -> f64 {
    (REFERENCE_SECONDS * chars as f64 / REFERENCE_CHARS).clamp(MIN_SECONDS, MAX_SECONDS)
}

fn skeleton_chars() -> usize {
    serde_json::to_string(&StandardizedNote::default())
        .expect("serializable")
        .chars()
        .count()
}

/// Projected spend and wall time for standardizing `notes`.
///
/// Input tokens cover the prompt template plus the note; output tokens cover
/// the note text re-emitted inside the JSON skeleton; both at four characters
/// per token. Parallel time is the greedy list-schedule makespan over
/// `parallelism` workers, floored by the request-rate limit.
pub fn estimate_cost(notes: &[SourceNote], config: &BackendConfig, parallelism: usize) -> CostEstimate {
    let parallelism = parallelism.max(1);
    let template = PROMPT_TEMPLATE.chars().count();
    let skeleton = skeleton_chars();
    let per_note: Vec<NoteCost> = notes
        .iter()
        .map(|n| {
            let chars = n.char_count();
            let input_tokens = ((template + chars) as u64).div_ceil(4);
            let output_tokens = ((chars + skeleton) as u64).div_ceil(4);
            NoteCost {
                accession_num: n.accession_num.clone(),
                chars,
                input_tokens,
                output_tokens,
                cost: input_tokens as f64 * config.cost_per_input_token
                    + output_tokens as f64 * config.cost_per_output_token,
                seconds: note_seconds(chars),
            }
        })
        .collect();
    let mut workers = vec![0.0f64; parallelism];
    for c in &per_note {
        let (i, _) = workers
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("at least one worker");
        workers[i] += c.seconds;
    }
    let makespan = workers.iter().copied().fold(0.0, f64::max);
    let rate_floor = if notes.is_empty() {
        0.0
    } else {
        notes.len() as f64 * 60.0 / config.requests_per_minute
    };
    CostEstimate {
        notes: notes.len(),
        total_cost: per_note.iter().map(|c| c.cost).sum(),
        serial_time: per_note.iter().map(|c| c.seconds).sum(),
        parallel_time: makespan.max(rate_floor),
        parallelism,
        per_note,
    }
}

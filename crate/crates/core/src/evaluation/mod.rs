//! Source-versus-standardized comparison: content-loss detection, quality
//! ratings, review sampling and rating aggregation.

mod completeness;
mod ratings;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use completeness::{completeness_check, completeness_check_with, parse_event, ContentDiff, STOP_WORDS};
pub use ratings::{
    aggregate_ratings, judge_prompt, parse_judge_reply, rate_quality, rate_quality_heuristic, rate_quality_llm,
    QualityRatings, RatingMode, RatingRow, RatingThresholds, RatingsTable, REFERENCE_RATINGS, RATING_NAMES,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("cannot sample {requested} of {available} notes")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("no ratings to aggregate")]
    EmptyInput,
    #[error("rating {value} for {metric} is outside 1..=5")]
    OutOfRange { metric: &'static str, value: i64 },
    #[error("judge request failed: {0}")]
    Judge(String),
    #[error("judge reply does not contain five ratings")]
    UnparseableJudgement,
    #[error("rating thresholds: {0}")]
    Thresholds(String),
}

/// Size of the expert review subset.
pub const DEFAULT_REVIEW_SIZE: usize = 20;

/// Uniform sample without replacement, reproducible from `seed`.
pub fn sample_for_review<T: Clone>(items: &[T], n: usize, seed: u64) -> Result<Vec<T>, EvalError> {
    if n > items.len() {
        return Err(EvalError::SampleTooLarge { requested: n, available: items.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(rand::seq::index::sample(&mut rng, items.len(), n)
        .into_iter()
        .map(|i| items[i].clone())
        .collect())
}

/// One side-by-side record for human review.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewRecord {
    pub accession_num: String,
    pub source: String,
    pub standardized: crate::StandardizedNote,
}

use serde::{Deserialize, Serialize};

use super::{NoteStats, PipelineError};

pub const METRIC_NAMES: [&str; 6] = [
    "source_chars",
    "standardized_chars",
    "grammatical_errors",
    "spelling_errors",
    "abbreviations_expanded",
    "non_standard_terms",
];

/// Equal-width bins; every bin is half-open except the last, which is closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Bins over `[min, max]`; a constant sample gets the unit interval around it.
    pub fn from_samples(samples: &[f64], bins: usize) -> Self {
        let bins = bins.max(1);
        let (mut lo, mut hi) = samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        if samples.is_empty() {
            (lo, hi) = (0.0, 1.0);
        }
        if lo == hi {
            lo -= 0.5;
            hi += 0.5;
        }
        let width = (hi - lo) / bins as f64;
        let mut bin_edges: Vec<f64> = (0..bins).map(|i| lo + i as f64 * width).collect();
        bin_edges.push(hi);
        let mut counts = vec![0; bins];
        for &x in samples {
            let i = (((x - lo) / width).floor() as usize).min(bins - 1);
            counts[i] += 1;
        }
        Self { bin_edges, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single value.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub histogram: Histogram,
}

impl MetricSummary {
    pub fn from_samples(samples: &[f64], bins: usize) -> Self {
        // Welford's running update.
        let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
        for &x in samples {
            n += 1.0;
            let delta = x - mean;
            mean += delta / n;
            m2 += delta * (x - mean);
        }
        let sd = if n > 1.0 { (m2 / (n - 1.0)).max(0.0).sqrt() } else { 0.0 };
        Self {
            mean,
            sd,
            min: samples.iter().copied().fold(f64::INFINITY, f64::min),
            max: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            histogram: Histogram::from_samples(samples, bins),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub n: u64,
    pub source_chars: MetricSummary,
    pub standardized_chars: MetricSummary,
    pub grammatical_errors: MetricSummary,
    pub spelling_errors: MetricSummary,
    pub abbreviations_expanded: MetricSummary,
    pub non_standard_terms: MetricSummary,
}

impl CorpusSummary {
    /// `(name, summary)` in [`METRIC_NAMES`] order.
    pub fn metrics(&self) -> [(&'static str, &MetricSummary); 6] {
        [
            (METRIC_NAMES[0], &self.source_chars),
            (METRIC_NAMES[1], &self.standardized_chars),
            (METRIC_NAMES[2], &self.grammatical_errors),
            (METRIC_NAMES[3], &self.spelling_errors),
            (METRIC_NAMES[4], &self.abbreviations_expanded),
            (METRIC_NAMES[5], &self.non_standard_terms),
        ]
    }
}

pub fn aggregate(stats: &[NoteStats], bins: usize) -> Result<CorpusSummary, PipelineError> {
    if stats.is_empty() {
        return Err(PipelineError::EmptyInput);
    }
    if bins == 0 {
        return Err(PipelineError::Bins);
    }
    let column = |i: usize| -> MetricSummary {
        let xs: Vec<f64> = stats.iter().map(|s| s.values()[i] as f64).collect();
        MetricSummary::from_samples(&xs, bins)
    };
    Ok(CorpusSummary {
        n: stats.len() as u64,
        source_chars: column(0),
        standardized_chars: column(1),
        grammatical_errors: column(2),
        spelling_errors: column(3),
        abbreviations_expanded: column(4),
        non_standard_terms: column(5),
    })
}

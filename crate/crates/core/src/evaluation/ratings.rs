use serde::{Deserialize, Serialize};

use super::completeness::completeness_check_with;
use super::EvalError;
use crate::corpus::SourceNote;
use crate::llm::TextCompletion;
use crate::note_model::{to_pretty_json, NoteField, StandardizedNote};
use crate::pipeline::MetricSummary;
use crate::rules::{
    count_grammar_fixes, expand_abbreviations, substitute_nonstandard_terms, StandardizationResources,
    MIN_CORRECTABLE_LEN,
};
use crate::text::{is_all_caps, is_capitalized, word_spans};

/// Rubric dimensions in table order.
pub const RATING_NAMES: [&str; 5] = [
    "Text Organization",
    "Spelling and Grammar",
    "Abbreviation Expansion",
    "Terminology Standardization",
    "Completeness",
];

/// Reference values (mean, sd) reported for expert plus model consensus. Documentation only.
pub const REFERENCE_RATINGS: [(&str, f64, f64); 5] = [
    ("Text Organization", 4.93, 0.43),
    ("Spelling and Grammar", 4.96, 0.39),
    ("Abbreviation Expansion", 4.74, 0.56),
    ("Terminology Standardization", 4.81, 0.52),
    ("Completeness", 4.04, 0.53),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualityRatings {
    pub text_organization: u8,
    pub spelling_and_grammar: u8,
    pub abbreviation_expansion: u8,
    pub terminology_standardization: u8,
    pub completeness: u8,
}

impl QualityRatings {
    pub fn values(&self) -> [u8; 5] {
        [
            self.text_organization,
            self.spelling_and_grammar,
            self.abbreviation_expansion,
            self.terminology_standardization,
            self.completeness,
        ]
    }

    /// Ratings from raw integers in table order. Out-of-range values are an error.
    pub fn from_values(values: [i64; 5]) -> Result<Self, EvalError> {
        for (name, v) in RATING_NAMES.iter().zip(values) {
            if !(1..=5).contains(&v) {
                return Err(EvalError::OutOfRange { metric: name, value: v });
            }
        }
        Ok(Self::clamped(values))
    }

    fn clamped(values: [i64; 5]) -> Self {
        let c = |v: i64| v.clamp(1, 5) as u8;
        Self {
            text_organization: c(values[0]),
            spelling_and_grammar: c(values[1]),
            abbreviation_expansion: c(values[2]),
            terminology_standardization: c(values[3]),
            completeness: c(values[4]),
        }
    }
}

/// Upper bounds for ratings 5, 4, 3 and 2; anything above the last is 1.
/// `organization_core_sections` holds lower bounds instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatingThresholds {
    pub completeness_missing_ratio: [f64; 4],
    pub spelling_residual_oov_rate: [f64; 4],
    pub grammar_residual_fixes_per_line: [f64; 4],
    pub abbreviation_residual_ratio: [f64; 4],
    pub terminology_residual_ratio: [f64; 4],
    pub organization_core_sections: [usize; 4],
}

impl Default for RatingThresholds {
    fn default() -> Self {
        Self::from_json(crate::resources::RATING_THRESHOLDS_JSON).expect("built-in thresholds")
    }
}

impl RatingThresholds {
    pub fn from_json(json: &str) -> Result<Self, EvalError> {
        let t: Self = serde_json::from_str(json).map_err(|e| EvalError::Thresholds(e.to_string()))?;
        let ratios = [
            t.completeness_missing_ratio,
            t.spelling_residual_oov_rate,
            t.grammar_residual_fixes_per_line,
            t.abbreviation_residual_ratio,
            t.terminology_residual_ratio,
        ];
        if ratios.iter().any(|r| r.windows(2).any(|w| w[0] > w[1]) || r[0] < 0.0) {
            return Err(EvalError::Thresholds("ratio bounds must be non-negative and ascending".into()));
        }
        if t.organization_core_sections.windows(2).any(|w| w[0] < w[1]) {
            return Err(EvalError::Thresholds("section bounds must be descending".into()));
        }
        Ok(t)
    }

    fn bucket(bounds: &[f64; 4], value: f64) -> u8 {
        bounds.iter().position(|&b| value <= b).map_or(1, |i| 5 - i as u8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatingMode {
    Heuristic,
    LlmJudge,
}

fn residual_ratio(remaining: usize, handled: usize) -> f64 {
    if remaining + handled == 0 {
        0.0
    } else {
        remaining as f64 / (remaining + handled) as f64
    }
}

/// Measurable proxies for the five rubric dimensions.
///
/// * organization: populated core sections among HISTORY, EXAMINATION, IMPRESSION, PLAN
/// * spelling and grammar: the lower of the residual out-of-vocabulary rate rating and
///   the residual grammar fixes per line rating
/// * abbreviations and terminology: share of expandable items still present in the output
/// * completeness: missing-token ratio from [`completeness_check_with`]
pub fn rate_quality_heuristic(
    source: &SourceNote,
    standardized: &StandardizedNote,
    resources: &StandardizationResources,
    thresholds: &RatingThresholds,
) -> QualityRatings {
    use crate::note_model::Section;

    let core = [Section::History, Section::Examination, Section::Impression, Section::Plan];
    let populated = core
        .iter()
        .filter(|s| s.fields().any(|f| !standardized.field(f).trim().is_empty()))
        .count();
    let organization = thresholds
        .organization_core_sections
        .iter()
        .position(|&b| populated >= b)
        .map_or(1, |i| 5 - i as i64);

    let (mut eligible, mut oov, mut lines, mut grammar) = (0usize, 0usize, 0usize, 0u64);
    let (mut abbrevs_left, mut terms_left) = (0usize, 0usize);
    for f in NoteField::ALL {
        let text = standardized.field(f);
        if text.trim().is_empty() {
            continue;
        }
        for span in word_spans(text) {
            let w = &text[span];
            let plain = w.chars().all(|c| c.is_ascii_lowercase()) || (is_capitalized(w) && w.is_ascii());
            if w.len() < MIN_CORRECTABLE_LEN || !plain || is_all_caps(w) {
                continue;
            }
            eligible += 1;
            let lower = w.to_lowercase();
            if !resources.spelling.contains(&lower) && !resources.spelling.is_protected(&lower) {
                oov += 1;
            }
        }
        lines += text.lines().filter(|l| !l.trim().is_empty()).count();
        grammar += count_grammar_fixes(text).count;
        abbrevs_left += expand_abbreviations(text, &resources.abbreviations).events.len();
        terms_left += substitute_nonstandard_terms(text, &resources.terms).events.len();
    }
    let oov_rate = if eligible == 0 { 0.0 } else { oov as f64 / eligible as f64 };
    let fixes_per_line = if lines == 0 { 0.0 } else { grammar as f64 / lines as f64 };
    let spelling = RatingThresholds::bucket(&thresholds.spelling_residual_oov_rate, oov_rate)
        .min(RatingThresholds::bucket(&thresholds.grammar_residual_fixes_per_line, fixes_per_line));

    let m = &standardized.metrics;
    let abbreviation = RatingThresholds::bucket(
        &thresholds.abbreviation_residual_ratio,
        residual_ratio(abbrevs_left, m.abbreviations_expanded.len()),
    );
    let terminology = RatingThresholds::bucket(
        &thresholds.terminology_residual_ratio,
        residual_ratio(terms_left, m.non_standard_terms.len()),
    );

    let diff = completeness_check_with(source, standardized, &resources.headings);
    let completeness = RatingThresholds::bucket(&thresholds.completeness_missing_ratio, diff.missing_ratio());

    QualityRatings::clamped([
        organization,
        spelling as i64,
        abbreviation as i64,
        terminology as i64,
        completeness as i64,
    ])
}

/// Rubric prompt for a model judge.
pub fn judge_prompt(source: &SourceNote, standardized: &StandardizedNote) -> String {
    format!(
        "Rate the standardized clinical note against its source on five criteria, each from \
1 (poor) to 5 (excellent): {}.\nReply with only a JSON array of five integers in that order, \
for example [5,5,4,5,4].\n\nSource note:\n{}\n\nStandardized note:\n{}\n",
        RATING_NAMES.join(", "),
        source.note_text,
        to_pretty_json(standardized)
    )
}

/// First JSON array of five integers in `reply`, or an object keyed by rating name.
pub fn parse_judge_reply(reply: &str) -> Result<QualityRatings, EvalError> {
    let mut rest = reply;
    while let Some(start) = rest.find('[') {
        let tail = &rest[start..];
        if let Some(end) = tail.find(']') {
            if let Ok(values) = serde_json::from_str::<Vec<f64>>(&tail[..=end]) {
                if values.len() == 5 {
                    let ints: Vec<i64> = values.iter().map(|v| v.round() as i64).collect();
                    return Ok(QualityRatings::clamped(ints.try_into().expect("five values")));
                }
            }
        }
        rest = &tail[1..];
    }
    let start = reply.find('{').ok_or(EvalError::UnparseableJudgement)?;
    let end = reply.rfind('}').ok_or(EvalError::UnparseableJudgement)?;
    let obj: serde_json::Map<String, serde_json::Value> =
        serde_json::from_str(reply.get(start..=end).ok_or(EvalError::UnparseableJudgement)?)
            .map_err(|_| EvalError::UnparseableJudgement)?;
    let mut values = [0i64; 5];
    for (slot, name) in values.iter_mut().zip(RATING_NAMES) {
        let key = name.to_lowercase().replace(' ', "_");
        let v = obj
            .iter()
            .find(|(k, _)| k.as_str() == name || k.to_lowercase().replace(' ', "_") == key)
            .and_then(|(_, v)| v.as_f64())
            .ok_or(EvalError::UnparseableJudgement)?;
        *slot = v.round() as i64;
    }
    Ok(QualityRatings::clamped(values))
}

pub fn rate_quality_llm(
    source: &SourceNote,
    standardized: &StandardizedNote,
    judge: &dyn TextCompletion,
) -> Result<QualityRatings, EvalError> {
    let reply = judge
        .complete_text(&judge_prompt(source, standardized))
        .map_err(EvalError::Judge)?;
    parse_judge_reply(&reply)
}

/// Dispatch on `mode`. The judge is required for [`RatingMode::LlmJudge`].
pub fn rate_quality(
    source: &SourceNote,
    standardized: &StandardizedNote,
    mode: RatingMode,
    resources: &StandardizationResources,
    thresholds: &RatingThresholds,
    judge: Option<&dyn TextCompletion>,
) -> Result<QualityRatings, EvalError> {
    match (mode, judge) {
        (RatingMode::Heuristic, _) => Ok(rate_quality_heuristic(source, standardized, resources, thresholds)),
        (RatingMode::LlmJudge, Some(j)) => rate_quality_llm(source, standardized, j),
        (RatingMode::LlmJudge, None) => Err(EvalError::Judge("no judge model configured".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingRow {
    pub metric: String,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingsTable {
    pub n: usize,
    pub rows: Vec<RatingRow>,
}

impl RatingsTable {
    pub fn get(&self, metric: &str) -> Option<&RatingRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("Metric | Mean | SD\n");
        for r in &self.rows {
            out.push_str(&format!("{} | {:.2} | {:.2}\n", r.metric, r.mean, r.sd));
        }
        out
    }
}

/// Per-dimension mean and sample SD, in table order.
pub fn aggregate_ratings(ratings: &[QualityRatings]) -> Result<RatingsTable, EvalError> {
    if ratings.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let rows = RATING_NAMES
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let xs: Vec<f64> = ratings.iter().map(|r| r.values()[i] as f64).collect();
            let s = MetricSummary::from_samples(&xs, 1);
            RatingRow { metric: name.to_string(), mean: s.mean, sd: s.sd }
        })
        .collect();
    Ok(RatingsTable { n: ratings.len(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::builtin;
    use crate::rules::standardize_rule_based;

    fn r(v: [i64; 5]) -> QualityRatings {
        QualityRatings::from_values(v).unwrap()
    }

    #[test]
    fn aggregation() {
        let t = aggregate_ratings(&[r([5; 5]), r([5; 5])]).unwrap();
        assert!(t.rows.iter().all(|row| row.mean == 5.0 && row.sd == 0.0));
        let t = aggregate_ratings(&[r([5, 5, 5, 5, 4]), r([5; 5]), r([5; 5])]).unwrap();
        let c = t.get("Completeness").unwrap();
        assert_eq!((c.mean * 100.0).round() / 100.0, 4.67);
        assert_eq!((c.sd * 100.0).round() / 100.0, 0.58);
        assert_eq!(t.rows.iter().map(|r| r.metric.as_str()).collect::<Vec<_>>(), RATING_NAMES);
        assert_eq!(aggregate_ratings(&[]), Err(EvalError::EmptyInput));
    }

    #[test]
    fn range_checked() {
        assert!(matches!(
            QualityRatings::from_values([0, 5, 5, 5, 5]),
            Err(EvalError::OutOfRange { metric: "Text Organization", value: 0 })
        ));
    }

    #[test]
    fn judge_replies() {
        assert_eq!(parse_judge_reply("[5,5,4,5,4]").unwrap().values(), [5, 5, 4, 5, 4]);
        assert_eq!(parse_judge_reply("Ratings: [1, 2] then [5, 5, 4, 5, 9]").unwrap().values(), [5, 5, 4, 5, 5]);
        let obj = r#"{"text_organization":4,"spelling_and_grammar":5,"abbreviation_expansion":5,
            "terminology_standardization":3,"completeness":4}"#;
        assert_eq!(parse_judge_reply(obj).unwrap().values(), [4, 5, 5, 3, 4]);
        assert_eq!(parse_judge_reply("excellent"), Err(EvalError::UnparseableJudgement));
        let judge = |_: &str| Ok::<_, String>("[5,5,4,5,4]".to_string());
        let src = SourceNote::new("1", "x");
        let out = rate_quality_llm(&src, &StandardizedNote::default(), &judge).unwrap();
        assert_eq!(out.values(), [5, 5, 4, 5, 4]);
    }

    #[test]
    fn threshold_buckets() {
        let t = RatingThresholds::default();
        let b = |v| RatingThresholds::bucket(&t.completeness_missing_ratio, v);
        assert_eq!([b(0.0), b(0.01), b(0.05), b(0.2), b(0.3)], [5, 4, 3, 2, 1]);
        assert!(RatingThresholds::from_json(r#"{"completeness_missing_ratio":[0.5,0.1,0.2,0.3]}"#).is_err());
    }

    const NOTE: &str = "CC: numbnes in legs\nHPI: 45 yo F w/ MS, heart attack hx. BP 120/80 stable on Copaxone.\n\
Exam: alert, oriented, strength 5/5 throughout, reflexes 2+ symmetric.\n\
Impression: relapsing remitting multiple sclerosis, stable\nPlan: MRI brain in 6 months, return visit in one year";

    #[test]
    fn heuristic_on_rule_output() {
        let src = SourceNote::new("1", NOTE);
        let out = standardize_rule_based(&src, builtin());
        let q = rate_quality_heuristic(&src, &out, builtin(), &RatingThresholds::default());
        assert_eq!(q.completeness, 5);
        assert_eq!(q.abbreviation_expansion, 5);
        assert_eq!(q.terminology_standardization, 5);
        assert_eq!(q.text_organization, 5);
    }

    #[test]
    fn heavy_deletion_rates_low() {
        let src = SourceNote::new("1", NOTE);
        let mut out = standardize_rule_based(&src, builtin());
        out.impression.assessment.clear();
        out.plan.testing.clear();
        out.plan.return_visit.clear();
        let diff = super::super::completeness_check(&src, &out);
        assert!(diff.missing_ratio() > 0.25, "{}", diff.missing_ratio());
        let q = rate_quality_heuristic(&src, &out, builtin(), &RatingThresholds::default());
        assert!(q.completeness <= 2);
    }
}

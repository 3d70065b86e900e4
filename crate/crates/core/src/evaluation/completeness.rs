use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::SourceNote;
use crate::note_model::StandardizedNote;
use crate::rules::{segment_sections, HeadingSynonyms};
use crate::text::lower_tokens;

/// Function words ignored when diffing. Numerals are never stop words.
pub const STOP_WORDS: [&str; 50] = [
    "a", "an", "the", "and", "or", "but", "of", "to", "in", "on", "at", "by", "for", "with", "from", "as", "is",
    "was", "are", "were", "be", "been", "being", "it", "its", "this", "that", "these", "those", "there", "then",
    "than", "so", "if", "into", "onto", "over", "under", "up", "down", "out", "about", "after", "before", "he",
    "she", "they", "his", "her", "their",
];

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContentDiff {
    /// Source tokens with no counterpart in the standardized note.
    pub missing_tokens: Vec<String>,
    /// Standardized tokens with no counterpart in the source.
    pub added_tokens: Vec<String>,
    /// Ledger events whose left side was found and rewritten.
    pub ledger_explained: u64,
    /// Source tokens compared, after stop-word removal.
    pub source_tokens: u64,
}

impl ContentDiff {
    pub fn missing_ratio(&self) -> f64 {
        if self.source_tokens == 0 {
            0.0
        } else {
            self.missing_tokens.len() as f64 / self.source_tokens as f64
        }
    }
}

/// Split a ledger event such as `"MRI -> magnetic resonance imaging (MRI)"`.
pub fn parse_event(event: &str) -> Option<(&str, &str)> {
    ["->", "→", "=>"]
        .iter()
        .find_map(|sep| event.split_once(sep))
        .map(|(a, b)| (a.trim(), b.trim()))
}

type Bag = BTreeMap<String, i64>;

fn add(bag: &mut Bag, tokens: impl IntoIterator<Item = String>, sign: i64) {
    for t in tokens {
        *bag.entry(t).or_insert(0) += sign;
    }
}

fn residual(a: &Bag, b: &Bag) -> Vec<String> {
    let mut out = Vec::new();
    for (t, &n) in a {
        let extra = n - b.get(t).copied().unwrap_or(0);
        if extra > 0 && !STOP_WORDS.contains(&t.as_str()) {
            out.extend(std::iter::repeat_n(t.clone(), extra as usize));
        }
    }
    out
}

/// Compare with the built-in heading table.
pub fn completeness_check(source: &SourceNote, standardized: &StandardizedNote) -> ContentDiff {
    completeness_check_with(source, standardized, &crate::resources::builtin().headings)
}

/// Token-multiset comparison of source and standardized text.
///
/// Recognized heading labels are removed from the source first. Each Metrics
/// event `a -> b` whose `a` tokens are all present is applied as a rewrite of
/// the source bag. Stop words are ignored on both sides.
pub fn completeness_check_with(
    source: &SourceNote,
    standardized: &StandardizedNote,
    headings: &HeadingSynonyms,
) -> ContentDiff {
    let mut src = Bag::new();
    for text in segment_sections(&source.note_text, headings).values() {
        add(&mut src, lower_tokens(text), 1);
    }
    let m = &standardized.metrics;
    let mut explained = 0;
    for event in m.spelling_errors.iter().chain(&m.non_standard_terms).chain(&m.abbreviations_expanded) {
        let Some((from, to)) = parse_event(event) else { continue };
        let from = lower_tokens(from);
        let mut need = Bag::new();
        add(&mut need, from.iter().cloned(), 1);
        if need.iter().all(|(t, n)| src.get(t).copied().unwrap_or(0) >= *n) {
            add(&mut src, from, -1);
            add(&mut src, lower_tokens(to), 1);
            explained += 1;
        }
    }
    let mut out = Bag::new();
    add(&mut out, lower_tokens(&standardized.content_text()), 1);
    let source_tokens = src
        .iter()
        .filter(|(t, _)| !STOP_WORDS.contains(&t.as_str()))
        .map(|(_, n)| (*n).max(0) as u64)
        .sum();
    ContentDiff {
        missing_tokens: residual(&src, &out),
        added_tokens: residual(&out, &src),
        ledger_explained: explained,
        source_tokens,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{standardize_rule_based, DUPLICABLE_WORDS};

    #[test]
    fn stop_list_covers_removable_words() {
        assert!(DUPLICABLE_WORDS.iter().all(|w| STOP_WORDS.contains(w)));
        assert!(STOP_WORDS.iter().all(|w| !w.chars().any(|c| c.is_ascii_digit())));
    }

    #[test]
    fn rule_output_loses_nothing() {
        let src = SourceNote::new("1", "CC: numbnes\nHPI: pt w/ heart attack hx, BP 120/80.\nPlan: MRI the the brain");
        let out = standardize_rule_based(&src, crate::resources::builtin());
        let d = completeness_check(&src, &out);
        assert!(d.missing_tokens.is_empty(), "{d:?}");
        assert!(d.added_tokens.is_empty(), "{d:?}");
        assert!(d.ledger_explained >= 4);
    }

    #[test]
    fn deleted_impression_is_reported() {
        let src = SourceNote::new("1", "History: stable\nImpression: relapsing optic neuritis 2019");
        let mut out = standardize_rule_based(&src, crate::resources::builtin());
        out.impression.assessment.clear();
        let d = completeness_check(&src, &out);
        assert_eq!(d.missing_tokens, ["2019", "neuritis", "optic", "relapsing"]);
    }

    #[test]
    fn identical_text_is_clean() {
        let src = SourceNote::new("1", "Alert and oriented.");
        let mut out = StandardizedNote::default();
        out.history.interim_history = "Alert and oriented.".into();
        assert_eq!(completeness_check(&src, &out).missing_tokens, Vec::<String>::new());
    }

    #[test]
    fn event_separators() {
        assert_eq!(parse_event("BP -> blood pressure"), Some(("BP", "blood pressure")));
        assert_eq!(parse_event("BP → blood pressure"), Some(("BP", "blood pressure")));
        assert_eq!(parse_event("blood pressure"), None);
    }
}

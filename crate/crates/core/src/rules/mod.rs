//! Deterministic rule-based standardization.

mod abbreviations;
mod grammar;
pub mod lexicon;
mod sections;
mod spelling;
mod terms;

use thiserror::Error;

pub use abbreviations::{disambiguate, expand_abbreviations, CONTEXT_WINDOW};
pub use grammar::{count_grammar_fixes, is_sentence_like, GrammarOutcome, DUPLICABLE_WORDS};
pub use lexicon::{
    osa_distance, AbbreviationEntry, AbbreviationLexicon, Expansion, HeadingRule, HeadingSynonyms,
    ResourceError, SectionDefault, SpellLexicon, SpellingConfig, Suggestion, TermMap, TermPair,
};
pub use sections::{segment_sections, Segments};
pub use spelling::{correct_spelling, correction_for, MIN_CORRECTABLE_LEN, MIN_LEN_FOR_DISTANCE_2};
pub use terms::substitute_nonstandard_terms;

use crate::corpus::SourceNote;
use crate::note_model::{NoteField, StandardizedNote};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("unknown abbreviation `{0}`")]
    UnknownAbbreviation(String),
}

/// Rewritten text plus `"before -> after"` events in left-to-right order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Rewrite {
    pub text: String,
    pub events: Vec<String>,
}

/// Everything the rule engine needs. Immutable once built and safe to share.
#[derive(Debug, Clone)]
pub struct StandardizationResources {
    pub abbreviations: AbbreviationLexicon,
    pub terms: TermMap,
    pub spelling: SpellLexicon,
    pub headings: HeadingSynonyms,
}

impl StandardizationResources {
    /// Bundle resources. Abbreviation keys and the words of non-standard
    /// phrases become protected spellings so correction never rewrites them.
    pub fn new(
        abbreviations: AbbreviationLexicon,
        terms: TermMap,
        mut spelling: SpellLexicon,
        headings: HeadingSynonyms,
    ) -> Self {
        spelling.protect(
            abbreviations
                .entries()
                .iter()
                .flat_map(|e| e.abbrev.split(['/', '&']).map(str::to_string).collect::<Vec<_>>()),
        );
        spelling.protect(
            terms
                .pairs()
                .iter()
                .flat_map(|p| crate::text::lower_tokens(&p.nonstandard)),
        );
        Self { abbreviations, terms, spelling, headings }
    }
}

/// Standardize one note: segment, then per leaf run spelling, terms,
/// abbreviations and grammar, recording every rewrite in the metrics.
pub fn standardize_rule_based(note: &SourceNote, resources: &StandardizationResources) -> StandardizedNote {
    let segments = segment_sections(&note.note_text, &resources.headings);
    let mut out = StandardizedNote::default();
    for field in NoteField::ALL {
        let text = &segments[&field];
        if text.is_empty() {
            continue;
        }
        let spelled = correct_spelling(text, &resources.spelling);
        let termed = substitute_nonstandard_terms(&spelled.text, &resources.terms);
        let expanded = expand_abbreviations(&termed.text, &resources.abbreviations);
        let graded = count_grammar_fixes(&expanded.text);
        let m = &mut out.metrics;
        m.spelling_errors.extend(spelled.events);
        m.non_standard_terms.extend(termed.events);
        m.abbreviations_expanded.extend(expanded.events);
        m.grammatical_errors += graded.count;
        *out.field_mut(field) = graded.text;
    }
    out
}

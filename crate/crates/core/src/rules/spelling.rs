use super::lexicon::{SpellLexicon, Suggestion};
use super::Rewrite;
use crate::text::{is_all_caps, is_capitalized, word_spans};

/// Tokens shorter than this are never corrected.
pub const MIN_CORRECTABLE_LEN: usize = 4;
/// Distance-2 candidates are only considered for tokens at least this long.
pub const MIN_LEN_FOR_DISTANCE_2: usize = 6;

/// Replace out-of-vocabulary words that have exactly one closest vocabulary
/// word. Acronyms, mixed-case words, words with digits, protected terms and
/// short words are left alone.
pub fn correct_spelling(text: &str, lexicon: &SpellLexicon) -> Rewrite {
    let mut out = String::with_capacity(text.len());
    let mut events = Vec::new();
    let mut cursor = 0;
    for span in word_spans(text) {
        let token = &text[span.clone()];
        if let Some(fixed) = correction_for(token, lexicon) {
            out.push_str(&text[cursor..span.start]);
            out.push_str(&fixed);
            events.push(format!("{token} -> {fixed}"));
            cursor = span.end;
        }
    }
    out.push_str(&text[cursor..]);
    Rewrite { text: out, events }
}

/// The replacement for one token, if it should be corrected.
pub fn correction_for(token: &str, lexicon: &SpellLexicon) -> Option<String> {
    if token.len() < MIN_CORRECTABLE_LEN || !token.bytes().all(|b| b.is_ascii_alphabetic()) {
        return None;
    }
    if is_all_caps(token) {
        return None;
    }
    let capitalized = is_capitalized(token);
    if !capitalized && token.bytes().any(|b| b.is_ascii_uppercase()) {
        return None;
    }
    let lower = token.to_ascii_lowercase();
    if lexicon.contains(&lower) || lexicon.is_protected(&lower) {
        return None;
    }
    let max = if lower.len() >= MIN_LEN_FOR_DISTANCE_2 {
        lexicon.max_edit_distance()
    } else {
        1
    };
    match lexicon.suggest(&lower, max) {
        Suggestion::Unique { word, .. } if capitalized => Some(crate::text::capitalize_first(&word)),
        Suggestion::Unique { word, .. } => Some(word),
        _ => None,
    }
}

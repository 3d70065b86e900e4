use std::collections::HashSet;
use std::ops::Range;

use super::lexicon::{AbbreviationEntry, AbbreviationLexicon};
use super::{Rewrite, RuleError};
use crate::text::{capitalize_first, lower_tokens, word_spans};

/// Tokens on each side of an ambiguous abbreviation used as its context.
pub const CONTEXT_WINDOW: usize = 10;

/// Alphanumeric runs optionally joined by single `/` or `&` (`f/u`, `A&O`),
/// with the byte ranges of their alphanumeric parts.
pub(crate) fn compound_tokens(text: &str) -> Vec<(Range<usize>, Vec<Range<usize>>)> {
    let spans = word_spans(text);
    let mut out: Vec<(Range<usize>, Vec<Range<usize>>)> = Vec::new();
    for span in spans {
        if let Some((whole, parts)) = out.last_mut() {
            let gap = &text[whole.end..span.start];
            if gap == "/" || gap == "&" {
                whole.end = span.end;
                parts.push(span);
                continue;
            }
        }
        out.push((span.clone(), vec![span]));
    }
    out
}

struct Occurrence<'a> {
    range: Range<usize>,
    entry: &'a AbbreviationEntry,
    capitalize: bool,
}

/// Replace every whole-token abbreviation with its selected expansion.
pub fn expand_abbreviations(text: &str, lexicon: &AbbreviationLexicon) -> Rewrite {
    let mut found = Vec::new();
    for (whole, parts) in compound_tokens(text) {
        if let Some((entry, capitalize)) = lexicon.lookup(&text[whole.clone()]) {
            found.push(Occurrence { range: whole, entry, capitalize });
        } else if parts.len() > 1 {
            for part in parts {
                if let Some((entry, capitalize)) = lexicon.lookup(&text[part.clone()]) {
                    found.push(Occurrence { range: part, entry, capitalize });
                }
            }
        }
    }
    if found.is_empty() {
        return Rewrite { text: text.to_string(), events: Vec::new() };
    }
    let words = word_spans(text);
    let mut out = String::with_capacity(text.len() * 2);
    let mut events = Vec::new();
    let mut cursor = 0;
    for occ in found {
        let token = &text[occ.range.clone()];
        if already_expanded(text, &occ.range, occ.entry) {
            continue;
        }
        let expansion = if occ.entry.is_ambiguous() {
            let window = context_window(text, &words, &occ.range);
            choose_expansion(occ.entry, &window)
        } else {
            occ.entry.expansions[0].expansion.as_str()
        };
        let mut replacement = if occ.capitalize {
            capitalize_first(expansion)
        } else {
            expansion.to_string()
        };
        if occ.entry.retain_original_in_parens {
            replacement = format!("{replacement} ({token})");
        }
        out.push_str(&text[cursor..occ.range.start]);
        out.push_str(&replacement);
        events.push(format!("{token} -> {replacement}"));
        cursor = occ.range.end;
    }
    out.push_str(&text[cursor..]);
    Rewrite { text: out, events }
}

/// `expansion (KEY)` is the retained form; the parenthesized key is not expanded again.
fn already_expanded(text: &str, range: &Range<usize>, entry: &AbbreviationEntry) -> bool {
    let Some(before) = text[..range.start].strip_suffix('(') else {
        return false;
    };
    if !text[range.end..].starts_with(')') {
        return false;
    }
    let before = before.trim_end().to_lowercase();
    entry.expansions.iter().any(|x| {
        let exp = x.expansion.to_lowercase();
        before.ends_with(&exp)
            && before[..before.len() - exp.len()]
                .chars()
                .next_back()
                .is_none_or(|c| !c.is_alphanumeric())
    })
}

fn context_window(text: &str, words: &[Range<usize>], range: &Range<usize>) -> Vec<String> {
    let before = words.iter().filter(|w| w.end <= range.start).collect::<Vec<_>>();
    let after = words.iter().filter(|w| w.start >= range.end);
    before[before.len().saturating_sub(CONTEXT_WINDOW)..]
        .iter()
        .copied()
        .chain(after.take(CONTEXT_WINDOW))
        .map(|w| text[w.clone()].to_lowercase())
        .collect()
}

fn cue_hits(cues: &[String], window: &[String]) -> usize {
    let set: HashSet<&str> = window.iter().map(String::as_str).collect();
    cues.iter()
        .filter(|cue| {
            let words = lower_tokens(cue);
            match words.len() {
                0 => false,
                1 => set.contains(words[0].as_str()),
                n => window.windows(n).any(|w| w == words.as_slice()),
            }
        })
        .count()
}

/// Most cue hits wins, then priority; no hits falls back to the default.
fn choose_expansion<'a>(entry: &'a AbbreviationEntry, window: &[String]) -> &'a str {
    entry
        .expansions
        .iter()
        .map(|x| (cue_hits(&x.context_cues, window), x.priority, x))
        .filter(|(hits, _, _)| *hits > 0)
        .max_by_key(|(hits, priority, _)| (*hits, *priority))
        .map(|(_, _, x)| x)
        .unwrap_or_else(|| entry.default_expansion())
        .expansion
        .as_str()
}

/// Pick the expansion of `abbrev` that fits the surrounding `window` text.
pub fn disambiguate(abbrev: &str, window: &str, lexicon: &AbbreviationLexicon) -> Result<String, RuleError> {
    let (entry, capitalize) = lexicon
        .lookup(abbrev)
        .ok_or_else(|| RuleError::UnknownAbbreviation(abbrev.to_string()))?;
    let chosen = choose_expansion(entry, &lower_tokens(window));
    Ok(if capitalize { capitalize_first(chosen) } else { chosen.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> &'static AbbreviationLexicon {
        &crate::resources::builtin().abbreviations
    }

    #[test]
    fn documented_examples() {
        let r = expand_abbreviations("BP 120/80", lex());
        assert_eq!(r.text, "blood pressure 120/80");
        assert_eq!(r.events, vec!["BP -> blood pressure"]);
        assert_eq!(
            expand_abbreviations("MRI of brain", lex()).text,
            "magnetic resonance imaging (MRI) of brain"
        );
        assert_eq!(expand_abbreviations("OU with pain", lex()).text, "both eyes with pain");
        let r = expand_abbreviations("", lex());
        assert_eq!(r.text, "");
        assert!(r.events.is_empty());
    }

    #[test]
    fn disambiguation() {
        assert_eq!(disambiguate("MS", "history of MS with optic neuritis", lex()).unwrap(), "multiple sclerosis");
        assert_eq!(disambiguate("MS", "MS exam: alert and oriented", lex()).unwrap(), "mental status");
        let default = lex().get("MS").unwrap().default_expansion().expansion.clone();
        assert_eq!(disambiguate("MS", "MS.", lex()).unwrap(), default);
        assert!(matches!(disambiguate("QQQ", "", lex()), Err(RuleError::UnknownAbbreviation(_))));
    }

    #[test]
    fn expansion_uses_context() {
        let r = expand_abbreviations("MS: alert, oriented and attentive.", lex());
        assert_eq!(r.text, "mental status (MS): alert, oriented and attentive.");
    }

    #[test]
    fn compound_and_capitalized_keys() {
        let r = expand_abbreviations("RTC for f/u. BP/HR stable.", lex());
        assert!(r.events.iter().any(|e| e.starts_with("f/u -> ")), "{:?}", r.events);
        assert!(r.events.iter().any(|e| e.starts_with("BP -> ")));
        assert!(r.events.iter().any(|e| e.starts_with("HR -> ")));
    }

    #[test]
    fn idempotent_on_own_output() {
        let once = expand_abbreviations("MRI and MS with optic neuritis, BP ok, f/u PRN", lex());
        let twice = expand_abbreviations(&once.text, lex());
        assert!(twice.events.is_empty(), "{:?}", twice.events);
        assert_eq!(twice.text, once.text);
    }

    #[test]
    fn non_matching_text_is_untouched() {
        let text = "Ambulating well; no complaints.";
        assert_eq!(expand_abbreviations(text, lex()).text, text);
    }
}

//! The fixed grammar rule set. Applied per line, in this order:
//!
//! 1. a repeated function word (`the the`) separated only by whitespace is removed;
//! 2. whitespace before `, ; . ? !` is removed when the mark ends a clause;
//! 3. an all-lowercase word at line start or after `. ! ?` and whitespace is capitalized;
//! 4. a sentence-like line without closing punctuation gets a final `.`.
//!
//! Each application counts as one fix.

use crate::text::word_spans;

/// Function words whose immediate repetition is treated as a typo.
pub const DUPLICABLE_WORDS: &[&str] = &[
    "the", "a", "an", "of", "and", "to", "in", "on", "with", "for", "is", "was", "at", "by",
];

/// Words whose trailing period does not end a sentence.
const NON_TERMINAL: &[&str] = &["dr", "mr", "mrs", "ms", "vs", "st", "approx", "etc", "no"];

const SPACED_PUNCT: &[char] = &[',', ';', '.', '?', '!'];
const CLOSING: &[char] = &['.', '!', '?', ':', ';', ',', '-'];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrammarOutcome {
    pub text: String,
    pub count: u64,
}

pub fn count_grammar_fixes(text: &str) -> GrammarOutcome {
    let mut count = 0;
    let lines: Vec<String> = text
        .split('\n')
        .map(|line| {
            let (l, a) = remove_duplicate_words(line);
            let (l, b) = remove_space_before_punct(&l);
            let (l, c) = capitalize_sentences(&l);
            let (l, d) = terminate_sentence(&l);
            count += a + b + c + d;
            l
        })
        .collect();
    GrammarOutcome { text: lines.join("\n"), count }
}

fn remove_duplicate_words(line: &str) -> (String, u64) {
    let spans = word_spans(line);
    let mut out = String::with_capacity(line.len());
    let mut count = 0;
    let mut cursor = 0;
    let mut prev: Option<(String, usize)> = None;
    for span in spans {
        let word = line[span.clone()].to_lowercase();
        if let Some((p, gap_start)) = &prev {
            let gap = &line[*gap_start..span.start];
            if *p == word
                && DUPLICABLE_WORDS.contains(&word.as_str())
                && !gap.is_empty()
                && gap.chars().all(char::is_whitespace)
            {
                out.push_str(&line[cursor..*gap_start]);
                cursor = span.end;
                count += 1;
                prev = Some((word, span.end));
                continue;
            }
        }
        prev = Some((word, span.end));
    }
    out.push_str(&line[cursor..]);
    (out, count)
}

fn remove_space_before_punct(line: &str) -> (String, u64) {
    let chars: Vec<char> = line.chars().collect();
    let mut out = String::with_capacity(line.len());
    let mut count = 0;
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == ' ' || chars[i] == '\t' {
            let mut j = i;
            while j < chars.len() && (chars[j] == ' ' || chars[j] == '\t') {
                j += 1;
            }
            let preceded = i > 0;
            let ends_clause = j < chars.len()
                && SPACED_PUNCT.contains(&chars[j])
                && chars.get(j + 1).is_none_or(|c| c.is_whitespace());
            if preceded && ends_clause {
                count += 1;
            } else {
                out.extend(&chars[i..j]);
            }
            i = j;
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    (out, count)
}

fn capitalize_sentences(line: &str) -> (String, u64) {
    let spans = word_spans(line);
    let mut starts = Vec::new();
    if let Some(first) = line.char_indices().find(|(_, c)| !c.is_whitespace()) {
        starts.push(first.0);
    }
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if matches!(b, b'.' | b'!' | b'?') {
            let rest = &line[i + 1..];
            let trimmed = rest.trim_start();
            if trimmed.len() == rest.len() || trimmed.is_empty() {
                continue;
            }
            if b == b'.' {
                let before = spans.iter().rev().find(|s| s.end == i);
                if let Some(s) = before {
                    let w = line[s.clone()].to_lowercase();
                    if w.chars().count() == 1 || NON_TERMINAL.contains(&w.as_str()) {
                        continue;
                    }
                }
            }
            starts.push(i + 1 + (rest.len() - trimmed.len()));
        }
    }
    let mut out = line.to_string();
    let mut count = 0;
    for start in starts {
        let Some(span) = spans.iter().find(|s| s.start == start) else {
            continue;
        };
        let word = &line[span.clone()];
        if word.chars().all(|c| c.is_ascii_lowercase()) {
            out.replace_range(start..start + 1, &word[..1].to_ascii_uppercase());
            count += 1;
        }
    }
    (out, count)
}

/// At least two purely alphabetic words, starting with a letter, containing
/// lowercase letters, and not already closed by punctuation.
pub fn is_sentence_like(line: &str) -> bool {
    let trimmed = line.trim();
    let alpha_words = word_spans(trimmed)
        .into_iter()
        .filter(|s| trimmed[s.clone()].chars().all(char::is_alphabetic))
        .count();
    alpha_words >= 2
        && trimmed.starts_with(char::is_alphabetic)
        && trimmed.chars().any(char::is_lowercase)
        && !trimmed.ends_with(CLOSING)
}

fn terminate_sentence(line: &str) -> (String, u64) {
    if !is_sentence_like(line) {
        return (line.to_string(), 0);
    }
    let end = line.trim_end().len();
    let mut out = String::with_capacity(line.len() + 1);
    out.push_str(&line[..end]);
    out.push('.');
    out.push_str(&line[end..]);
    (out, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fix(s: &str) -> (String, u64) {
        let g = count_grammar_fixes(s);
        (g.text, g.count)
    }

    #[test]
    fn rule_examples() {
        assert_eq!(fix("the the patient walks"), ("The patient walks.".into(), 3));
        assert_eq!(fix("Patient is stable."), ("Patient is stable.".into(), 0));
        assert_eq!(fix("patient improved"), ("Patient improved.".into(), 2));
        assert_eq!(fix(""), (String::new(), 0));
    }

    #[test]
    fn individual_rules() {
        assert_eq!(fix("Seen in in clinic today."), ("Seen in clinic today.".into(), 1));
        assert_eq!(fix("Vision is blurry , worse today ."), ("Vision is blurry, worse today.".into(), 2));
        assert_eq!(fix("Stable. no new symptoms."), ("Stable. No new symptoms.".into(), 1));
        assert_eq!(fix("Seen by Dr. smith today."), ("Seen by Dr. smith today.".into(), 0));
        assert_eq!(fix("Gait steady"), ("Gait steady.".into(), 1));
        assert_eq!(fix("120/80 mmHg"), ("120/80 mmHg".into(), 0));
        assert_eq!(fix("MRI BRAIN"), ("MRI BRAIN".into(), 0));
        assert_eq!(fix("pH normal."), ("pH normal.".into(), 0));
    }

    #[test]
    fn content_words_are_not_deduplicated() {
        assert_eq!(fix("Very very tired."), ("Very very tired.".into(), 0));
    }

    #[test]
    fn second_pass_is_clean() {
        for s in ["the the patient walks", "a  a b , c . d", "no new deficits\nstill stable"] {
            let once = count_grammar_fixes(s);
            assert_eq!(count_grammar_fixes(&once.text).count, 0, "{s:?} -> {:?}", once.text);
        }
    }

    #[test]
    fn lines_are_independent() {
        assert_eq!(fix("first line\nsecond line"), ("First line.\nSecond line.".into(), 4));
    }
}

use super::lexicon::TermMap;
use super::Rewrite;
use crate::text::{capitalize_first, word_spans};

/// Longest-match, case-insensitive phrase substitution at word boundaries.
/// Phrase words must be separated by whitespace only. A capitalized first
/// word carries its capital over to the replacement.
pub fn substitute_nonstandard_terms(text: &str, map: &TermMap) -> Rewrite {
    let spans = word_spans(text);
    let lower: Vec<String> = spans.iter().map(|s| text[s.clone()].to_lowercase()).collect();
    let mut out = String::with_capacity(text.len());
    let mut events = Vec::new();
    let mut cursor = 0;
    let mut i = 0;
    while i < spans.len() {
        let matched = map.index.get(&lower[i]).and_then(|candidates| {
            candidates.iter().find(|(words, _)| {
                i + words.len() <= spans.len()
                    && words.iter().enumerate().all(|(k, w)| {
                        lower[i + k] == *w
                            && (k == 0
                                || text[spans[i + k - 1].end..spans[i + k].start]
                                    .chars()
                                    .all(char::is_whitespace))
                    })
            })
        });
        let Some((words, pair)) = matched else {
            i += 1;
            continue;
        };
        let start = spans[i].start;
        let end = spans[i + words.len() - 1].end;
        let surface = &text[start..end];
        let standard = &map.pair(*pair).standard;
        let replacement = if surface.starts_with(|c: char| c.is_uppercase()) {
            capitalize_first(standard)
        } else {
            standard.clone()
        };
        out.push_str(&text[cursor..start]);
        out.push_str(&replacement);
        events.push(format!("{surface} -> {replacement}"));
        cursor = end;
        i += words.len();
    }
    out.push_str(&text[cursor..]);
    Rewrite { text: out, events }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::lexicon::TermPair;

    fn map() -> &'static TermMap {
        &crate::resources::builtin().terms
    }

    #[test]
    fn documented_examples() {
        assert_eq!(substitute_nonstandard_terms("prior heart attack", map()).text, "prior myocardial infarction");
        assert_eq!(substitute_nonstandard_terms("upgoing toe noted", map()).text, "Babinski sign noted");
        let r = substitute_nonstandard_terms("feeling blue for weeks", map());
        assert_eq!(r.text, "symptoms of depression for weeks");
        assert_eq!(r.events, vec!["feeling blue -> symptoms of depression"]);
    }

    #[test]
    fn longest_match_and_capitalization() {
        let m = TermMap::new(vec![
            TermPair { nonstandard: "sugar".into(), standard: "glucose".into() },
            TermPair { nonstandard: "high sugar".into(), standard: "hyperglycemia".into() },
        ])
        .unwrap();
        let r = substitute_nonstandard_terms("High sugar, sugar and high  sugar.", &m);
        assert_eq!(r.text, "Hyperglycemia, glucose and hyperglycemia.");
        assert_eq!(r.events.len(), 3);
        // punctuation between words blocks a phrase match
        assert_eq!(substitute_nonstandard_terms("high, sugar", &m).text, "high, glucose");
        assert_eq!(substitute_nonstandard_terms("sugary", &m).text, "sugary");
    }
}

use std::collections::HashMap;

use notestd_core::resources;
use notestd_core::rules::{
    expand_abbreviations, osa_distance, segment_sections, standardize_rule_based, Suggestion,
    DUPLICABLE_WORDS,
};
use notestd_core::text::lower_tokens;
use notestd_core::SourceNote;
use proptest::prelude::*;

/// Independent reference: scan the whole vocabulary.
fn brute_force(word: &str, max: usize) -> Suggestion {
    let lex = &resources::builtin().spelling;
    let mut best: Option<(usize, Vec<&str>)> = None;
    for w in lex.words() {
        let d = osa_distance(word.as_bytes(), w.as_bytes());
        if d == 0 || d > max {
            continue;
        }
        match &mut best {
            Some((bd, list)) if *bd == d => list.push(w),
            Some((bd, _)) if *bd < d => {}
            _ => best = Some((d, vec![w])),
        }
    }
    match best {
        None => Suggestion::NoCandidate,
        Some((distance, list)) if list.len() == 1 => Suggestion::Unique { word: list[0].to_string(), distance },
        Some((distance, list)) => Suggestion::Ambiguous { distance, count: list.len() },
    }
}

fn vocab_word() -> impl Strategy<Value = String> {
    let words = resources::builtin().spelling.words().to_vec();
    prop::sample::select(words)
}

fn mutate(word: String, edits: Vec<(u8, usize, char)>) -> String {
    let mut w: Vec<char> = word.chars().collect();
    for (kind, pos, c) in edits {
        if w.is_empty() {
            w.push(c);
            continue;
        }
        let i = pos % w.len();
        match kind % 4 {
            0 => w[i] = c,
            1 => w.insert(i, c),
            2 if w.len() > 1 => {
                w.remove(i);
            }
            _ if i + 1 < w.len() => w.swap(i, i + 1),
            _ => w.push(c),
        }
    }
    w.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 400, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn index_matches_brute_force(
        word in vocab_word(),
        edits in prop::collection::vec((0u8..4, 0usize..20, prop::char::range('a', 'z')), 1..3),
        max in 1usize..=2,
    ) {
        let typo = mutate(word, edits);
        prop_assert_eq!(resources::builtin().spelling.suggest(&typo, max), brute_force(&typo, max));
    }
}

fn fragment() -> impl Strategy<Value = String> {
    let res = resources::builtin();
    let abbrevs: Vec<String> = res.abbreviations.entries().iter().map(|e| e.abbrev.clone()).collect();
    let phrases: Vec<String> = res.terms.pairs().iter().map(|p| p.nonstandard.clone()).collect();
    let headings: Vec<String> = res.headings.rules().iter().map(|(p, _)| format!("\n{p}:")).collect();
    prop_oneof![
        4 => vocab_word(),
        2 => (vocab_word(), prop::collection::vec((0u8..4, 0usize..20, prop::char::range('a', 'z')), 1..2))
            .prop_map(|(w, e)| mutate(w, e)),
        2 => prop::sample::select(abbrevs),
        1 => prop::sample::select(phrases),
        1 => prop::sample::select(headings),
        1 => prop::sample::select(DUPLICABLE_WORDS.iter().map(|w| format!("{w} {w}")).collect::<Vec<_>>()),
        1 => prop::sample::select(vec![",".to_string(), ".".into(), " .".into(), "\n".into(), "120/80".into(), "(".into(), ")".into()]),
    ]
}

fn note_text() -> impl Strategy<Value = String> {
    prop::collection::vec(fragment(), 0..60).prop_map(|parts| parts.join(" "))
}

fn multiset(tokens: impl IntoIterator<Item = String>) -> HashMap<String, i64> {
    let mut m = HashMap::new();
    for t in tokens {
        *m.entry(t).or_insert(0) += 1;
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn content_is_preserved_through_the_ledger(text in note_text()) {
        let res = resources::builtin();
        let out = standardize_rule_based(&SourceNote::new("p", text.as_str()), res);
        let mut expected = multiset(segment_sections(&text, &res.headings).into_values().flat_map(|t| lower_tokens(&t)));
        let m = &out.metrics;
        for event in m.spelling_errors.iter().chain(&m.non_standard_terms).chain(&m.abbreviations_expanded) {
            let (from, to) = event.split_once(" -> ").expect("event shape");
            for t in lower_tokens(from) {
                *expected.entry(t).or_insert(0) -= 1;
            }
            for t in lower_tokens(to) {
                *expected.entry(t).or_insert(0) += 1;
            }
        }
        let actual = multiset(lower_tokens(&out.content_text()));
        let mut removed = 0;
        for (tok, n) in &expected {
            let got = actual.get(tok).copied().unwrap_or(0);
            prop_assert!(*n >= 0, "negative count for {tok}");
            prop_assert!(got <= *n, "token {tok} appeared without a ledger entry");
            if got < *n {
                prop_assert!(DUPLICABLE_WORDS.contains(&tok.as_str()), "token {tok} vanished");
                removed += n - got;
            }
        }
        prop_assert!(actual.keys().all(|k| expected.contains_key(k)));
        prop_assert!(removed as u64 <= m.grammatical_errors);
    }

    #[test]
    fn expansion_is_idempotent(text in note_text()) {
        let lex = &resources::builtin().abbreviations;
        let once = expand_abbreviations(&text, lex);
        let twice = expand_abbreviations(&once.text, lex);
        prop_assert!(twice.events.is_empty(), "{:?}", twice.events);
    }

    #[test]
    fn standardization_is_deterministic(text in note_text()) {
        let res = resources::builtin();
        let note = SourceNote::new("d", text);
        prop_assert_eq!(standardize_rule_based(&note, res), standardize_rule_based(&note, res));
    }
}

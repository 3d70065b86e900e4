use notestd_core::fixtures::MS_SUITE;
use notestd_core::resources::builtin;
use notestd_core::rules::{disambiguate, expand_abbreviations};

#[test]
fn ms_suite_resolves_by_cue_table() {
    let lex = &builtin().abbreviations;
    assert!(MS_SUITE.len() >= 20);
    for case in MS_SUITE {
        let window = case.context.replacen("MS", "", 1);
        assert_eq!(disambiguate("MS", &window, lex).unwrap(), case.expected, "{}", case.context);
        let out = expand_abbreviations(case.context, lex);
        let ms: Vec<_> = out.events.iter().filter(|e| e.starts_with("MS -> ")).collect();
        assert_eq!(ms, [&format!("MS -> {} (MS)", case.expected)], "{}", case.context);
    }
}

#[test]
fn cue_free_contexts_fall_back_to_default() {
    let entry = builtin().abbreviations.get("MS").unwrap();
    let cues: Vec<&str> = entry.expansions.iter().flat_map(|x| x.context_cues.iter().map(String::as_str)).collect();
    let bare: Vec<_> = MS_SUITE.iter().filter(|c| c.cue_free).collect();
    assert!(!bare.is_empty());
    for case in bare {
        let lower = case.context.to_lowercase();
        assert!(!lower.split(|c: char| !c.is_alphanumeric()).any(|w| cues.contains(&w)), "{}", case.context);
        assert_eq!(case.expected, entry.default_expansion().expansion);
    }
}

use notestd_core::corpus::{filter_notes, parse_corpus_csv, read_notes_jsonl, write_notes_jsonl};
use notestd_core::{FilterCriteria, SourceNote};
use proptest::prelude::*;

fn notes() -> impl Strategy<Value = Vec<SourceNote>> {
    prop::collection::vec("\\PC{1,120}".prop_filter("non-blank", |s| !s.trim().is_empty()), 1..20).prop_map(|texts| {
        texts.into_iter().enumerate().map(|(i, t)| SourceNote::new((i + 1).to_string(), t)).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn csv_round_trip(notes in notes()) {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["note_text"]).unwrap();
        for n in &notes {
            w.write_record([&n.note_text]).unwrap();
        }
        let bytes = w.into_inner().unwrap();
        prop_assert_eq!(parse_corpus_csv(bytes.as_slice(), "note_text", None).unwrap(), notes);
    }

    #[test]
    fn jsonl_round_trip(notes in notes()) {
        let mut buf = Vec::new();
        prop_assert_eq!(write_notes_jsonl(&notes, &mut buf).unwrap(), notes.len());
        prop_assert_eq!(read_notes_jsonl(buf.as_slice()).unwrap(), notes);
    }

    #[test]
    fn filter_is_idempotent_and_exact(notes in notes(), min in 0usize..100) {
        let criteria = FilterCriteria { min_chars: min, ..FilterCriteria::default() };
        let once = filter_notes(&notes, &criteria);
        prop_assert_eq!(filter_notes(&once, &criteria), once.clone());
        let expected: Vec<_> = notes.iter().filter(|n| n.note_text.chars().count() >= min).cloned().collect();
        prop_assert_eq!(once, expected);
    }
}

use std::time::Instant;

use notestd_core::evaluation::completeness_check;
use notestd_core::extraction::{dedup_mentions, extract_findings, extract_medications};
use notestd_core::fixtures::{generate_corpus, FixtureProfile, PlantKind};
use notestd_core::resources::{builtin, findings, medications};
use notestd_core::rules::standardize_rule_based;

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[test]
fn thousand_note_corpus_matches_profile_and_ledger() {
    let t = Instant::now();
    let profile = FixtureProfile::clinic();
    let (notes, ledgers) = generate_corpus(1000, 2024, &profile).unwrap();
    let generated = t.elapsed();
    let outputs: Vec<_> = notes.iter().map(|n| standardize_rule_based(n, builtin())).collect();
    eprintln!("generate {generated:?}, standardize {:?}", t.elapsed() - generated);

    let mut measured = [vec![], vec![], vec![], vec![]];
    for ((note, ledger), out) in notes.iter().zip(&ledgers).zip(&outputs) {
        assert_eq!(out.metrics, ledger.expected_metrics(&builtin().abbreviations), "{}", note.accession_num);
        let m = &out.metrics;
        measured[0].push(m.grammatical_errors as f64);
        measured[1].push(m.spelling_errors.len() as f64);
        measured[2].push(m.non_standard_terms.len() as f64);
        measured[3].push(m.abbreviations_expanded.len() as f64);
        assert_eq!(ledger.count(PlantKind::GrammarRule) as u64, m.grammatical_errors);
    }
    let targets = [profile.grammar, profile.spelling, profile.terms, profile.abbreviations];
    for (xs, t) in measured.iter().zip(targets) {
        let m = mean(xs);
        assert!((m - t.mean).abs() <= 0.1 * t.mean, "mean {m} vs {}", t.mean);
    }
    let lengths: Vec<f64> = notes.iter().map(|n| n.char_count() as f64).collect();
    eprintln!("mean length {} min {}", mean(&lengths), lengths.iter().copied().fold(f64::MAX, f64::min));
    assert!(lengths.iter().all(|&l| l >= profile.length.min as f64));
}

#[test]
fn rule_output_never_loses_content() {
    let (notes, _) = generate_corpus(1000, 99, &FixtureProfile { noise: 2.0, ..FixtureProfile::clinic() }).unwrap();
    for note in &notes {
        let out = standardize_rule_based(note, builtin());
        let diff = completeness_check(note, &out);
        assert!(diff.missing_tokens.is_empty(), "{}: {:?}", note.accession_num, diff.missing_tokens);
    }
}

#[test]
fn planted_mentions_are_extracted_only_where_allowed() {
    let (notes, ledgers) = generate_corpus(200, 5, &FixtureProfile::clinic()).unwrap();
    for (note, ledger) in notes.iter().zip(&ledgers) {
        let out = standardize_rule_based(note, builtin());
        let mut mentions = extract_medications(&note.accession_num, &out, medications());
        mentions.extend(extract_findings(&note.accession_num, &out, findings()));
        for m in &mentions {
            assert!(m.kind.allows_path(&m.section_path), "{m:?}");
        }
        for p in ledger.mentions.iter().filter(|p| p.extractable) {
            assert!(
                mentions.iter().any(|m| m.kind == p.kind && m.normalized == p.normalized && m.section_path == p.section_path),
                "{p:?} missing in {}",
                note.accession_num
            );
        }
        for p in ledger.mentions.iter().filter(|p| !p.extractable) {
            assert!(!mentions.iter().any(|m| m.section_path == p.section_path && m.normalized == p.normalized && m.kind == p.kind));
        }
        assert_eq!(dedup_mentions(mentions.clone()), mentions);
    }
}

#[test]
fn completeness_rating_is_monotone_in_deletions() {
    use notestd_core::evaluation::{rate_quality_heuristic, RatingThresholds};
    use notestd_core::NoteField;
    let (notes, _) = generate_corpus(30, 8, &FixtureProfile::clinic()).unwrap();
    let thresholds = RatingThresholds::default();
    for note in &notes {
        let mut out = standardize_rule_based(note, builtin());
        let mut last = (0usize, 5u8);
        for f in NoteField::ALL {
            out.field_mut(f).clear();
            let missing = completeness_check(note, &out).missing_tokens.len();
            let rating = rate_quality_heuristic(note, &out, builtin(), &thresholds).completeness;
            assert!(missing >= last.0);
            assert!(rating <= last.1, "{missing} missing rated {rating} after {last:?}");
            last = (missing, rating);
        }
        assert_eq!(last.1, 1);
    }
}

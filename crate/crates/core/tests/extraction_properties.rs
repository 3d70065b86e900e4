use std::collections::{BTreeMap, BTreeSet};

use notestd_core::extraction::{extract_findings, extract_medications, frequency_table, CountMode, MentionKind};
use notestd_core::fixtures::{generate_corpus, FixtureProfile};
use notestd_core::resources::{builtin, findings, medications};
use notestd_core::rules::standardize_rule_based;

#[test]
fn frequency_tables_equal_brute_force_counts() {
    let (notes, _) = generate_corpus(150, 31, &FixtureProfile::clinic()).unwrap();
    let mut mentions = Vec::new();
    for note in &notes {
        let out = standardize_rule_based(note, builtin());
        mentions.extend(extract_medications(&note.accession_num, &out, medications()));
        mentions.extend(extract_findings(&note.accession_num, &out, findings()));
    }
    assert!(mentions.iter().all(|m| m.kind.allows_path(&m.section_path)));
    for kind in [MentionKind::Medication, MentionKind::Finding] {
        let mut per_note: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        let mut raw: BTreeMap<&str, u64> = BTreeMap::new();
        for m in mentions.iter().filter(|m| m.kind == kind) {
            per_note.entry(&m.normalized).or_default().insert(&m.accession_num);
            *raw.entry(&m.normalized).or_default() += 1;
        }
        let table = frequency_table(&mentions, kind, CountMode::PerNote);
        let got: BTreeMap<&str, u64> = table.rows.iter().map(|r| (r.normalized.as_str(), r.count)).collect();
        let want: BTreeMap<&str, u64> = per_note.iter().map(|(k, v)| (*k, v.len() as u64)).collect();
        assert_eq!(got, want);
        assert!(table.rows.windows(2).all(|w| w[0].count >= w[1].count));
        let table = frequency_table(&mentions, kind, CountMode::Raw);
        let got: BTreeMap<&str, u64> = table.rows.iter().map(|r| (r.normalized.as_str(), r.count)).collect();
        assert_eq!(got, raw);
    }
}

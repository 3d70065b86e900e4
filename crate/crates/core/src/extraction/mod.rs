//! Medication and sign/symptom retrieval from standardized notes, with
//! corpus frequency tables.

mod gazetteer;
mod llm_mode;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

pub use gazetteer::{Gazetteer, GazetteerEntry, PhraseMatch};
pub use llm_mode::{extraction_prompt, parse_extraction_reply, ExtractionError, LlmExtractor};

use crate::note_model::{NoteField, Section, StandardizedNote};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MentionKind {
    Medication,
    Finding,
}

impl MentionKind {
    /// Sections searched for this kind of mention.
    pub fn sections(self) -> &'static [Section] {
        match self {
            MentionKind::Medication => &[Section::Plan],
            MentionKind::Finding => &[Section::History, Section::Examination, Section::Impression],
        }
    }

    pub fn fields(self) -> impl Iterator<Item = NoteField> {
        NoteField::ALL
            .into_iter()
            .filter(move |f| self.sections().contains(&f.section()))
    }

    pub fn allows_path(self, path: &str) -> bool {
        NoteField::from_path(path).is_some_and(|f| self.sections().contains(&f.section()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mention {
    pub accession_num: String,
    pub kind: MentionKind,
    /// Text as found in the note.
    pub surface: String,
    /// Lowercase canonical name.
    pub normalized: String,
    pub section_path: String,
}

/// Every gazetteer hit in the sections searched for `kind`, without deduplication.
pub fn scan_mentions(
    accession_num: &str,
    note: &StandardizedNote,
    gazetteer: &Gazetteer,
    kind: MentionKind,
) -> Vec<Mention> {
    let mut out = Vec::new();
    for field in kind.fields() {
        let text = note.field(field);
        for m in gazetteer.find_all(text) {
            out.push(Mention {
                accession_num: accession_num.to_string(),
                kind,
                surface: text[m.start..m.end].to_string(),
                normalized: m.normalized,
                section_path: field.path().to_string(),
            });
        }
    }
    out
}

/// Keep the first mention per normalized name (medications) or per
/// normalized name and section (findings).
pub fn dedup_mentions(mentions: Vec<Mention>) -> Vec<Mention> {
    let mut seen = HashSet::new();
    mentions
        .into_iter()
        .filter(|m| {
            let section = match m.kind {
                MentionKind::Medication => String::new(),
                MentionKind::Finding => m.section_path.clone(),
            };
            seen.insert((m.accession_num.clone(), m.kind, m.normalized.clone(), section))
        })
        .collect()
}

/// Medications named in PLAN, one mention per distinct medication.
pub fn extract_medications(accession_num: &str, note: &StandardizedNote, gazetteer: &Gazetteer) -> Vec<Mention> {
    dedup_mentions(scan_mentions(accession_num, note, gazetteer, MentionKind::Medication))
}

/// Signs and symptoms in HISTORY, EXAMINATION and IMPRESSION, one mention per
/// distinct finding per section path.
pub fn extract_findings(accession_num: &str, note: &StandardizedNote, gazetteer: &Gazetteer) -> Vec<Mention> {
    dedup_mentions(scan_mentions(accession_num, note, gazetteer, MentionKind::Finding))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMode {
    /// Number of notes mentioning the term.
    #[default]
    PerNote,
    /// Number of mentions.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub normalized: String,
    pub count: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub rows: Vec<FrequencyRow>,
    pub total_mentions: u64,
}

/// Counts for mentions of `kind`, most frequent first, ties alphabetical.
pub fn frequency_table(mentions: &[Mention], kind: MentionKind, mode: CountMode) -> FrequencyTable {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    let mut seen = HashSet::new();
    for m in mentions.iter().filter(|m| m.kind == kind) {
        if mode == CountMode::PerNote && !seen.insert((m.accession_num.as_str(), m.normalized.as_str())) {
            continue;
        }
        *counts.entry(&m.normalized).or_default() += 1;
    }
    let mut rows: Vec<FrequencyRow> = counts
        .into_iter()
        .map(|(n, c)| FrequencyRow { normalized: n.to_string(), count: c })
        .collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.normalized.cmp(&b.normalized)));
    FrequencyTable { total_mentions: rows.iter().map(|r| r.count).sum(), rows }
}

impl FrequencyTable {
    pub fn write_csv(&self, sink: impl std::io::Write) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["normalized", "count"])?;
        for r in &self.rows {
            w.write_record([r.normalized.as_str(), &r.count.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources;

    fn meds() -> &'static Gazetteer {
        resources::medications()
    }

    fn findings() -> &'static Gazetteer {
        resources::findings()
    }

    #[test]
    fn medications_from_plan_only() {
        let mut n = StandardizedNote::default();
        n.plan.testing = "Start ocrelizumab infusion.".into();
        n.plan.return_visit = "Continue baclofen 10 mg and Ocrevus.".into();
        n.history.interim_history = "Takes gabapentin.".into();
        let m = extract_medications("1", &n, meds());
        let names: Vec<_> = m.iter().map(|x| x.normalized.as_str()).collect();
        assert_eq!(names, ["ocrelizumab", "baclofen"]);
        assert!(m.iter().all(|x| x.section_path.starts_with("PLAN")));
        let mut h = StandardizedNote::default();
        h.history.interim_history = "gabapentin".into();
        assert!(extract_medications("1", &h, meds()).is_empty());
    }

    #[test]
    fn findings_from_three_sections() {
        let mut n = StandardizedNote::default();
        n.history.interim_history = "Reports tingling in both hands.".into();
        n.examination.reflexes = "Babinski sign present.".into();
        n.plan.testing = "fatigue counseling".into();
        let f = extract_findings("1", &n, findings());
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].normalized, "paresthesias");
        assert_eq!(f[0].surface, "tingling");
        assert!(f[1].normalized.eq_ignore_ascii_case("Babinski sign"));
        assert_eq!(f[1].section_path, "EXAMINATION/Reflexes");
    }

    #[test]
    fn canonical_names_are_stable() {
        let mut n = StandardizedNote::default();
        n.history.interim_history = findings().entries().iter().map(|e| e.name.as_str()).collect::<Vec<_>>().join(". ");
        let f = extract_findings("1", &n, findings());
        let got: HashSet<_> = f.iter().map(|m| m.normalized.clone()).collect();
        let want: HashSet<_> = findings().entries().iter().map(|e| e.name.to_lowercase()).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn frequency_counts_notes() {
        let mention = |a: &str| Mention {
            accession_num: a.into(),
            kind: MentionKind::Medication,
            surface: "gabapentin".into(),
            normalized: "gabapentin".into(),
            section_path: "PLAN/Testing".into(),
        };
        let ms: Vec<_> = ["1", "1", "2", "2", "3", "3"].into_iter().map(mention).collect();
        let t = frequency_table(&ms, MentionKind::Medication, CountMode::PerNote);
        assert_eq!(t.rows, vec![FrequencyRow { normalized: "gabapentin".into(), count: 3 }]);
        assert_eq!(t.total_mentions, 3);
        assert_eq!(frequency_table(&ms, MentionKind::Medication, CountMode::Raw).total_mentions, 6);
        assert_eq!(frequency_table(&[], MentionKind::Finding, CountMode::PerNote), FrequencyTable::default());
    }

    #[test]
    fn ties_sort_alphabetically() {
        let m = |a: &str, n: &str| Mention {
            accession_num: a.into(),
            kind: MentionKind::Finding,
            surface: n.into(),
            normalized: n.into(),
            section_path: "HISTORY/Interim History".into(),
        };
        let t = frequency_table(&[m("1", "b"), m("1", "a"), m("2", "c"), m("3", "c")], MentionKind::Finding, CountMode::PerNote);
        let order: Vec<_> = t.rows.iter().map(|r| r.normalized.as_str()).collect();
        assert_eq!(order, ["c", "a", "b"]);
    }
}

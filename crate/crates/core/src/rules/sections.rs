use std::collections::BTreeMap;

use super::lexicon::HeadingSynonyms;
use crate::note_model::NoteField;

/// Text assigned to each schema leaf; every leaf is present.
pub type Segments = BTreeMap<NoteField, String>;

/// Split a note into schema leaves by recognized heading lines.
///
/// Heading labels are consumed. Content before the first heading lands in
/// `HISTORY/Interim History`. Lines are trimmed and joined with `\n`.
pub fn segment_sections(text: &str, synonyms: &HeadingSynonyms) -> Segments {
    let mut lines: BTreeMap<NoteField, Vec<&str>> = BTreeMap::new();
    let mut current = NoteField::InterimHistory;
    for line in text.lines() {
        let (field, content) = match synonyms.match_heading(line) {
            Some((field, content)) => (field, content),
            None => (current, line.trim()),
        };
        current = field;
        if !content.is_empty() {
            lines.entry(field).or_default().push(content);
        }
    }
    NoteField::ALL
        .into_iter()
        .map(|f| (f, lines.get(&f).map(|l| l.join("\n")).unwrap_or_default()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::lower_tokens;

    fn syn() -> &'static HeadingSynonyms {
        &crate::resources::builtin().headings
    }

    #[test]
    fn chief_complaint_inline() {
        let s = segment_sections("Chief Complaint: New onset of double vision.", syn());
        assert_eq!(s[&NoteField::ChiefComplaint], "New onset of double vision.");
        assert!(s.iter().filter(|(f, _)| **f != NoteField::ChiefComplaint).all(|(_, t)| t.is_empty()));
    }

    #[test]
    fn empty_and_headingless() {
        assert!(segment_sections("", syn()).values().all(String::is_empty));
        let s = segment_sections("  some text\n\nmore text ", syn());
        assert_eq!(s[&NoteField::InterimHistory], "some text\nmore text");
    }

    #[test]
    fn headings_route_following_lines() {
        let text = "CC: vision loss\nHPI:\n  Two weeks of blurred vision.\nImpression:\nProbable multiple sclerosis.\nPlan: MRI brain\nFollow up in 3 months.";
        let s = segment_sections(text, syn());
        assert_eq!(s[&NoteField::ChiefComplaint], "vision loss");
        assert_eq!(s[&NoteField::InterimHistory], "Two weeks of blurred vision.");
        assert_eq!(s[&NoteField::Assessment], "Probable multiple sclerosis.");
        assert_eq!(s[&NoteField::Testing], "MRI brain\nFollow up in 3 months.");
    }

    #[test]
    fn content_is_preserved_minus_headings() {
        let text = "Exam: alert\nReflexes 2+ throughout\nRandom line";
        let s = segment_sections(text, syn());
        let mut got: Vec<String> = s.values().flat_map(|t| lower_tokens(t)).collect();
        got.sort();
        let mut want = lower_tokens("alert Reflexes 2 throughout Random line");
        want.sort();
        assert_eq!(got, want);
    }
}

//! Resource types that drive the rule engine. Each one is validated against
//! its invariants when constructed.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::note_model::{NoteField, Section};
use crate::text::{is_capitalized, lower_tokens};

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("{resource}: {reason}")]
    Invalid { resource: &'static str, reason: String },
    #[error("{resource}: {source}")]
    Json {
        resource: &'static str,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn invalid(resource: &'static str, reason: impl Into<String>) -> ResourceError {
    ResourceError::Invalid {
        resource,
        reason: reason.into(),
    }
}

// ---------------------------------------------------------------------------
// Abbreviations

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expansion {
    pub expansion: String,
    #[serde(default)]
    pub context_cues: Vec<String>,
    #[serde(default)]
    pub priority: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbbreviationEntry {
    pub abbrev: String,
    pub expansions: Vec<Expansion>,
    #[serde(default)]
    pub retain_original_in_parens: bool,
}

impl AbbreviationEntry {
    pub fn is_ambiguous(&self) -> bool {
        self.expansions.len() > 1
    }

    /// Highest-priority expansion; unique by construction.
    pub fn default_expansion(&self) -> &Expansion {
        self.expansions
            .iter()
            .max_by_key(|e| e.priority)
            .expect("entries have at least one expansion")
    }
}

#[derive(Debug, Clone)]
pub struct AbbreviationLexicon {
    entries: Vec<AbbreviationEntry>,
    index: HashMap<String, usize>,
}

#[derive(Deserialize)]
struct AbbreviationFile {
    entries: Vec<AbbreviationEntry>,
}

/// True for `ABC`, `f/u`, `A&O`: alphanumeric runs joined by single `/` or `&`.
pub(crate) fn is_abbrev_shape(s: &str) -> bool {
    !s.is_empty()
        && s.split(['/', '&'])
            .all(|part| !part.is_empty() && part.chars().all(char::is_alphanumeric))
}

impl AbbreviationLexicon {
    pub fn new(entries: Vec<AbbreviationEntry>) -> Result<Self, ResourceError> {
        const R: &str = "abbreviations";
        let mut index = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if !is_abbrev_shape(&e.abbrev) {
                return Err(invalid(R, format!("`{}` is not a token-shaped abbreviation", e.abbrev)));
            }
            if index.insert(e.abbrev.clone(), i).is_some() {
                return Err(invalid(R, format!("duplicate abbreviation `{}`", e.abbrev)));
            }
            if e.expansions.is_empty() {
                return Err(invalid(R, format!("`{}` has no expansions", e.abbrev)));
            }
            if e.expansions.iter().any(|x| x.expansion.trim().is_empty()) {
                return Err(invalid(R, format!("`{}` has an empty expansion", e.abbrev)));
            }
            if e.is_ambiguous() {
                let mut seen = HashSet::new();
                for x in &e.expansions {
                    if x.context_cues.is_empty() {
                        return Err(invalid(
                            R,
                            format!("ambiguous `{}` expansion `{}` has no cues", e.abbrev, x.expansion),
                        ));
                    }
                    for cue in &x.context_cues {
                        if cue.trim().is_empty() || *cue != cue.to_lowercase() {
                            return Err(invalid(R, format!("cue `{cue}` must be non-empty lowercase")));
                        }
                        if !seen.insert(cue.as_str()) {
                            return Err(invalid(
                                R,
                                format!("cue `{cue}` of `{}` is shared between expansions", e.abbrev),
                            ));
                        }
                    }
                }
                let top = e.default_expansion().priority;
                if e.expansions.iter().filter(|x| x.priority == top).count() != 1 {
                    return Err(invalid(
                        R,
                        format!("ambiguous `{}` needs exactly one highest-priority default", e.abbrev),
                    ));
                }
            }
        }
        let lexicon = Self { entries, index };
        // Expansions must not contain expandable tokens, otherwise expansion
        // would not be idempotent.
        for e in &lexicon.entries {
            for x in &e.expansions {
                for word in x.expansion.split(|c: char| !(c.is_alphanumeric() || c == '/' || c == '&')) {
                    if !word.is_empty() && lexicon.lookup(word).is_some() {
                        return Err(invalid(
                            R,
                            format!("expansion `{}` of `{}` contains abbreviation `{word}`", x.expansion, e.abbrev),
                        ));
                    }
                }
            }
        }
        Ok(lexicon)
    }

    pub fn from_json(json: &str) -> Result<Self, ResourceError> {
        let file: AbbreviationFile = serde_json::from_str(json).map_err(|source| ResourceError::Json {
            resource: "abbreviations",
            source,
        })?;
        Self::new(file.entries)
    }

    pub fn entries(&self) -> &[AbbreviationEntry] {
        &self.entries
    }

    pub fn get(&self, abbrev: &str) -> Option<&AbbreviationEntry> {
        self.index.get(abbrev).map(|&i| &self.entries[i])
    }

    /// Match a token against the lexicon. Keys match exactly; an all-lowercase
    /// key also matches its capitalized form (`pt` / `Pt`), reported by the
    /// second tuple element.
    pub fn lookup(&self, token: &str) -> Option<(&AbbreviationEntry, bool)> {
        if let Some(e) = self.get(token) {
            return Some((e, false));
        }
        if is_capitalized(token) {
            let lower = token.to_lowercase();
            if let Some(e) = self.get(&lower) {
                return Some((e, true));
            }
        }
        None
    }
}

// ---------------------------------------------------------------------------
// Non-standard terms

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermPair {
    pub nonstandard: String,
    pub standard: String,
}

#[derive(Debug, Clone)]
pub struct TermMap {
    pairs: Vec<TermPair>,
    /// first lowercase word -> (phrase words, pair index), longest first
    pub(crate) index: HashMap<String, Vec<(Vec<String>, usize)>>,
}

#[derive(Deserialize)]
struct TermFile {
    pairs: Vec<TermPair>,
}

impl TermMap {
    pub fn new(pairs: Vec<TermPair>) -> Result<Self, ResourceError> {
        const R: &str = "terms";
        let mut seen = HashSet::new();
        let mut index: HashMap<String, Vec<(Vec<String>, usize)>> = HashMap::new();
        for (i, p) in pairs.iter().enumerate() {
            let words = lower_tokens(&p.nonstandard);
            if words.is_empty() || words.join(" ") != p.nonstandard.to_lowercase() {
                return Err(invalid(
                    R,
                    format!("`{}` must be space-separated alphanumeric words", p.nonstandard),
                ));
            }
            if p.standard.trim().is_empty() {
                return Err(invalid(R, format!("`{}` maps to an empty term", p.nonstandard)));
            }
            if p.nonstandard.eq_ignore_ascii_case(&p.standard) {
                return Err(invalid(R, format!("`{}` maps to itself", p.nonstandard)));
            }
            if !seen.insert(p.nonstandard.to_lowercase()) {
                return Err(invalid(R, format!("duplicate phrase `{}`", p.nonstandard)));
            }
            index.entry(words[0].clone()).or_default().push((words, i));
        }
        for list in index.values_mut() {
            list.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.1.cmp(&b.1)));
        }
        Ok(Self { pairs, index })
    }

    pub fn from_json(json: &str) -> Result<Self, ResourceError> {
        let file: TermFile = serde_json::from_str(json).map_err(|source| ResourceError::Json {
            resource: "terms",
            source,
        })?;
        Self::new(file.pairs)
    }

    pub fn pairs(&self) -> &[TermPair] {
        &self.pairs
    }

    pub(crate) fn pair(&self, i: usize) -> &TermPair {
        &self.pairs[i]
    }
}

// ---------------------------------------------------------------------------
// Spelling

/// Outcome of a vocabulary lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Suggestion {
    Unique { word: String, distance: usize },
    Ambiguous { distance: usize, count: usize },
    NoCandidate,
}

/// Vocabulary with a deletion-neighbourhood index for edit-distance lookup.
#[derive(Debug, Clone)]
pub struct SpellLexicon {
    words: Vec<String>,
    vocabulary: HashSet<String>,
    deletes: HashMap<String, Vec<u32>>,
    max_edit_distance: usize,
    protected: HashSet<String>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
pub struct SpellingConfig {
    #[serde(default = "default_distance")]
    pub max_edit_distance: usize,
    #[serde(default)]
    pub protected_terms: Vec<String>,
}

fn default_distance() -> usize {
    1
}

/// The index is always built to this depth so the lexicon's distance limit can
/// be changed without rebuilding.
const INDEX_DEPTH: usize = 2;

impl SpellLexicon {
    pub fn new<I, S, P, T>(
        vocabulary: I,
        max_edit_distance: usize,
        protected_terms: P,
    ) -> Result<Self, ResourceError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
        P: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        const R: &str = "spelling";
        if !(1..=2).contains(&max_edit_distance) {
            return Err(invalid(R, format!("max_edit_distance {max_edit_distance} not in 1..=2")));
        }
        let mut words: Vec<String> = vocabulary
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        words.sort();
        words.dedup();
        if words.is_empty() {
            return Err(invalid(R, "vocabulary is empty"));
        }
        let mut deletes: HashMap<String, Vec<u32>> = HashMap::new();
        for (i, w) in words.iter().enumerate() {
            if !w.is_ascii() {
                continue;
            }
            for variant in delete_variants(w, INDEX_DEPTH) {
                deletes.entry(variant).or_default().push(i as u32);
            }
        }
        let vocabulary = words.iter().cloned().collect();
        Ok(Self {
            words,
            vocabulary,
            deletes,
            max_edit_distance,
            protected: protected_terms
                .into_iter()
                .map(|t| t.as_ref().to_lowercase())
                .collect(),
        })
    }

    /// Parse a one-word-per-line vocabulary (blank lines and `#` comments ignored).
    pub fn from_text(
        vocabulary: &str,
        config: &SpellingConfig,
    ) -> Result<Self, ResourceError> {
        let words = vocabulary
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        Self::new(words, config.max_edit_distance, config.protected_terms.iter())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.vocabulary.contains(&word.to_lowercase())
    }

    pub fn is_protected(&self, word: &str) -> bool {
        self.protected.contains(&word.to_lowercase())
    }

    pub fn max_edit_distance(&self) -> usize {
        self.max_edit_distance
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn protect<I, S>(&mut self, terms: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.protected
            .extend(terms.into_iter().map(|t| t.as_ref().to_lowercase()));
    }

    /// Nearest vocabulary words to `word` (lowercase ASCII) within `max_distance`.
    /// Only the closest tier counts: one word at the minimum distance is a unique
    /// suggestion, two or more are ambiguous.
    pub fn suggest(&self, word: &str, max_distance: usize) -> Suggestion {
        let max_distance = max_distance.min(INDEX_DEPTH);
        let mut seen = HashSet::new();
        let mut best: Option<(usize, Vec<u32>)> = None;
        for variant in delete_variants(word, max_distance) {
            let Some(ids) = self.deletes.get(&variant) else {
                continue;
            };
            for &id in ids {
                if !seen.insert(id) {
                    continue;
                }
                let d = osa_distance(word.as_bytes(), self.words[id as usize].as_bytes());
                if d == 0 || d > max_distance {
                    continue;
                }
                match &mut best {
                    Some((bd, list)) if d == *bd => list.push(id),
                    Some((bd, _)) if d > *bd => {}
                    _ => best = Some((d, vec![id])),
                }
            }
        }
        match best {
            None => Suggestion::NoCandidate,
            Some((distance, ids)) if ids.len() == 1 => Suggestion::Unique {
                word: self.words[ids[0] as usize].clone(),
                distance,
            },
            Some((distance, ids)) => Suggestion::Ambiguous {
                distance,
                count: ids.len(),
            },
        }
    }
}

/// All strings reachable by deleting up to `depth` bytes, including the word itself.
fn delete_variants(word: &str, depth: usize) -> HashSet<String> {
    let mut out = HashSet::new();
    out.insert(word.to_string());
    let mut frontier = vec![word.to_string()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &frontier {
            for i in 0..w.len() {
                if !w.is_char_boundary(i) || !w.is_char_boundary(i + 1) {
                    continue;
                }
                let mut v = String::with_capacity(w.len() - 1);
                v.push_str(&w[..i]);
                v.push_str(&w[i + 1..]);
                if out.insert(v.clone()) {
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    out
}

/// Optimal string alignment distance: insertions, deletions, substitutions and
/// adjacent transpositions each cost one.
pub fn osa_distance(a: &[u8], b: &[u8]) -> usize {
    let (n, m) = (a.len(), b.len());
    let mut prev2 = vec![0usize; m + 1];
    let mut prev: Vec<usize> = (0..=m).collect();
    let mut cur = vec![0usize; m + 1];
    for i in 1..=n {
        cur[0] = i;
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut v = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                v = v.min(prev2[j - 2] + 1);
            }
            cur[j] = v;
        }
        std::mem::swap(&mut prev2, &mut prev);
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

// ---------------------------------------------------------------------------
// Headings

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadingRule {
    pub pattern: String,
    pub canonical_section: Section,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical_subsection: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionDefault {
    pub section: Section,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_subsection: Option<String>,
}

#[derive(Deserialize)]
struct HeadingFile {
    sections: Vec<SectionDefault>,
    mapping: Vec<HeadingRule>,
}

/// Heading synonyms resolved to schema leaves.
#[derive(Debug, Clone)]
pub struct HeadingSynonyms {
    /// (pattern, target leaf), longest pattern first
    rules: Vec<(String, NoteField)>,
    defaults: BTreeMap<Section, NoteField>,
}

impl HeadingSynonyms {
    pub fn new(sections: Vec<SectionDefault>, mapping: Vec<HeadingRule>) -> Result<Self, ResourceError> {
        const R: &str = "headings";
        let leaf = |section: Section, sub: Option<&str>| -> Result<NoteField, ResourceError> {
            let path = match sub {
                Some(s) => format!("{}/{s}", section.heading()),
                None => section.heading().to_string(),
            };
            NoteField::from_path(&path).ok_or_else(|| invalid(R, format!("`{path}` is not a schema leaf")))
        };
        let mut defaults = BTreeMap::new();
        for s in &sections {
            defaults.insert(s.section, leaf(s.section, s.default_subsection.as_deref())?);
        }
        for section in Section::ALL {
            if !defaults.contains_key(&section) {
                return Err(invalid(R, format!("no default leaf for {}", section.heading())));
            }
        }
        let mut seen = HashSet::new();
        let mut rules = Vec::new();
        let mut reachable = HashSet::new();
        for m in &mapping {
            let pattern = m.pattern.trim();
            if pattern.is_empty() {
                return Err(invalid(R, "empty heading pattern"));
            }
            if !seen.insert(pattern.to_lowercase()) {
                return Err(invalid(R, format!("duplicate pattern `{pattern}`")));
            }
            let target = match &m.canonical_subsection {
                Some(sub) => leaf(m.canonical_section, Some(sub))?,
                None => defaults[&m.canonical_section],
            };
            reachable.insert(m.canonical_section);
            rules.push((pattern.to_string(), target));
        }
        if let Some(s) = Section::ALL.iter().find(|s| !reachable.contains(s)) {
            return Err(invalid(R, format!("section {} has no heading pattern", s.heading())));
        }
        rules.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
        Ok(Self { rules, defaults })
    }

    pub fn from_json(json: &str) -> Result<Self, ResourceError> {
        let file: HeadingFile = serde_json::from_str(json).map_err(|source| ResourceError::Json {
            resource: "headings",
            source,
        })?;
        Self::new(file.sections, file.mapping)
    }

    pub fn default_field(&self, section: Section) -> NoteField {
        self.defaults[&section]
    }

    /// Patterns and the leaf each resolves to.
    pub fn rules(&self) -> &[(String, NoteField)] {
        &self.rules
    }

    /// Recognize a heading at the start of `line`.
    ///
    /// A heading is a known pattern (case-insensitive) that is either the whole
    /// line, optionally followed by `:`, or followed by `:` and inline content.
    /// Returns the target leaf and the inline content after the colon.
    pub fn match_heading<'a>(&self, line: &'a str) -> Option<(NoteField, &'a str)> {
        let trimmed = line.trim();
        for (pattern, field) in &self.rules {
            let Some(head) = trimmed.get(..pattern.len()) else {
                continue;
            };
            if !head.eq_ignore_ascii_case(pattern) {
                continue;
            }
            let rest = &trimmed[pattern.len()..];
            let after = rest.trim_start();
            if after.is_empty() {
                return Some((*field, ""));
            }
            if let Some(content) = after.strip_prefix(':') {
                return Some((*field, content.trim()));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(abbrev: &str, exps: &[(&str, &[&str], i32)]) -> AbbreviationEntry {
        AbbreviationEntry {
            abbrev: abbrev.into(),
            retain_original_in_parens: false,
            expansions: exps
                .iter()
                .map(|(e, c, p)| Expansion {
                    expansion: e.to_string(),
                    context_cues: c.iter().map(|s| s.to_string()).collect(),
                    priority: *p,
                })
                .collect(),
        }
    }

    #[test]
    fn abbreviation_invariants() {
        assert!(AbbreviationLexicon::new(vec![entry("BP", &[("blood pressure", &[], 0)])]).is_ok());
        assert!(AbbreviationLexicon::new(vec![
            entry("BP", &[("blood pressure", &[], 0)]),
            entry("BP", &[("bypass", &[], 0)])
        ])
        .is_err());
        assert!(AbbreviationLexicon::new(vec![entry("X", &[])]).is_err());
        // shared cue
        assert!(AbbreviationLexicon::new(vec![entry(
            "MS",
            &[("multiple sclerosis", &["optic"], 1), ("mental status", &["optic"], 0)]
        )])
        .is_err());
        // tied default
        assert!(AbbreviationLexicon::new(vec![entry(
            "MS",
            &[("multiple sclerosis", &["optic"], 1), ("mental status", &["alert"], 1)]
        )])
        .is_err());
        // re-expandable expansion
        assert!(AbbreviationLexicon::new(vec![
            entry("BP", &[("blood pressure", &[], 0)]),
            entry("HBP", &[("high BP", &[], 0)])
        ])
        .is_err());
    }

    #[test]
    fn capitalized_lowercase_keys_match() {
        let lex = AbbreviationLexicon::new(vec![entry("pt", &[("patient", &[], 0)])]).unwrap();
        assert!(matches!(lex.lookup("pt"), Some((_, false))));
        assert!(matches!(lex.lookup("Pt"), Some((_, true))));
        assert!(lex.lookup("PT").is_none());
    }

    #[test]
    fn term_map_invariants() {
        let p = |a: &str, b: &str| TermPair { nonstandard: a.into(), standard: b.into() };
        assert!(TermMap::new(vec![p("heart attack", "myocardial infarction")]).is_ok());
        assert!(TermMap::new(vec![p("fever", "Fever")]).is_err());
        assert!(TermMap::new(vec![p("a b", "x"), p("A B", "y")]).is_err());
        assert!(TermMap::new(vec![p("can't sleep", "insomnia")]).is_err());
    }

    #[test]
    fn osa_distance_basics() {
        assert_eq!(osa_distance(b"", b"abc"), 3);
        assert_eq!(osa_distance(b"pateint", b"patient"), 1);
        assert_eq!(osa_distance(b"vscalar", b"vascular"), 2);
        assert_eq!(osa_distance(b"methlylprednisolone", b"methylprednisolone"), 1);
        assert_eq!(osa_distance(b"ca", b"abc"), 3);
    }

    #[test]
    fn suggestion_tiers() {
        let lex = SpellLexicon::new(["vascular", "cat", "bat", "patient"], 2, Vec::<String>::new()).unwrap();
        assert_eq!(
            lex.suggest("vscalar", 2),
            Suggestion::Unique { word: "vascular".into(), distance: 2 }
        );
        assert_eq!(lex.suggest("vscalar", 1), Suggestion::NoCandidate);
        assert_eq!(lex.suggest("zat", 1), Suggestion::Ambiguous { distance: 1, count: 2 });
        assert!(SpellLexicon::new(Vec::<String>::new(), 1, Vec::<String>::new()).is_err());
        assert!(SpellLexicon::new(["a"], 3, Vec::<String>::new()).is_err());
        let short = SpellLexicon::new(["a", "b", "ab"], 1, Vec::<String>::new()).unwrap();
        assert_eq!(short.suggest("c", 1), Suggestion::Ambiguous { distance: 1, count: 2 });
    }

    #[test]
    fn heading_matching() {
        let syn = crate::resources::builtin().headings.clone();
        assert_eq!(
            syn.match_heading("Chief Complaint: New onset of double vision."),
            Some((NoteField::ChiefComplaint, "New onset of double vision."))
        );
        assert_eq!(syn.match_heading("PHYSICAL EXAMINATION"), Some((NoteField::MentalStatus, "")));
        assert_eq!(syn.match_heading("  Plan :  MRI"), Some((NoteField::Testing, "MRI")));
        assert_eq!(syn.match_heading("History of optic neuritis"), None);
        assert_eq!(syn.match_heading("Follow up in six months."), None);
        assert_eq!(syn.match_heading("Gait: wide based"), Some((NoteField::GaitAndStation, "wide based")));
    }
}

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::rules::ResourceError;
use crate::text::word_spans;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GazetteerEntry {
    pub name: String,
    #[serde(default)]
    pub synonyms: Vec<String>,
}

#[derive(Deserialize)]
struct GazetteerFile {
    entries: Vec<GazetteerEntry>,
}

/// Words of a phrase and the separators between them (whitespace collapsed to one space).
#[derive(Debug, Clone)]
struct Phrase {
    words: Vec<String>,
    gaps: Vec<String>,
    entry: usize,
}

fn split_phrase(text: &str) -> (Vec<String>, Vec<String>) {
    let spans = word_spans(text);
    let words = spans.iter().map(|s| text[s.clone()].to_lowercase()).collect();
    let gaps = spans.windows(2).map(|w| normalize_gap(&text[w[0].end..w[1].start])).collect();
    (words, gaps)
}

fn normalize_gap(gap: &str) -> String {
    let mut out = String::new();
    let mut in_ws = false;
    for c in gap.chars() {
        if c.is_whitespace() {
            if !in_ws {
                out.push(' ');
            }
            in_ws = true;
        } else {
            out.push(c);
            in_ws = false;
        }
    }
    out
}

/// A match of a gazetteer phrase in some text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhraseMatch {
    pub start: usize,
    pub end: usize,
    /// Canonical name, lowercased.
    pub normalized: String,
}

/// Canonical names plus synonyms, matched case-insensitively, longest first,
/// at word boundaries.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    entries: Vec<GazetteerEntry>,
    index: HashMap<String, Vec<Phrase>>,
    surfaces: HashMap<String, usize>,
}

impl Gazetteer {
    pub fn new(entries: Vec<GazetteerEntry>) -> Result<Self, ResourceError> {
        const R: &str = "gazetteer";
        let mut index: HashMap<String, Vec<Phrase>> = HashMap::new();
        let mut surfaces: HashMap<String, usize> = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            for surface in std::iter::once(&e.name).chain(&e.synonyms) {
                let (words, gaps) = split_phrase(surface);
                if words.is_empty() {
                    return Err(ResourceError::Invalid { resource: R, reason: format!("empty phrase in `{}`", e.name) });
                }
                let key = format!("{}|{}", words.join(" "), gaps.join("|"));
                if let Some(&other) = surfaces.get(&key) {
                    if other != i {
                        return Err(ResourceError::Invalid {
                            resource: R,
                            reason: format!("`{surface}` names both `{}` and `{}`", entries[other].name, e.name),
                        });
                    }
                    continue;
                }
                surfaces.insert(key, i);
                index.entry(words[0].clone()).or_default().push(Phrase { words, gaps, entry: i });
            }
        }
        for list in index.values_mut() {
            list.sort_by(|a, b| b.words.len().cmp(&a.words.len()).then(a.entry.cmp(&b.entry)));
        }
        Ok(Self { entries, index, surfaces })
    }

    pub fn from_json(json: &str) -> Result<Self, ResourceError> {
        let file: GazetteerFile = serde_json::from_str(json).map_err(|source| ResourceError::Json {
            resource: "gazetteer",
            source,
        })?;
        Self::new(file.entries)
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    /// Canonical (lowercase) name for an exact surface form.
    pub fn canonical(&self, surface: &str) -> Option<String> {
        let (words, gaps) = split_phrase(surface);
        let key = format!("{}|{}", words.join(" "), gaps.join("|"));
        self.surfaces.get(&key).map(|&i| self.entries[i].name.to_lowercase())
    }

    /// Non-overlapping matches, scanning left to right.
    pub fn find_all(&self, text: &str) -> Vec<PhraseMatch> {
        let spans = word_spans(text);
        let lower: Vec<String> = spans.iter().map(|s| text[s.clone()].to_lowercase()).collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < spans.len() {
            let hit = self.index.get(&lower[i]).and_then(|phrases| {
                phrases.iter().find(|p| {
                    i + p.words.len() <= spans.len()
                        && p.words.iter().enumerate().all(|(k, w)| lower[i + k] == *w)
                        && p.gaps.iter().enumerate().all(|(k, g)| {
                            normalize_gap(&text[spans[i + k].end..spans[i + k + 1].start]) == *g
                        })
                })
            });
            match hit {
                Some(p) => {
                    out.push(PhraseMatch {
                        start: spans[i].start,
                        end: spans[i + p.words.len() - 1].end,
                        normalized: self.entries[p.entry].name.to_lowercase(),
                    });
                    i += p.words.len();
                }
                None => i += 1,
            }
        }
        out
    }
}

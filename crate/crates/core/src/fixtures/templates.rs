use std::collections::BTreeMap;

use serde::Deserialize;

use super::FixtureError;
use crate::extraction::{Gazetteer, MentionKind};
use crate::note_model::NoteField;
use crate::rules::StandardizationResources;
use crate::text::word_spans;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SlotKind {
    /// `[a:KEY]` or `[a:KEY=expansion]`
    Abbreviation,
    /// `[t:standard]`
    Term,
    /// `[f:name]`, an extractable finding
    Finding,
    /// `[m:name]`, an extractable medication
    Medication,
    /// `[d:name]`, a medication outside PLAN
    MedicationDistractor,
    /// `[g:name]`, a finding outside the finding sections
    FindingDistractor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Seg {
    Word(String),
    Gap(String),
    Slot {
        kind: SlotKind,
        /// Abbreviation key; otherwise the clean text.
        key: String,
        clean: String,
    },
}

impl Seg {
    pub(crate) fn clean(&self) -> &str {
        match self {
            Seg::Word(s) | Seg::Gap(s) => s,
            Seg::Slot { clean, .. } => clean,
        }
    }
}

/// One template sentence split into words, gaps and slots.
#[derive(Debug, Clone)]
pub(crate) struct Template {
    pub(crate) segs: Vec<Seg>,
}

impl Template {
    pub(crate) fn count(&self, kind: SlotKind) -> usize {
        self.segs
            .iter()
            .filter(|s| matches!(s, Seg::Slot { kind: k, .. } if *k == kind))
            .count()
    }
}

#[derive(Debug, Clone)]
pub struct TemplateBank {
    pub(crate) titles: Vec<String>,
    pub(crate) leaves: Vec<(NoteField, Vec<Template>)>,
}

#[derive(Deserialize)]
struct Raw {
    title_lines: Vec<String>,
    leaves: BTreeMap<String, Vec<String>>,
}

fn text_segs(text: &str, out: &mut Vec<Seg>) {
    let mut cursor = 0;
    for span in word_spans(text) {
        if span.start > cursor {
            out.push(Seg::Gap(text[cursor..span.start].to_string()));
        }
        out.push(Seg::Word(text[span.clone()].to_string()));
        cursor = span.end;
    }
    if cursor < text.len() {
        out.push(Seg::Gap(text[cursor..].to_string()));
    }
}

fn bad(sentence: &str, reason: impl Into<String>) -> FixtureError {
    FixtureError::Template { sentence: sentence.to_string(), reason: reason.into() }
}

fn parse_sentence(
    sentence: &str,
    field: NoteField,
    resources: &StandardizationResources,
    medications: &Gazetteer,
    findings: &Gazetteer,
) -> Result<Template, FixtureError> {
    let mut segs = Vec::new();
    let mut rest = sentence;
    while let Some(open) = rest.find('[') {
        text_segs(&rest[..open], &mut segs);
        let close = rest[open..].find(']').ok_or_else(|| bad(sentence, "unclosed slot"))? + open;
        let body = &rest[open + 1..close];
        let (tag, arg) = body.split_once(':').ok_or_else(|| bad(sentence, "slot without tag"))?;
        let path = field.path();
        let slot = match tag {
            "a" => {
                let (key, sense) = match arg.split_once('=') {
                    Some((k, s)) => (k, Some(s)),
                    None => (arg, None),
                };
                let entry = resources
                    .abbreviations
                    .get(key)
                    .ok_or_else(|| bad(sentence, format!("unknown abbreviation {key}")))?;
                let clean = match sense {
                    Some(s) if entry.expansions.iter().any(|x| x.expansion == s) => s.to_string(),
                    Some(s) => return Err(bad(sentence, format!("{key} has no expansion {s}"))),
                    None if entry.is_ambiguous() => {
                        return Err(bad(sentence, format!("ambiguous {key} needs an explicit sense")))
                    }
                    None => entry.expansions[0].expansion.clone(),
                };
                Seg::Slot { kind: SlotKind::Abbreviation, key: key.to_string(), clean }
            }
            "t" => {
                if !resources.terms.pairs().iter().any(|p| p.standard == arg) {
                    return Err(bad(sentence, format!("no non-standard phrase maps to {arg}")));
                }
                Seg::Slot { kind: SlotKind::Term, key: arg.to_string(), clean: arg.to_string() }
            }
            "f" | "g" | "m" | "d" => {
                let (kind, gaz, mention) = match tag {
                    "f" => (SlotKind::Finding, findings, MentionKind::Finding),
                    "g" => (SlotKind::FindingDistractor, findings, MentionKind::Finding),
                    "m" => (SlotKind::Medication, medications, MentionKind::Medication),
                    _ => (SlotKind::MedicationDistractor, medications, MentionKind::Medication),
                };
                if gaz.canonical(arg).is_none() {
                    return Err(bad(sentence, format!("{arg} is not in the gazetteer")));
                }
                let extractable = matches!(kind, SlotKind::Finding | SlotKind::Medication);
                if mention.allows_path(path) != extractable {
                    return Err(bad(sentence, format!("[{tag}:] slot not allowed under {path}")));
                }
                Seg::Slot { kind, key: arg.to_string(), clean: arg.to_string() }
            }
            _ => return Err(bad(sentence, format!("unknown slot tag {tag}"))),
        };
        segs.push(slot);
        rest = &rest[close + 1..];
    }
    text_segs(rest, &mut segs);
    match segs.first() {
        Some(Seg::Word(w)) if w.starts_with(|c: char| c.is_ascii_uppercase()) => {}
        _ => return Err(bad(sentence, "must start with a capitalized plain word")),
    }
    if segs.last() != Some(&Seg::Gap(".".into())) {
        return Err(bad(sentence, "must end with a lone period"));
    }
    Ok(Template { segs })
}

impl TemplateBank {
    pub fn from_json(
        json: &str,
        resources: &StandardizationResources,
        medications: &Gazetteer,
        findings: &Gazetteer,
    ) -> Result<Self, FixtureError> {
        let raw: Raw = serde_json::from_str(json).map_err(|e| FixtureError::Json(e.to_string()))?;
        if raw.title_lines.is_empty() {
            return Err(FixtureError::Json("no title lines".into()));
        }
        let mut leaves = Vec::new();
        for (path, sentences) in raw.leaves {
            let field = NoteField::from_path(&path).ok_or_else(|| FixtureError::Json(format!("unknown leaf {path}")))?;
            if sentences.is_empty() {
                return Err(FixtureError::Json(format!("leaf {path} has no sentences")));
            }
            let parsed = sentences
                .iter()
                .map(|s| parse_sentence(s, field, resources, medications, findings))
                .collect::<Result<Vec<_>, _>>()?;
            leaves.push((field, parsed));
        }
        leaves.sort_by_key(|(f, _)| *f);
        Ok(Self { titles: raw.title_lines, leaves })
    }

    pub fn builtin() -> Result<Self, FixtureError> {
        Self::from_json(
            crate::resources::TEMPLATES_JSON,
            crate::resources::builtin(),
            crate::resources::medications(),
            crate::resources::findings(),
        )
    }

    /// Every template sentence with its leaf, in bank order.
    pub fn sentences(&self) -> impl Iterator<Item = (NoteField, String)> + '_ {
        self.leaves.iter().flat_map(|(f, ts)| {
            ts.iter()
                .map(move |t| (*f, t.segs.iter().map(Seg::clean).collect::<String>()))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SourceNote;
    use crate::note_model::NoteMetrics;
    use crate::resources::builtin;
    use crate::rules::standardize_rule_based;

    fn metrics_for(field: NoteField, sentence: &str) -> NoteMetrics {
        let label = field.path().rsplit('/').next().unwrap();
        let note = SourceNote::new("t", format!("{label}: {sentence}"));
        standardize_rule_based(&note, builtin()).metrics
    }

    #[test]
    fn clean_sentences_produce_no_events() {
        let bank = TemplateBank::builtin().unwrap();
        for (field, sentence) in bank.sentences() {
            assert_eq!(metrics_for(field, &sentence), NoteMetrics::default(), "{sentence}");
        }
    }

    #[test]
    fn each_slot_variant_produces_one_event() {
        let bank = TemplateBank::builtin().unwrap();
        let res = builtin();
        for (field, templates) in &bank.leaves {
            for t in templates {
                for (i, seg) in t.segs.iter().enumerate() {
                    let Seg::Slot { kind, key, clean } = seg else { continue };
                    let variants: Vec<(String, NoteMetrics)> = match kind {
                        SlotKind::Abbreviation => {
                            let entry = res.abbreviations.get(key).unwrap();
                            let after = if entry.retain_original_in_parens {
                                format!("{key} -> {clean} ({key})")
                            } else {
                                format!("{key} -> {clean}")
                            };
                            vec![(key.clone(), NoteMetrics { abbreviations_expanded: vec![after], ..Default::default() })]
                        }
                        SlotKind::Term => res
                            .terms
                            .pairs()
                            .iter()
                            .filter(|p| &p.standard == clean && !p.nonstandard.starts_with(char::is_uppercase))
                            .map(|p| {
                                let m = NoteMetrics {
                                    non_standard_terms: vec![format!("{} -> {}", p.nonstandard, p.standard)],
                                    ..Default::default()
                                };
                                (p.nonstandard.clone(), m)
                            })
                            .collect(),
                        _ => continue,
                    };
                    assert!(!variants.is_empty(), "{key}");
                    for (planted, expected) in variants {
                        let text: String = t
                            .segs
                            .iter()
                            .enumerate()
                            .map(|(j, s)| if j == i { planted.as_str() } else { s.clean() })
                            .collect();
                        assert_eq!(metrics_for(*field, &text), expected, "{text}");
                    }
                }
            }
        }
    }
}

//! Synthetic corpus generator. Notes are assembled from clean template
//! sentences; every injected corruption is recorded in a ledger that serves
//! as the exact oracle for the rule engine's counts.

mod disambiguation;
mod profile;
mod templates;

use std::collections::{BTreeMap, HashSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use disambiguation::{DisambiguationCase, MS_SUITE};
pub use profile::{clamped_rounded_moments, solve_latent, CountTarget, FixtureProfile, LengthTarget};
pub use templates::TemplateBank;

use crate::corpus::SourceNote;
use crate::extraction::{Gazetteer, MentionKind};
use crate::note_model::{NoteField, NoteMetrics};
use crate::rules::{AbbreviationEntry, AbbreviationLexicon, StandardizationResources, Suggestion, DUPLICABLE_WORDS};
use crate::text::{lower_tokens, word_spans};
use profile::{plan_corpus, NotePlan};
use templates::{Seg, SlotKind, Template};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FixtureError {
    #[error("template `{sentence}`: {reason}")]
    Template { sentence: String, reason: String },
    #[error("template bank: {0}")]
    Json(String),
    #[error("profile: {0}")]
    Profile(String),
    #[error("corpus size must be at least 1")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PlantKind {
    Spelling,
    Abbreviation,
    NonStandardTerm,
    GrammarRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GrammarPlant {
    LowercaseStart,
    MissingPeriod,
    SpaceBeforePunct,
    DuplicateWord,
}

/// One injected corruption. `before` is the clean text, `after` what the note contains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedError {
    pub kind: PlantKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<GrammarPlant>,
    pub before: String,
    pub after: String,
    /// Index of the planted token among the note's alphanumeric tokens; for
    /// punctuation plants, the token preceding the mark.
    pub position: usize,
}

/// A gazetteer term placed in the note and whether its section makes it extractable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedMention {
    pub kind: MentionKind,
    pub normalized: String,
    pub section_path: String,
    pub extractable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantLedger {
    pub accession_num: String,
    pub planted: Vec<PlantedError>,
    #[serde(default)]
    pub mentions: Vec<PlantedMention>,
}

impl PlantLedger {
    pub fn count(&self, kind: PlantKind) -> usize {
        self.planted.iter().filter(|p| p.kind == kind).count()
    }

    /// The Metrics block the rule engine should report for this note.
    pub fn expected_metrics(&self, abbreviations: &AbbreviationLexicon) -> NoteMetrics {
        let events = |kind: PlantKind| -> Vec<String> {
            self.planted
                .iter()
                .filter(|p| p.kind == kind)
                .map(|p| match kind {
                    PlantKind::Abbreviation
                        if abbreviations.get(&p.after).is_some_and(|e| e.retain_original_in_parens) =>
                    {
                        format!("{} -> {} ({})", p.after, p.before, p.after)
                    }
                    _ => format!("{} -> {}", p.after, p.before),
                })
                .collect()
        };
        NoteMetrics {
            grammatical_errors: self.count(PlantKind::GrammarRule) as u64,
            abbreviations_expanded: events(PlantKind::Abbreviation),
            spelling_errors: events(PlantKind::Spelling),
            non_standard_terms: events(PlantKind::NonStandardTerm),
        }
    }
}

/// All strings one edit away: deletion, adjacent transposition, substitution, insertion.
pub fn edits1(word: &str) -> HashSet<String> {
    let w = word.as_bytes();
    let mut out = HashSet::new();
    for i in 0..=w.len() {
        let (l, r) = w.split_at(i);
        if !r.is_empty() {
            out.insert([l, &r[1..]].concat());
        }
        if r.len() > 1 {
            out.insert([l, &[r[1], r[0]], &r[2..]].concat());
        }
        for c in b'a'..=b'z' {
            if !r.is_empty() {
                out.insert([l, &[c], &r[1..]].concat());
            }
            out.insert([l, &[c], r].concat());
        }
    }
    out.remove(w);
    out.into_iter().map(|b| String::from_utf8(b).expect("ascii")).collect()
}

#[derive(Debug, Clone)]
struct Plant {
    kind: PlantKind,
    rule: Option<GrammarPlant>,
    text: String,
}

#[derive(Debug, Clone)]
struct Sentence {
    field: NoteField,
    segs: Vec<Seg>,
    plants: Vec<Option<Plant>>,
    grammar: bool,
}

impl Sentence {
    fn new(field: NoteField, t: &Template) -> Self {
        Self { field, segs: t.segs.clone(), plants: vec![None; t.segs.len()], grammar: false }
    }

    fn render(&self, seen_by_abbreviations: bool) -> String {
        self.segs
            .iter()
            .zip(&self.plants)
            .map(|(s, p)| match p {
                Some(p) if !(seen_by_abbreviations && matches!(p.kind, PlantKind::Spelling | PlantKind::NonStandardTerm)) => {
                    p.text.as_str()
                }
                _ => s.clean(),
            })
            .collect()
    }

    fn slots(&self, kind: SlotKind) -> impl Iterator<Item = usize> + '_ {
        self.segs
            .iter()
            .enumerate()
            .filter(move |(_, s)| matches!(s, Seg::Slot { kind: k, .. } if *k == kind))
            .map(|(i, _)| i)
    }
}

/// Generates notes and ledgers from a template bank.
pub struct FixtureGenerator<'a> {
    resources: &'a StandardizationResources,
    bank: &'a TemplateBank,
    medications: &'a Gazetteer,
    findings: &'a Gazetteer,
    labels: BTreeMap<NoteField, Vec<&'a str>>,
}

const ALWAYS_PRESENT: [NoteField; 5] = [
    NoteField::ChiefComplaint,
    NoteField::InterimHistory,
    NoteField::Assessment,
    NoteField::Testing,
    NoteField::ReturnVisit,
];

impl<'a> FixtureGenerator<'a> {
    pub fn new(
        resources: &'a StandardizationResources,
        bank: &'a TemplateBank,
        medications: &'a Gazetteer,
        findings: &'a Gazetteer,
    ) -> Self {
        let mut labels: BTreeMap<NoteField, Vec<&str>> = BTreeMap::new();
        for (pattern, field) in resources.headings.rules() {
            labels.entry(*field).or_default().push(pattern);
        }
        Self { resources, bank, medications, findings, labels }
    }

    /// Generate `n` notes. Note `i` depends only on `seed` and `i`.
    pub fn generate(
        &self,
        n: usize,
        seed: u64,
        profile: &FixtureProfile,
    ) -> Result<(Vec<SourceNote>, Vec<PlantLedger>), FixtureError> {
        if n == 0 {
            return Err(FixtureError::Empty);
        }
        profile.validate()?;
        let plans = plan_corpus(n, seed, profile);
        let out: Vec<(SourceNote, PlantLedger)> = plans
            .par_iter()
            .enumerate()
            .map(|(i, plan)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                self.note(format!("SYN{i:06}"), plan, &mut rng)
            })
            .collect();
        Ok(out.into_iter().unzip())
    }

    fn pick(&self, rng: &mut ChaCha8Rng, field: NoteField) -> Sentence {
        let (_, ts) = self.bank.leaves.iter().find(|(f, _)| *f == field).expect("leaf in bank");
        Sentence::new(field, ts.choose(rng).expect("non-empty leaf"))
    }

    fn pick_with(&self, rng: &mut ChaCha8Rng, pred: impl Fn(&Template) -> bool) -> Option<Sentence> {
        let candidates: Vec<(NoteField, &Template)> = self
            .bank
            .leaves
            .iter()
            .flat_map(|(f, ts)| ts.iter().map(move |t| (*f, t)))
            .filter(|(_, t)| pred(t))
            .collect();
        candidates.choose(rng).map(|(f, t)| Sentence::new(*f, t))
    }

    fn unambiguous_abbrev(&self, seg: &Seg) -> bool {
        matches!(seg, Seg::Slot { kind: SlotKind::Abbreviation, key, .. }
            if self.resources.abbreviations.get(key).is_some_and(|e| !e.is_ambiguous()))
    }

    fn spelling_candidates(&self, s: &Sentence) -> Vec<usize> {
        let spell = &self.resources.spelling;
        (1..s.segs.len())
            .filter(|&i| s.plants[i].is_none())
            .filter(|&i| match &s.segs[i] {
                Seg::Word(w) => {
                    w.len() >= 5
                        && w.bytes().all(|b| b.is_ascii_lowercase())
                        && spell.contains(w)
                        && !spell.is_protected(w)
                        && !DUPLICABLE_WORDS.contains(&w.as_str())
                }
                _ => false,
            })
            .collect()
    }

    fn corrupt(&self, word: &str, rng: &mut ChaCha8Rng) -> Option<String> {
        let spell = &self.resources.spelling;
        let w = word.as_bytes();
        for _ in 0..24 {
            let i = rng.random_range(0..w.len());
            let c = rng.random_range(b'a'..=b'z');
            let candidate: Vec<u8> = match rng.random_range(0..4) {
                0 => [&w[..i], &w[i + 1..]].concat(),
                1 if i + 1 < w.len() => [&w[..i], &[w[i + 1], w[i]], &w[i + 2..]].concat(),
                2 => [&w[..i], &[c], &w[i + 1..]].concat(),
                _ => [&w[..i], &[c], &w[i..]].concat(),
            };
            let candidate = String::from_utf8(candidate).expect("ascii");
            if candidate == word
                || candidate.len() < crate::rules::MIN_CORRECTABLE_LEN
                || spell.contains(&candidate)
                || spell.is_protected(&candidate)
                || self.resources.abbreviations.lookup(&candidate).is_some()
            {
                continue;
            }
            let mut near = edits1(&candidate).into_iter().filter(|e| spell.contains(e));
            if near.next().as_deref() == Some(word) && near.next().is_none() {
                return Some(candidate);
            }
        }
        None
    }

    fn grammar_options(&self, s: &Sentence) -> Vec<(usize, GrammarPlant, String)> {
        let mut out = Vec::new();
        let last = s.segs.len() - 1;
        if let (Seg::Word(w), None) = (&s.segs[0], &s.plants[0]) {
            let lower = w.to_lowercase();
            let mut rest = w.chars().skip(1);
            if w.starts_with(|c: char| c.is_ascii_uppercase())
                && rest.all(|c| c.is_ascii_lowercase())
                && (lower.len() < crate::rules::MIN_CORRECTABLE_LEN
                    || self.resources.spelling.contains(&lower)
                    || self.resources.spelling.is_protected(&lower))
                && self.resources.abbreviations.lookup(&lower).is_none()
            {
                out.push((0, GrammarPlant::LowercaseStart, lower));
            }
        }
        if s.plants[last].is_none() {
            let alphabetic_words = s
                .segs
                .iter()
                .filter(|seg| matches!(seg, Seg::Word(w) if w.chars().all(char::is_alphabetic)))
                .count();
            if alphabetic_words >= 2 {
                out.push((last, GrammarPlant::MissingPeriod, String::new()));
            }
            out.push((last, GrammarPlant::SpaceBeforePunct, " .".into()));
        }
        for i in 1..last {
            if s.plants[i].is_some() {
                continue;
            }
            match &s.segs[i] {
                Seg::Gap(g) if g.starts_with(", ") => {
                    out.push((i, GrammarPlant::SpaceBeforePunct, format!(" {g}")));
                }
                Seg::Word(w) if DUPLICABLE_WORDS.contains(&w.as_str()) => {
                    let neighbour_same = [i.checked_sub(2), Some(i + 2)].into_iter().flatten().any(|j| {
                        s.segs.get(j).is_some_and(|n| n.clean().eq_ignore_ascii_case(w))
                    });
                    if !neighbour_same && s.segs[i + 1] == Seg::Gap(" ".into()) {
                        out.push((i, GrammarPlant::DuplicateWord, format!("{w} {w}")));
                    }
                }
                _ => {}
            }
        }
        out
    }

    fn noise_word(&self, rng: &mut ChaCha8Rng) -> String {
        const LETTERS: &[u8] = b"bcdfghjklmnpqrstvwxzaeiou";
        loop {
            let len = rng.random_range(6..10);
            let w: String = (0..len).map(|_| *LETTERS.choose(rng).expect("letters") as char).collect();
            if !self.resources.spelling.contains(&w)
                && !self.resources.spelling.is_protected(&w)
                && self.resources.abbreviations.lookup(&w).is_none()
                && self.resources.spelling.suggest(&w, 2) == Suggestion::NoCandidate
            {
                return w;
            }
        }
    }

    fn note(&self, accession: String, plan: &NotePlan, rng: &mut ChaCha8Rng) -> (SourceNote, PlantLedger) {
        let title = self.bank.titles.choose(rng).expect("titles").clone();
        let mut sents: Vec<Sentence> = Vec::new();
        for (field, _) in &self.bank.leaves {
            if ALWAYS_PRESENT.contains(field) || rng.random_bool(0.6) {
                sents.push(self.pick(rng, *field));
            }
        }
        let fillers: Vec<NoteField> =
            self.bank.leaves.iter().filter(|(_, ts)| ts.len() >= 3).map(|(f, _)| *f).collect();
        let (mut chars, mut terms, mut abbrevs, mut words) = (title.len(), 0, 0, 0);
        let mut leaves = HashSet::new();
        let mut tally = |s: &Sentence| {
            chars += s.render(false).len() + 1;
            if leaves.insert(s.field) {
                chars += 16;
            }
            terms += s.slots(SlotKind::Term).count();
            abbrevs += s.segs.iter().filter(|g| self.unambiguous_abbrev(g)).count();
            words += self.spelling_candidates(s).len();
            (chars, terms, abbrevs, words)
        };
        let mut totals = (0, 0, 0, 0);
        for s in &sents {
            totals = tally(s);
        }
        // planted abbreviations are shorter than their expansions
        let length = plan.length + 14 * plan.abbreviations;
        loop {
            let (chars, terms, abbrevs, words) = totals;
            let next = if terms < plan.terms {
                self.pick_with(rng, |t| t.count(SlotKind::Term) > 0)
            } else if abbrevs < plan.abbreviations {
                self.pick_with(rng, |t| t.segs.iter().any(|g| self.unambiguous_abbrev(g)))
            } else if words < 2 * plan.spelling + 4 || sents.len() < plan.grammar + 2 || chars < length {
                let field = *fillers.choose(rng).expect("filler leaves");
                Some(self.pick(rng, field))
            } else {
                None
            };
            match next {
                Some(s) => {
                    totals = tally(&s);
                    sents.push(s);
                }
                None => break,
            }
        }
        sents.sort_by_key(|s| s.field);

        for _ in 0..plan.noise {
            let k = rng.random_range(0..sents.len());
            let s = &mut sents[k];
            let at = s.segs.len() - 1;
            let junk = self.noise_word(rng);
            s.segs.insert(at, Seg::Gap(format!(" {junk}")));
            s.plants.insert(at, None);
        }

        self.plant_terms(&mut sents, plan.terms, rng);
        self.plant_abbreviations(&mut sents, plan.abbreviations, rng);
        self.plant_spelling(&mut sents, plan.spelling, rng, &fillers);
        self.plant_grammar(&mut sents, plan.grammar, rng);
        while title.len() + sents.iter().map(|s| s.render(false).len() + 1).sum::<usize>() < plan.min_length + 64 {
            let field = *fillers.choose(rng).expect("filler leaves");
            let at = sents.partition_point(|x| x.field <= field);
            sents.insert(at, self.pick(rng, field));
        }
        self.settle_ambiguous(&mut sents, &title);
        self.render(accession, &title, &sents, rng)
    }

    fn plant_terms(&self, sents: &mut [Sentence], n: usize, rng: &mut ChaCha8Rng) {
        let mut slots: Vec<(usize, usize)> = sents
            .iter()
            .enumerate()
            .flat_map(|(si, s)| s.slots(SlotKind::Term).map(move |i| (si, i)))
            .collect();
        slots.shuffle(rng);
        for (si, i) in slots.into_iter().take(n) {
            let standard = sents[si].segs[i].clean().to_string();
            let phrases: Vec<&str> = self
                .resources
                .terms
                .pairs()
                .iter()
                .filter(|p| p.standard == standard && !p.nonstandard.starts_with(|c: char| c.is_uppercase()))
                .map(|p| p.nonstandard.as_str())
                .collect();
            let phrase = phrases.choose(rng).expect("validated term slot");
            sents[si].plants[i] =
                Some(Plant { kind: PlantKind::NonStandardTerm, rule: None, text: phrase.to_string() });
        }
    }

    fn abbreviation_plant(seg: &Seg) -> Plant {
        let Seg::Slot { key, .. } = seg else { unreachable!("abbreviation slot") };
        Plant { kind: PlantKind::Abbreviation, rule: None, text: key.clone() }
    }

    fn plant_abbreviations(&self, sents: &mut [Sentence], n: usize, rng: &mut ChaCha8Rng) {
        let mut slots: Vec<(usize, usize)> = sents
            .iter()
            .enumerate()
            .flat_map(|(si, s)| s.slots(SlotKind::Abbreviation).map(move |i| (si, i)))
            .collect();
        slots.shuffle(rng);
        for (si, i) in slots.into_iter().take(n) {
            sents[si].plants[i] = Some(Self::abbreviation_plant(&sents[si].segs[i]));
        }
    }

    fn plant_spelling(&self, sents: &mut Vec<Sentence>, n: usize, rng: &mut ChaCha8Rng, fillers: &[NoteField]) {
        let mut planted = 0;
        while planted < n {
            let mut spots: Vec<(usize, usize)> = sents
                .iter()
                .enumerate()
                .flat_map(|(si, s)| self.spelling_candidates(s).into_iter().map(move |i| (si, i)))
                .collect();
            spots.shuffle(rng);
            for (si, i) in spots {
                if planted == n {
                    break;
                }
                let word = sents[si].segs[i].clean().to_string();
                if let Some(bad) = self.corrupt(&word, rng) {
                    sents[si].plants[i] = Some(Plant { kind: PlantKind::Spelling, rule: None, text: bad });
                    planted += 1;
                }
            }
            if planted < n {
                let field = *fillers.choose(rng).expect("filler leaves");
                let s = self.pick(rng, field);
                let at = sents.partition_point(|x| x.field <= field);
                sents.insert(at, s);
            }
        }
    }

    fn plant_grammar(&self, sents: &mut [Sentence], n: usize, rng: &mut ChaCha8Rng) {
        let mut order: Vec<usize> = (0..sents.len()).collect();
        order.shuffle(rng);
        let mut planted = 0;
        for si in order {
            if planted == n {
                break;
            }
            let options = self.grammar_options(&sents[si]);
            if let Some((i, rule, text)) = options.choose(rng).cloned() {
                sents[si].plants[i] = Some(Plant { kind: PlantKind::GrammarRule, rule: Some(rule), text });
                sents[si].grammar = true;
                planted += 1;
            }
        }
    }

    /// Expansion the context rule would pick for an ambiguous entry.
    fn expected_sense<'e>(entry: &'e AbbreviationEntry, window: &[String]) -> &'e str {
        let hits = |cues: &[String]| {
            cues.iter()
                .filter(|cue| {
                    let words = lower_tokens(cue);
                    !words.is_empty() && window.windows(words.len()).any(|w| w == words.as_slice())
                })
                .count()
        };
        let mut best: Option<(usize, i32, &str)> = None;
        for x in &entry.expansions {
            let h = hits(&x.context_cues);
            if h > 0 && best.is_none_or(|(bh, bp, _)| (h, x.priority) > (bh, bp)) {
                best = Some((h, x.priority, &x.expansion));
            }
        }
        best.map_or(entry.default_expansion().expansion.as_str(), |(_, _, e)| e)
    }

    /// Unplant ambiguous abbreviations whose context would select another
    /// sense, replacing each with an unambiguous one.
    fn settle_ambiguous(&self, sents: &mut [Sentence], title: &str) {
        loop {
            let mut wrong = Vec::new();
            let fields: Vec<NoteField> = {
                let mut f: Vec<NoteField> = sents.iter().map(|s| s.field).collect();
                f.dedup();
                f
            };
            for field in fields {
                let mut tokens: Vec<String> =
                    if field == NoteField::InterimHistory { lower_tokens(title) } else { Vec::new() };
                let mut sites = Vec::new();
                for (si, s) in sents.iter().enumerate().filter(|(_, s)| s.field == field) {
                    for (i, seg) in s.segs.iter().enumerate() {
                        let text = match &s.plants[i] {
                            Some(p) if !matches!(p.kind, PlantKind::Spelling | PlantKind::NonStandardTerm) => &p.text,
                            _ => seg.clean(),
                        };
                        if let (Seg::Slot { kind: SlotKind::Abbreviation, key, clean }, Some(_)) = (seg, &s.plants[i]) {
                            let entry = self.resources.abbreviations.get(key).expect("validated key");
                            if entry.is_ambiguous() {
                                sites.push((tokens.len(), si, i, entry, clean.clone()));
                            }
                        }
                        tokens.extend(lower_tokens(text));
                    }
                }
                for (at, si, i, entry, intended) in sites {
                    let lo = at.saturating_sub(crate::rules::CONTEXT_WINDOW);
                    let hi = (at + 1 + crate::rules::CONTEXT_WINDOW).min(tokens.len());
                    let window: Vec<String> = tokens[lo..at].iter().chain(&tokens[at + 1..hi]).cloned().collect();
                    if Self::expected_sense(entry, &window) != intended {
                        wrong.push((si, i));
                    }
                }
            }
            if wrong.is_empty() {
                return;
            }
            for (si, i) in wrong {
                sents[si].plants[i] = None;
                let spare = sents.iter().enumerate().find_map(|(sj, s)| {
                    (0..s.segs.len())
                        .find(|&j| s.plants[j].is_none() && self.unambiguous_abbrev(&s.segs[j]))
                        .map(|j| (sj, j))
                });
                if let Some((sj, j)) = spare {
                    sents[sj].plants[j] = Some(Self::abbreviation_plant(&sents[sj].segs[j]));
                }
            }
        }
    }

    fn render(
        &self,
        accession: String,
        title: &str,
        sents: &[Sentence],
        rng: &mut ChaCha8Rng,
    ) -> (SourceNote, PlantLedger) {
        let mut text = format!("{title}\n");
        let mut sites: Vec<(usize, bool, &Plant, &Seg)> = Vec::new();
        let mut mentions = Vec::new();
        let mut current: Option<NoteField> = None;
        for s in sents {
            if current != Some(s.field) {
                current = Some(s.field);
                let label = self.labels[&s.field].choose(rng).expect("label");
                if rng.random_bool(0.5) {
                    text.push_str(&format!("{label}: "));
                } else {
                    text.push_str(&format!("{label}:\n"));
                }
            }
            for (seg, plant) in s.segs.iter().zip(&s.plants) {
                match plant {
                    Some(p) => {
                        let punctuation = matches!(seg, Seg::Gap(_));
                        sites.push((text.len(), punctuation, p, seg));
                        text.push_str(&p.text);
                    }
                    None => text.push_str(seg.clean()),
                }
                if let Seg::Slot { kind, key, .. } = seg {
                    let (mention, gaz, extractable) = match kind {
                        SlotKind::Finding => (MentionKind::Finding, self.findings, true),
                        SlotKind::FindingDistractor => (MentionKind::Finding, self.findings, false),
                        SlotKind::Medication => (MentionKind::Medication, self.medications, true),
                        SlotKind::MedicationDistractor => (MentionKind::Medication, self.medications, false),
                        _ => continue,
                    };
                    mentions.push(PlantedMention {
                        kind: mention,
                        normalized: gaz.canonical(key).expect("validated mention"),
                        section_path: s.field.path().to_string(),
                        extractable,
                    });
                }
            }
            text.push('\n');
        }
        let starts: Vec<usize> = word_spans(&text).into_iter().map(|r| r.start).collect();
        let planted = sites
            .into_iter()
            .map(|(offset, punctuation, p, seg)| {
                let index = starts.partition_point(|&s| s < offset);
                PlantedError {
                    kind: p.kind,
                    rule: p.rule,
                    before: seg.clean().to_string(),
                    after: p.text.clone(),
                    position: if punctuation { index.saturating_sub(1) } else { index },
                }
            })
            .collect();
        (
            SourceNote::new(accession.clone(), text),
            PlantLedger { accession_num: accession, planted, mentions },
        )
    }
}

/// Generate with the built-in templates and resources.
pub fn generate_corpus(
    n: usize,
    seed: u64,
    profile: &FixtureProfile,
) -> Result<(Vec<SourceNote>, Vec<PlantLedger>), FixtureError> {
    let bank = TemplateBank::builtin()?;
    FixtureGenerator::new(
        crate::resources::builtin(),
        &bank,
        crate::resources::medications(),
        crate::resources::findings(),
    )
    .generate(n, seed, profile)
}

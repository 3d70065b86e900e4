use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::extraction::Mention;
use crate::rules::ResourceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CodeSystem {
    #[serde(rename = "SNOMED-CT")]
    SnomedCt,
    #[serde(rename = "RxNorm")]
    RxNorm,
    #[serde(rename = "LOINC")]
    Loinc,
    #[serde(rename = "ICD")]
    Icd,
}

/// Lookup order after the preferred system.
pub const FALLBACK_ORDER: [CodeSystem; 4] = [CodeSystem::SnomedCt, CodeSystem::RxNorm, CodeSystem::Loinc, CodeSystem::Icd];

impl CodeSystem {
    pub fn uri(self) -> &'static str {
        match self {
            CodeSystem::SnomedCt => "http://snomed.info/sct",
            CodeSystem::RxNorm => "http://www.nlm.nih.gov/research/umls/rxnorm",
            CodeSystem::Loinc => "http://loinc.org",
            CodeSystem::Icd => "http://hl7.org/fhir/sid/icd-10-cm",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CodeSystem::SnomedCt => "SNOMED-CT",
            CodeSystem::RxNorm => "RxNorm",
            CodeSystem::Loinc => "LOINC",
            CodeSystem::Icd => "ICD",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        FALLBACK_ORDER.into_iter().find(|c| c.label().eq_ignore_ascii_case(s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptMapEntry {
    pub normalized_term: String,
    pub system: CodeSystem,
    pub code: String,
    pub display: String,
}

#[derive(Deserialize)]
struct ConceptFile {
    entries: Vec<ConceptMapEntry>,
}

/// Local concept table keyed by (lowercase term, system).
#[derive(Debug, Clone, Default)]
pub struct ConceptMap {
    entries: Vec<ConceptMapEntry>,
    index: HashMap<(String, CodeSystem), usize>,
}

impl ConceptMap {
    pub fn new(entries: Vec<ConceptMapEntry>) -> Result<Self, ResourceError> {
        let mut index = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            let invalid = |reason: String| ResourceError::Invalid { resource: "concept_map", reason };
            if e.code.trim().is_empty() {
                return Err(invalid(format!("`{}` has an empty code", e.normalized_term)));
            }
            if index.insert((e.normalized_term.to_lowercase(), e.system), i).is_some() {
                return Err(invalid(format!("duplicate ({}, {})", e.normalized_term, e.system.label())));
            }
        }
        Ok(Self { entries, index })
    }

    pub fn from_json(json: &str) -> Result<Self, ResourceError> {
        let file: ConceptFile = serde_json::from_str(json).map_err(|source| ResourceError::Json {
            resource: "concept_map",
            source,
        })?;
        Self::new(file.entries)
    }

    pub fn entries(&self) -> &[ConceptMapEntry] {
        &self.entries
    }

    pub fn get(&self, term: &str, system: CodeSystem) -> Option<&ConceptMapEntry> {
        self.index.get(&(term.to_lowercase(), system)).map(|&i| &self.entries[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mapping {
    Mapped(ConceptMapEntry),
    Unmapped(String),
}

/// Exact lookup of the mention's normalized term, trying `preferred` first and
/// then [`FALLBACK_ORDER`].
pub fn map_to_ontology(mention: &Mention, table: &ConceptMap, preferred: CodeSystem) -> Mapping {
    std::iter::once(preferred)
        .chain(FALLBACK_ORDER.into_iter().filter(|s| *s != preferred))
        .find_map(|s| table.get(&mention.normalized, s))
        .map(|e| Mapping::Mapped(e.clone()))
        .unwrap_or_else(|| Mapping::Unmapped(mention.normalized.clone()))
}

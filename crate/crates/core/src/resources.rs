//! Built-in resource files and loading from a directory.

use std::path::Path;
use std::sync::OnceLock;

use crate::extraction::Gazetteer;
use crate::interop::ConceptMap;
use crate::rules::{
    AbbreviationLexicon, HeadingSynonyms, ResourceError, SpellLexicon, SpellingConfig,
    StandardizationResources, TermMap,
};

pub const ABBREVIATIONS_JSON: &str = include_str!("../resources/abbreviations.json");
pub const TERMS_JSON: &str = include_str!("../resources/terms.json");
pub const VOCABULARY_TXT: &str = include_str!("../resources/vocabulary.txt");
pub const SPELLING_JSON: &str = include_str!("../resources/spelling.json");
pub const HEADINGS_JSON: &str = include_str!("../resources/headings.json");
pub const MEDICATIONS_JSON: &str = include_str!("../resources/medications.json");
pub const FINDINGS_JSON: &str = include_str!("../resources/findings.json");
pub const CONCEPT_MAP_JSON: &str = include_str!("../resources/concept_map.json");
pub const TEMPLATES_JSON: &str = include_str!("../resources/templates.json");
pub const RATING_THRESHOLDS_JSON: &str = include_str!("../resources/rating_thresholds.json");

/// Names of the files `load_dir` looks for; missing files fall back to the built-in copy.
pub const FILE_NAMES: [&str; 5] = [
    "abbreviations.json",
    "terms.json",
    "vocabulary.txt",
    "spelling.json",
    "headings.json",
];

/// Parse standardization resources from their text forms.
pub fn parse(
    abbreviations: &str,
    terms: &str,
    vocabulary: &str,
    spelling: &str,
    headings: &str,
) -> Result<StandardizationResources, ResourceError> {
    let config: SpellingConfig = serde_json::from_str(spelling).map_err(|source| ResourceError::Json {
        resource: "spelling",
        source,
    })?;
    Ok(StandardizationResources::new(
        AbbreviationLexicon::from_json(abbreviations)?,
        TermMap::from_json(terms)?,
        SpellLexicon::from_text(vocabulary, &config)?,
        HeadingSynonyms::from_json(headings)?,
    ))
}

/// The shipped resources, parsed once.
pub fn builtin() -> &'static StandardizationResources {
    static CELL: OnceLock<StandardizationResources> = OnceLock::new();
    CELL.get_or_init(|| {
        parse(ABBREVIATIONS_JSON, TERMS_JSON, VOCABULARY_TXT, SPELLING_JSON, HEADINGS_JSON)
            .expect("built-in resources are valid")
    })
}

pub(crate) fn read_or(dir: &Path, name: &str, fallback: &'static str) -> Result<String, ResourceError> {
    let path = dir.join(name);
    if !path.exists() {
        return Ok(fallback.to_string());
    }
    std::fs::read_to_string(&path).map_err(|source| ResourceError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Load resources from `dir`, using the built-in copy of any file that is absent.
pub fn load_dir(dir: &Path) -> Result<StandardizationResources, ResourceError> {
    parse(
        &read_or(dir, "abbreviations.json", ABBREVIATIONS_JSON)?,
        &read_or(dir, "terms.json", TERMS_JSON)?,
        &read_or(dir, "vocabulary.txt", VOCABULARY_TXT)?,
        &read_or(dir, "spelling.json", SPELLING_JSON)?,
        &read_or(dir, "headings.json", HEADINGS_JSON)?,
    )
}

/// Built-in medication gazetteer.
pub fn medications() -> &'static Gazetteer {
    static CELL: OnceLock<Gazetteer> = OnceLock::new();
    CELL.get_or_init(|| Gazetteer::from_json(MEDICATIONS_JSON).expect("built-in medications are valid"))
}

/// Built-in sign and symptom gazetteer.
pub fn findings() -> &'static Gazetteer {
    static CELL: OnceLock<Gazetteer> = OnceLock::new();
    CELL.get_or_init(|| Gazetteer::from_json(FINDINGS_JSON).expect("built-in findings are valid"))
}

/// Built-in concept table (placeholder codes).
pub fn concept_map() -> &'static ConceptMap {
    static CELL: OnceLock<ConceptMap> = OnceLock::new();
    CELL.get_or_init(|| ConceptMap::from_json(CONCEPT_MAP_JSON).expect("built-in concept map is valid"))
}

pub fn load_gazetteer(dir: &Path, name: &str, fallback: &'static str) -> Result<Gazetteer, ResourceError> {
    Gazetteer::from_json(&read_or(dir, name, fallback)?)
}

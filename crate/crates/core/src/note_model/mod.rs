//! Canonical standardized-note schema, structural validation, and salvage of
//! near-miss JSON produced by language-model backends.

mod repair;
mod schema;
mod validate;

pub use repair::{repair_json, RepairError};
pub use schema::{
    EducationProvided, NoteField, NoteMetrics, Section, SectionExam, SectionHistory,
    SectionImpression, SectionPlan, SectionVitals, StandardizedNote,
};
pub use validate::{
    coerce_note, schema_key_paths, validate_note, CoercionError, ValidationReport, Violation,
    ViolationKind,
};

/// Pretty-print with 4-space indentation, the form used for human review files.
pub fn to_pretty_json<T: serde::Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let fmt = serde_json::ser::PrettyFormatter::with_indent(b"    ");
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

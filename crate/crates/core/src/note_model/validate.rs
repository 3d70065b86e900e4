use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use super::schema::StandardizedNote;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    MissingKey,
    WrongType,
    UnknownKey,
    BadValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// JSON-pointer path, e.g. `/Metrics/Grammatical Errors`.
    pub path: String,
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Error)]
pub enum CoercionError {
    #[error("cannot coerce candidate: {0:?}")]
    CoercionFailed(Vec<Violation>),
}

enum Shape {
    Str,
    Count,
    StrList,
    Obj(&'static [(&'static str, Shape)]),
}

const SCHEMA: Shape = Shape::Obj(&[
    (
        "HISTORY",
        Shape::Obj(&[("Chief Complaint", Shape::Str), ("Interim History", Shape::Str)]),
    ),
    (
        "VITAL SIGNS",
        Shape::Obj(&[
            ("Blood Pressure", Shape::Str),
            ("Pulse", Shape::Str),
            ("Temperature", Shape::Str),
            ("Weight", Shape::Str),
        ]),
    ),
    (
        "EXAMINATION",
        Shape::Obj(&[
            ("Mental Status", Shape::Str),
            ("Cranial Nerves", Shape::Str),
            ("Motor", Shape::Str),
            ("Sensory", Shape::Str),
            ("Reflexes", Shape::Str),
            ("Coordination", Shape::Str),
            ("Gait and Station", Shape::Str),
        ]),
    ),
    ("LABS", Shape::Str),
    ("RADIOLOGY", Shape::Str),
    ("IMPRESSION", Shape::Obj(&[("Assessment", Shape::Str)])),
    (
        "PLAN",
        Shape::Obj(&[
            ("Testing", Shape::Str),
            (
                "Education Provided",
                Shape::Obj(&[
                    ("Instructions", Shape::Str),
                    ("Barriers to Learning", Shape::Str),
                    ("Content", Shape::Str),
                    ("Outcome", Shape::Str),
                ]),
            ),
            ("Return Visit", Shape::Str),
        ]),
    ),
    (
        "Metrics",
        Shape::Obj(&[
            ("Grammatical Errors", Shape::Count),
            ("Abbreviations Expanded", Shape::StrList),
            ("Spelling Errors", Shape::StrList),
            ("Non-Standard Terms", Shape::StrList),
        ]),
    ),
]);

/// Every key path of the external schema as a JSON pointer, depth first.
pub fn schema_key_paths() -> Vec<String> {
    fn walk(shape: &Shape, prefix: &str, out: &mut Vec<String>) {
        if let Shape::Obj(fields) = shape {
            for (key, sub) in *fields {
                let path = format!("{prefix}/{}", escape(key));
                out.push(path.clone());
                walk(sub, &path, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(&SCHEMA, "", &mut out);
    out
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

fn check(shape: &Shape, value: &Value, path: &str, out: &mut Vec<Violation>) {
    let wrong = |expected: &str| Violation {
        path: path.to_string(),
        kind: ViolationKind::WrongType,
        detail: format!("expected {expected}, found {}", type_name(value)),
    };
    match shape {
        Shape::Str => {
            if !value.is_string() {
                out.push(wrong("string"));
            }
        }
        Shape::Count => match value {
            Value::Number(n) if n.is_u64() => {}
            Value::Number(n) if n.is_i64() => out.push(Violation {
                path: path.to_string(),
                kind: ViolationKind::BadValue,
                detail: format!("count must be non-negative, found {n}"),
            }),
            _ => out.push(wrong("non-negative integer")),
        },
        Shape::StrList => match value {
            Value::Array(items) => {
                for (i, item) in items.iter().enumerate() {
                    let item_path = format!("{path}/{i}");
                    match item {
                        Value::String(s) if s.trim().is_empty() => out.push(Violation {
                            path: item_path,
                            kind: ViolationKind::BadValue,
                            detail: "list entries must be non-empty".into(),
                        }),
                        Value::String(_) => {}
                        other => out.push(Violation {
                            path: item_path,
                            kind: ViolationKind::WrongType,
                            detail: format!("expected string, found {}", type_name(other)),
                        }),
                    }
                }
            }
            _ => out.push(wrong("array of strings")),
        },
        Shape::Obj(fields) => {
            let Value::Object(map) = value else {
                out.push(wrong("object"));
                return;
            };
            for (key, sub) in *fields {
                let sub_path = format!("{path}/{}", escape(key));
                match map.get(*key) {
                    Some(v) => check(sub, v, &sub_path, out),
                    None => out.push(Violation {
                        path: sub_path,
                        kind: ViolationKind::MissingKey,
                        detail: format!("missing key `{key}`"),
                    }),
                }
            }
            for key in map.keys() {
                if !fields.iter().any(|(k, _)| k == key) {
                    out.push(Violation {
                        path: format!("{path}/{}", escape(key)),
                        kind: ViolationKind::UnknownKey,
                        detail: format!("unexpected key `{key}`"),
                    });
                }
            }
        }
    }
}

/// Structural validation against the canonical schema. Never fails; all
/// problems are report entries.
pub fn validate_note(candidate: &Value) -> ValidationReport {
    let mut violations = Vec::new();
    check(&SCHEMA, candidate, "", &mut violations);
    ValidationReport {
        valid: violations.is_empty(),
        violations,
    }
}

fn fill(shape: &Shape, value: Option<&Value>, path: &str, errs: &mut Vec<Violation>) -> Value {
    // Missing keys and nulls take the leaf default.
    let value = value.filter(|v| !v.is_null());
    match shape {
        Shape::Str => value.cloned().unwrap_or_else(|| Value::String(String::new())),
        Shape::Count => value.cloned().unwrap_or_else(|| Value::from(0u64)),
        Shape::StrList => value.cloned().unwrap_or_else(|| Value::Array(Vec::new())),
        Shape::Obj(fields) => {
            let empty = Map::new();
            let map = match value {
                None => &empty,
                Some(Value::Object(m)) => m,
                Some(other) => {
                    errs.push(Violation {
                        path: path.to_string(),
                        kind: ViolationKind::WrongType,
                        detail: format!("expected object, found {}", type_name(other)),
                    });
                    return Value::Null;
                }
            };
            let mut out = Map::new();
            for (key, sub) in *fields {
                let sub_path = format!("{path}/{}", escape(key));
                out.insert(key.to_string(), fill(sub, map.get(*key), &sub_path, errs));
            }
            for key in map.keys() {
                if !fields.iter().any(|(k, _)| k == key) {
                    out.insert(key.clone(), map[key].clone());
                }
            }
            Value::Object(out)
        }
    }
}

/// Fill missing leaves with defaults ("" for strings, 0 for the count, [] for
/// lists) and convert to a typed note. Any damage other than missing keys or
/// null leaves is a [`CoercionError`].
pub fn coerce_note(candidate: &Value) -> Result<StandardizedNote, CoercionError> {
    let mut errs = Vec::new();
    let filled = fill(&SCHEMA, Some(candidate), "", &mut errs);
    if !errs.is_empty() {
        return Err(CoercionError::CoercionFailed(errs));
    }
    let report = validate_note(&filled);
    if !report.valid {
        return Err(CoercionError::CoercionFailed(report.violations));
    }
    serde_json::from_value(filled).map_err(|e| {
        CoercionError::CoercionFailed(vec![Violation {
            path: String::new(),
            kind: ViolationKind::BadValue,
            detail: e.to_string(),
        }])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::note_model::StandardizedNote;
    use serde_json::json;

    fn golden() -> Value {
        json!({
            "HISTORY": {"Chief Complaint": "New onset of double vision.", "Interim History": "History of optic neuritis and numbness."},
            "VITAL SIGNS": {"Blood Pressure": "120/80", "Pulse": "72", "Temperature": "36.8 C", "Weight": "70 kg"},
            "EXAMINATION": {"Mental Status": "Alert.", "Cranial Nerves": "Internuclear ophthalmoplegia.", "Motor": "Normal.",
                "Sensory": "Intact.", "Reflexes": "Increased reflexes. Babinski sign.", "Coordination": "Normal.", "Gait and Station": "Normal."},
            "LABS": "",
            "RADIOLOGY": "",
            "IMPRESSION": {"Assessment": "Probable multiple sclerosis."},
            "PLAN": {"Testing": "Magnetic resonance imaging (MRI) of brain.",
                "Education Provided": {"Instructions": "", "Barriers to Learning": "", "Content": "", "Outcome": ""},
                "Return Visit": ""},
            "Metrics": {"Grammatical Errors": 0, "Abbreviations Expanded": ["MRI -> magnetic resonance imaging (MRI)"],
                "Spelling Errors": ["methlylprednisolone -> methylprednisolone"], "Non-Standard Terms": []}
        })
    }

    #[test]
    fn golden_note_is_valid() {
        let r = validate_note(&golden());
        assert!(r.valid, "{:?}", r.violations);
    }

    #[test]
    fn empty_object_reports_eight_missing_sections() {
        let r = validate_note(&json!({}));
        assert!(!r.valid);
        let paths: Vec<&str> = r.violations.iter().map(|v| v.path.as_str()).collect();
        assert_eq!(
            paths,
            ["/HISTORY", "/VITAL SIGNS", "/EXAMINATION", "/LABS", "/RADIOLOGY", "/IMPRESSION", "/PLAN", "/Metrics"]
        );
        assert!(r.violations.iter().all(|v| v.kind == ViolationKind::MissingKey));
    }

    #[test]
    fn string_count_is_one_wrong_type() {
        let mut v = golden();
        v["Metrics"]["Grammatical Errors"] = json!("three");
        let r = validate_note(&v);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].path, "/Metrics/Grammatical Errors");
        assert_eq!(r.violations[0].kind, ViolationKind::WrongType);
    }

    #[test]
    fn negative_count_and_empty_entry_are_bad_values() {
        let mut v = golden();
        v["Metrics"]["Grammatical Errors"] = json!(-2);
        v["Metrics"]["Spelling Errors"] = json!(["a -> b", " "]);
        let r = validate_note(&v);
        let kinds: Vec<_> = r.violations.iter().map(|x| (x.path.as_str(), x.kind)).collect();
        assert_eq!(
            kinds,
            [
                ("/Metrics/Grammatical Errors", ViolationKind::BadValue),
                ("/Metrics/Spelling Errors/1", ViolationKind::BadValue)
            ]
        );
    }

    #[test]
    fn unknown_key_is_reported_with_escaped_path() {
        let mut v = golden();
        v["PLAN"]["Follow/up"] = json!("x");
        let r = validate_note(&v);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].path, "/PLAN/Follow~1up");
        assert_eq!(r.violations[0].kind, ViolationKind::UnknownKey);
    }

    #[test]
    fn coerce_identity_on_valid_note() {
        let note = coerce_note(&golden()).unwrap();
        assert_eq!(serde_json::to_value(&note).unwrap(), golden());
    }

    #[test]
    fn coerce_fills_exactly_one_missing_leaf() {
        let mut v = golden();
        v["PLAN"].as_object_mut().unwrap().remove("Return Visit");
        let note = coerce_note(&v).unwrap();
        let back = serde_json::to_value(&note).unwrap();
        assert_eq!(back, golden());
        assert_eq!(note.plan.return_visit, "");
    }

    #[test]
    fn coerce_rejects_structural_damage() {
        let mut v = golden();
        v["HISTORY"] = json!("a string");
        assert!(coerce_note(&v).is_err());
        let mut v = golden();
        v["EXTRA"] = json!({});
        assert!(coerce_note(&v).is_err());
    }

    #[test]
    fn coerce_of_empty_object_is_default_note() {
        assert_eq!(coerce_note(&json!({})).unwrap(), StandardizedNote::default());
    }

    #[test]
    fn coerce_is_idempotent() {
        let mut v = golden();
        v["Metrics"].as_object_mut().unwrap().remove("Spelling Errors");
        v["LABS"] = Value::Null;
        let once = coerce_note(&v).unwrap();
        let twice = coerce_note(&serde_json::to_value(&once).unwrap()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn thirty_three_schema_keys() {
        let keys = schema_key_paths();
        assert_eq!(keys.len(), 33);
        assert_eq!(keys[0], "/HISTORY");
        assert_eq!(keys.last().unwrap(), "/Metrics/Non-Standard Terms");
    }
}

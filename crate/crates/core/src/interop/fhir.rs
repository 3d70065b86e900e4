use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use uuid::Uuid;

use super::concept::Mapping;
use crate::extraction::{Mention, MentionKind};

pub const PROVENANCE_EXTENSION_URL: &str = "urn:notestd:extension:section-provenance";
pub const UNMAPPED_TAG: &str = "unmapped";
const TAG_SYSTEM: &str = "urn:notestd:tag";
const ID_NAMESPACE: Uuid = Uuid::from_u128(0x6c0f_5a1e_93b2_4d57_a0e4_2f1d_8c3b_7e19);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResourceType {
    Observation,
    MedicationStatement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coding {
    pub system: String,
    pub code: String,
    pub display: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteropResource {
    pub resource_type: ResourceType,
    pub subject_ref: String,
    /// `None` when the term could not be mapped.
    pub coding: Option<Coding>,
    pub text: String,
    pub section_provenance: String,
}

/// Findings become Observations, medications MedicationStatements.
pub fn to_resource(mention: &Mention, mapping: &Mapping) -> InteropResource {
    InteropResource {
        resource_type: match mention.kind {
            MentionKind::Finding => ResourceType::Observation,
            MentionKind::Medication => ResourceType::MedicationStatement,
        },
        subject_ref: format!("Patient/acc-{}", mention.accession_num),
        coding: match mapping {
            Mapping::Mapped(e) => Some(Coding {
                system: e.system.uri().to_string(),
                code: e.code.clone(),
                display: e.display.clone(),
            }),
            Mapping::Unmapped(_) => None,
        },
        text: mention.surface.clone(),
        section_provenance: mention.section_path.clone(),
    }
}

impl InteropResource {
    /// FHIR R4 JSON. The concept goes in `code` for Observation and in
    /// `medicationCodeableConcept` for MedicationStatement.
    pub fn to_fhir(&self, id: &str) -> Value {
        let mut concept = json!({"text": self.text});
        if let Some(c) = &self.coding {
            concept["coding"] = json!([{"system": c.system, "code": c.code, "display": c.display}]);
        }
        let (kind, concept_key) = match self.resource_type {
            ResourceType::Observation => ("Observation", "code"),
            ResourceType::MedicationStatement => ("MedicationStatement", "medicationCodeableConcept"),
        };
        let mut r = json!({
            "resourceType": kind,
            "id": id,
            "status": "unknown",
        });
        r[concept_key] = concept;
        r["subject"] = json!({"reference": self.subject_ref});
        r["extension"] = json!([{"url": PROVENANCE_EXTENSION_URL, "valueString": self.section_provenance}]);
        if self.coding.is_none() {
            r["meta"] = json!({"tag": [{"system": TAG_SYSTEM, "code": UNMAPPED_TAG}]});
        }
        r
    }
}

fn resource_id(r: &InteropResource, position: usize) -> Uuid {
    let name = format!(
        "{position}|{:?}|{}|{}|{}",
        r.resource_type, r.subject_ref, r.section_provenance, r.text
    );
    Uuid::new_v5(&ID_NAMESPACE, name.as_bytes())
}

/// A `collection` Bundle with one entry per resource, in order.
pub fn bundle_value(resources: &[InteropResource]) -> Value {
    let entries: Vec<Value> = resources
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let id = resource_id(r, i);
            json!({"fullUrl": format!("urn:uuid:{id}"), "resource": r.to_fhir(&id.to_string())})
        })
        .collect();
    json!({
        "resourceType": "Bundle",
        "type": "collection",
        "total": entries.len(),
        "entry": entries,
    })
}

pub fn bundle(resources: &[InteropResource]) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&bundle_value(resources)).expect("serializable");
    out.push(b'\n');
    out
}

/// What a consumer can recover from each bundle entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundledTriple {
    pub resource_type: String,
    pub code: Option<String>,
    pub text: String,
    pub provenance: String,
}

/// Read back the entries of a bundle produced by [`bundle`].
pub fn parse_bundle(bytes: &[u8]) -> Result<Vec<BundledTriple>, String> {
    let v: Value = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
    if v["resourceType"] != "Bundle" {
        return Err("not a Bundle".into());
    }
    let entries = v["entry"].as_array().ok_or("Bundle has no entry array")?;
    entries
        .iter()
        .map(|e| {
            let r = &e["resource"];
            let resource_type = r["resourceType"].as_str().ok_or("entry without resourceType")?.to_string();
            let concept = if resource_type == "MedicationStatement" {
                &r["medicationCodeableConcept"]
            } else {
                &r["code"]
            };
            let provenance = r["extension"]
                .as_array()
                .and_then(|xs| xs.iter().find(|x| x["url"] == PROVENANCE_EXTENSION_URL))
                .and_then(|x| x["valueString"].as_str())
                .ok_or("entry without section provenance")?
                .to_string();
            Ok(BundledTriple {
                resource_type,
                code: concept["coding"][0]["code"].as_str().map(str::to_string),
                text: concept["text"].as_str().ok_or("concept without text")?.to_string(),
                provenance,
            })
        })
        .collect()
}

/// Gap report: one row per unmapped normalized term with the number of mentions.
pub fn write_unmapped_csv(mentions: &[(Mention, Mapping)], sink: impl std::io::Write) -> csv::Result<()> {
    let mut counts: std::collections::BTreeMap<(String, &str), u64> = Default::default();
    for (m, mapping) in mentions {
        if let Mapping::Unmapped(term) = mapping {
            let kind = match m.kind {
                MentionKind::Medication => "medication",
                MentionKind::Finding => "finding",
            };
            *counts.entry((term.clone(), kind)).or_default() += 1;
        }
    }
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["term", "kind", "mentions"])?;
    for ((term, kind), n) in counts {
        w.write_record([term.as_str(), kind, &n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interop::{CodeSystem, ConceptMapEntry};

    fn finding() -> Mention {
        Mention {
            accession_num: "12".into(),
            kind: MentionKind::Finding,
            surface: "tingling".into(),
            normalized: "paresthesias".into(),
            section_path: "HISTORY/Interim History".into(),
        }
    }

    fn mapped() -> Mapping {
        Mapping::Mapped(ConceptMapEntry {
            normalized_term: "paresthesias".into(),
            system: CodeSystem::SnomedCt,
            code: "TEST-001".into(),
            display: "Paresthesia".into(),
        })
    }

    #[test]
    fn observation_matches_golden_shape() {
        let r = to_resource(&finding(), &mapped());
        let golden: Value = serde_json::from_str(
            r#"{
                "resourceType": "Observation",
                "id": "x",
                "status": "unknown",
                "code": {
                    "text": "tingling",
                    "coding": [{"system": "http://snomed.info/sct", "code": "TEST-001", "display": "Paresthesia"}]
                },
                "subject": {"reference": "Patient/acc-12"},
                "extension": [{"url": "urn:notestd:extension:section-provenance", "valueString": "HISTORY/Interim History"}]
            }"#,
        )
        .unwrap();
        assert_eq!(r.to_fhir("x"), golden);
    }

    #[test]
    fn unmapped_medication() {
        let m = Mention { kind: MentionKind::Medication, surface: "ocrelizumab".into(), normalized: "ocrelizumab".into(), section_path: "PLAN/Testing".into(), ..finding() };
        let r = to_resource(&m, &Mapping::Unmapped("ocrelizumab".into()));
        assert_eq!(r.resource_type, ResourceType::MedicationStatement);
        let v = r.to_fhir("y");
        assert_eq!(v["medicationCodeableConcept"], json!({"text": "ocrelizumab"}));
        assert_eq!(v["meta"]["tag"][0]["code"], "unmapped");
        assert!(v.get("code").is_none());
    }

    #[test]
    fn bundles() {
        let empty: Value = serde_json::from_slice(&bundle(&[])).unwrap();
        assert_eq!(empty["type"], "collection");
        assert_eq!(empty["entry"].as_array().unwrap().len(), 0);
        let a = to_resource(&finding(), &mapped());
        let b = to_resource(&Mention { surface: "numb".into(), ..finding() }, &Mapping::Unmapped("numbness".into()));
        let bytes = bundle(&[a.clone(), b.clone()]);
        let back = parse_bundle(&bytes).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].code.as_deref(), Some("TEST-001"));
        assert_eq!(back[1].text, "numb");
        assert_eq!(back[1].code, None);
        assert_eq!(bytes, bundle(&[a, b]));
    }

    #[test]
    fn gap_report() {
        let rows = vec![(finding(), Mapping::Unmapped("paresthesias".into())), (finding(), mapped())];
        let mut out = Vec::new();
        write_unmapped_csv(&rows, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "term,kind,mentions\nparesthesias,finding,1\n");
    }
}

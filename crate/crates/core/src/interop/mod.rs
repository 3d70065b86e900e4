//! Ontology mapping of extracted mentions and FHIR R4-shaped output.

mod concept;
mod fhir;

pub use concept::{map_to_ontology, CodeSystem, ConceptMap, ConceptMapEntry, Mapping, FALLBACK_ORDER};
pub use fhir::{
    bundle, bundle_value, parse_bundle, to_resource, write_unmapped_csv, BundledTriple, Coding, InteropResource,
    ResourceType, PROVENANCE_EXTENSION_URL, UNMAPPED_TAG,
};

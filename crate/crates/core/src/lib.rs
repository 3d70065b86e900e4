//! Clinical note standardization pipeline.
//!
//! Source notes are parsed and filtered ([`corpus`]), standardized into the
//! canonical sectioned form ([`note_model`]) by either the deterministic
//! [`rules`] engine or a remote [`llm`] backend, summarized ([`pipeline`]),
//! mined for medications and findings ([`extraction`]), mapped to ontology
//! codes and FHIR-shaped resources ([`interop`]) and checked for content loss
//! and quality ([`evaluation`]). [`fixtures`] generates synthetic corpora with
//! a ledger of every planted error.

pub mod corpus;
pub mod evaluation;
pub mod extraction;
pub mod fixtures;
pub mod interop;
pub mod llm;
pub mod note_model;
pub mod pipeline;
pub mod resources;
pub mod rules;
pub mod text;

pub use corpus::{FilterCriteria, SourceNote};
pub use note_model::{NoteField, NoteMetrics, Section, StandardizedNote};

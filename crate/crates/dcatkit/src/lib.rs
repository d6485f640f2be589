//! Toolkit for DCAT-style application profiles: compile SHACL shapes
//! (JSON-LD) into a schema IR, layer the provenance (DCAT-AP+) and chemistry
//! (ChemDCAT-AP) extensions on top, validate instance metadata documents,
//! and emit RDF, SHACL, JSON Schema and Markdown artifacts.

pub mod artifact;
pub mod extend;
pub mod harvest;
pub mod ingest;
pub mod instance;
pub mod ir;
pub mod iri;
pub mod project;
pub mod rdf;
pub mod report;
pub mod resources;
pub mod validate;

pub use ir::{ClassDef, DatatypeDef, MaxCard, RangeSpec, SchemaIR, SlotDef};
pub use report::{Finding, Severity, ValidationReport};

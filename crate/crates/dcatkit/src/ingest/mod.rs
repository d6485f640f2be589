//! SHACL application-profile ingestion: a minimal JSON-LD subset reader, a
//! shapes model, and the compiler that turns shapes into a [`SchemaIR`].
//!
//! Node shapes with a `targetClass` pointing to an ontology class become IR
//! classes; those designating an XSD datatype become IR datatypes; property
//! shapes become slots. `targetClass` and `path` IRIs are preserved verbatim
//! as `class_uri` and `slot_uri`.

mod compile;
mod from_triples;
mod jsonld;

pub use compile::{compile, CompiledProfile};
pub use from_triples::shapes_from_triples;
pub use jsonld::{parse_jsonld, parse_jsonld_with_context};

use crate::ir::IrError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Parsed shapes document: prefixes, node shapes in document order, and
/// non-fatal parse warnings.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ShapeGraph {
    pub prefix_map: BTreeMap<String, String>,
    pub node_shapes: Vec<NodeShape>,
    pub parse_warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct NodeShape {
    /// IRI or synthesized blank id (`_:ns<N>` in document order).
    pub id: String,
    /// Absolute IRI of the target class or XSD datatype, when present.
    pub target_class: Option<String>,
    pub property_shapes: Vec<PropertyShape>,
    pub description: Option<String>,
}

/// One `sh:or` alternative: class and/or datatype constraint IRIs.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OrBranch {
    pub classes: Vec<String>,
    pub datatypes: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PropertyShape {
    /// IRI or synthesized blank id (`_:ps<N>` in document order).
    pub id: String,
    /// `sh:path` IRI; property shapes without one are skipped with a warning.
    pub path: Option<String>,
    pub name: Option<String>,
    pub min_count: Option<u32>,
    pub max_count: Option<u32>,
    pub class_constraints: Vec<String>,
    pub datatype_constraints: Vec<String>,
    pub or_branches: Vec<OrBranch>,
    pub description: Option<String>,
    /// `sh:nodeKind sh:IRI` without any other constraint maps to `anyURI`.
    pub node_kind_iri: bool,
    /// `sh:pattern`, used to recover named datatypes with lexical rules.
    pub pattern: Option<String>,
}

impl PropertyShape {
    pub fn new(id: String) -> Self {
        PropertyShape {
            id,
            ..Default::default()
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed JSON: {0}")]
    MalformedJson(#[from] serde_json::Error),
    #[error("missing context: cannot resolve compact IRI `{0}`")]
    MissingContext(String),
    #[error("remote @context `{0}` is not fetched; supply a local context override")]
    RemoteContext(String),
    #[error("document root is not a JSON object")]
    NotAnObject,
    #[error("shape {shape}: unresolved range IRI {iri}")]
    UnresolvedRange { shape: String, iri: String },
    #[error("compiled profile violates IR invariants: {0}")]
    Invalid(#[from] IrError),
}

//! Downstream artifact generation from a compiled profile: SHACL shapes,
//! JSON Schema, and Markdown documentation.

mod docs;
mod jsonschema;
mod shacl;

pub use docs::gen_docs;
pub use jsonschema::{gen_jsonschema, to_pretty_json};
pub use shacl::{gen_shacl, IriMode, ShapeIriPolicy};

use crate::ir::IrError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("shape IRI policy produced a collision: {0}")]
    PolicyCollision(String),
    #[error("shape IRI policy produced an invalid IRI: {0}")]
    InvalidPolicyIri(String),
    #[error("unknown root class: {0}")]
    UnknownRootClass(String),
    #[error(transparent)]
    Ir(#[from] IrError),
}

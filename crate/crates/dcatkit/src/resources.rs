//! Bundled fixtures: the dcat-ap-mini shapes document and two instance
//! documents. The built-in extension layers live in [`crate::extend`].

/// SHACL shapes (JSON-LD) for a trimmed-down DCAT-AP: 10 class shapes plus
/// date and duration datatype shapes.
pub const DCAT_AP_MINI_JSONLD: &str = include_str!("../resources/dcat-ap-mini.jsonld");

/// A 13C NMR measurement record, valid against the chem profile
/// (root class `Dataset`).
pub const NMR_DATASET_YAML: &str = include_str!("../resources/instances/nmr_dataset.yaml");

/// A catalog document, valid against the dcat-ap-mini profile
/// (root class `Catalog`).
pub const CATALOG_YAML: &str = include_str!("../resources/instances/catalog.yaml");

use crate::extend::{apply_chem_layer, inject_provenance_layer};
use crate::ingest::{compile, parse_jsonld, IngestError};
use crate::ir::SchemaIR;

pub const MINI_PROFILE_ID: &str = "dcat-ap-mini";

/// Compile the bundled mini profile.
pub fn mini_profile() -> Result<SchemaIR, IngestError> {
    let shapes = parse_jsonld(DCAT_AP_MINI_JSONLD.as_bytes())?;
    Ok(compile(&shapes, MINI_PROFILE_ID)?.ir)
}

/// Mini profile with the provenance layer injected.
pub fn plus_profile() -> Result<SchemaIR, Box<dyn std::error::Error>> {
    Ok(inject_provenance_layer(&mini_profile()?)?)
}

/// Mini profile with both built-in layers applied.
pub fn chem_profile() -> Result<SchemaIR, Box<dyn std::error::Error>> {
    Ok(apply_chem_layer(&plus_profile()?)?)
}

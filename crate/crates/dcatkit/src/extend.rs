//! Profile extension layers: the `.layer.json` format, materialization into
//! an extension IR, the rule-checking linter, and the two built-in layers
//! (DCAT-AP+ provenance core, ChemDCAT-AP chemistry).

use crate::ir::{
    merge_layers, ClassDef, DatatypeDef, IrError, MaxCard, RangeSpec, SchemaIR, SlotDef,
};
use crate::report::{rules, Finding, ValidationReport};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::LazyLock;
use thiserror::Error;

pub const PROV_ACTIVITY: &str = "http://www.w3.org/ns/prov#Activity";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardinalityOverride {
    pub class: String,
    pub slot: String,
    pub min: u32,
    pub max: MaxCard,
}

/// A declarative profile extension, shippable as `.layer.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionLayer {
    pub id: String,
    #[serde(default = "default_version")]
    pub version: String,
    pub layer_of: String,
    #[serde(default)]
    pub prefix_map: BTreeMap<String, String>,
    #[serde(default)]
    pub new_classes: Vec<ClassDef>,
    #[serde(default)]
    pub new_slots: Vec<SlotDef>,
    #[serde(default)]
    pub new_datatypes: Vec<DatatypeDef>,
    /// (class name, slot name): attach an existing or new slot to an
    /// existing or new class.
    #[serde(default)]
    pub slot_attachments: Vec<(String, String)>,
    #[serde(default)]
    pub cardinality_overrides: Vec<CardinalityOverride>,
}

fn default_version() -> String {
    "1.0.0".to_string()
}

#[derive(Debug, Error)]
pub enum ExtendError {
    #[error("malformed layer JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("layer {layer} declares base {declared}, but the target profile is {actual}")]
    LayerMismatch {
        layer: String,
        declared: String,
        actual: String,
    },
    #[error("base profile has no class mapped to prov:Activity; cannot anchor the provenance layer")]
    MissingEntryPoint,
    #[error("profile does not contain the provenance layer (DataGeneratingActivity lineage missing)")]
    MissingBaseLayer,
    #[error("profile already contains layer element {0}")]
    AlreadyExtended(String),
    #[error("attachment references unknown class {class}")]
    UnknownAttachmentClass { class: String },
    #[error("attachment references unknown slot {slot}")]
    UnknownAttachmentSlot { slot: String },
    #[error("cardinality override references unknown slot {slot}")]
    UnknownOverrideSlot { slot: String },
    #[error(transparent)]
    Ir(#[from] IrError),
}

impl ExtensionLayer {
    pub fn from_json(bytes: &[u8]) -> Result<ExtensionLayer, ExtendError> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("layer serialization cannot fail");
        let mut out = serde_json::to_string_pretty(&value).expect("JSON rendering cannot fail");
        out.push('\n');
        out
    }

    /// Clone with `layer_of` rebound to another base id. Built-in layers are
    /// rebindable; hand-written layers must match exactly.
    fn rebound_to(&self, base_id: &str) -> ExtensionLayer {
        let mut layer = self.clone();
        layer.layer_of = base_id.to_string();
        layer
    }

    /// Build a standalone extension IR against `base`: new definitions plus
    /// verbatim copies of every base definition they reference, and stubs
    /// (own slots reduced to the attachments) for extended base classes.
    pub fn materialize(&self, base: &SchemaIR) -> Result<SchemaIR, ExtendError> {
        if self.layer_of != base.id {
            return Err(ExtendError::LayerMismatch {
                layer: self.id.clone(),
                declared: self.layer_of.clone(),
                actual: base.id.clone(),
            });
        }

        let mut ext = SchemaIR::new(self.id.clone(), self.version.clone());
        ext.layer_of = Some(base.id.clone());
        ext.prefix_map = self.prefix_map.clone();

        for class in &self.new_classes {
            ext.classes.insert(class.name.clone(), class.clone());
        }
        for slot in &self.new_slots {
            ext.slots.insert(slot.name.clone(), slot.clone());
        }
        for dt in &self.new_datatypes {
            ext.datatypes.insert(dt.name.clone(), dt.clone());
        }

        // Attachments: extend new classes in place, stub base classes.
        for (class_name, slot_name) in &self.slot_attachments {
            if !ext.slots.contains_key(slot_name) && !base.slots.contains_key(slot_name) {
                return Err(ExtendError::UnknownAttachmentSlot {
                    slot: slot_name.clone(),
                });
            }
            if let Some(class) = ext.classes.get_mut(class_name) {
                if !class.own_slots.contains(slot_name) {
                    class.own_slots.push(slot_name.clone());
                }
                continue;
            }
            let Some(base_class) = base.classes.get(class_name) else {
                return Err(ExtendError::UnknownAttachmentClass {
                    class: class_name.clone(),
                });
            };
            let mut stub = base_class.clone();
            stub.own_slots = vec![slot_name.clone()];
            ext.classes.insert(class_name.clone(), stub);
        }

        // Cardinality overrides become narrowed copies of the slot.
        for ov in &self.cardinality_overrides {
            if let Some(slot) = ext.slots.get_mut(&ov.slot) {
                slot.min_cardinality = ov.min;
                slot.max_cardinality = ov.max;
                continue;
            }
            let Some(base_slot) = base.slots.get(&ov.slot) else {
                return Err(ExtendError::UnknownOverrideSlot {
                    slot: ov.slot.clone(),
                });
            };
            let mut copy = base_slot.clone();
            copy.min_cardinality = ov.min;
            copy.max_cardinality = ov.max;
            ext.slots.insert(ov.slot.clone(), copy);
        }

        close_over_base(&mut ext, base)?;
        ext.validate()?;
        Ok(ext)
    }
}

/// Copy every base definition referenced by the extension into it, so the
/// extension IR satisfies the invariants on its own. Copied classes come as
/// stubs (no own slots) and merge back without effect.
fn close_over_base(ext: &mut SchemaIR, base: &SchemaIR) -> Result<(), ExtendError> {
    loop {
        let mut needed_classes: Vec<String> = Vec::new();
        let mut needed_slots: Vec<String> = Vec::new();

        let need_class = |name: &str, ext: &SchemaIR, out: &mut Vec<String>| {
            if !ext.classes.contains_key(name) && !out.contains(&name.to_string()) {
                out.push(name.to_string());
            }
        };

        for class in ext.classes.values() {
            for parent in class.parents.iter().chain(class.mixins.iter()) {
                need_class(parent, ext, &mut needed_classes);
            }
            for slot in &class.own_slots {
                if !ext.slots.contains_key(slot) && !needed_slots.contains(slot) {
                    needed_slots.push(slot.clone());
                }
            }
        }
        for slot in ext.slots.values() {
            match &slot.range {
                RangeSpec::Class { name } => need_class(name, ext, &mut needed_classes),
                RangeSpec::Union { members } => {
                    for m in members {
                        need_class(m, ext, &mut needed_classes);
                    }
                }
                RangeSpec::Datatype { name } => {
                    if !ext.datatypes.contains_key(name) {
                        if let Some(dt) = base.datatypes.get(name) {
                            ext.datatypes.insert(name.clone(), dt.clone());
                        }
                    }
                }
            }
            if let Some(sup) = &slot.super_slot {
                if !ext.slots.contains_key(sup) && !needed_slots.contains(sup) {
                    needed_slots.push(sup.clone());
                }
            }
        }

        if needed_classes.is_empty() && needed_slots.is_empty() {
            return Ok(());
        }
        for name in needed_classes {
            let Some(base_class) = base.classes.get(&name) else {
                return Err(ExtendError::UnknownAttachmentClass { class: name });
            };
            let mut stub = base_class.clone();
            stub.own_slots = Vec::new();
            ext.classes.insert(name, stub);
        }
        for name in needed_slots {
            let Some(base_slot) = base.slots.get(&name) else {
                return Err(ExtendError::UnknownAttachmentSlot { slot: name });
            };
            ext.slots.insert(name, base_slot.clone());
        }
    }
}

/// Apply a hand-written layer: `layer_of` must match the base id exactly.
pub fn apply_layer(base: &SchemaIR, layer: &ExtensionLayer) -> Result<SchemaIR, ExtendError> {
    let ext = layer.materialize(base)?;
    Ok(merge_layers(base, &ext)?)
}

/// Inject the built-in DCAT-AP+ provenance layer. The base must expose a
/// class mapped to prov:Activity (the `wasGeneratedBy` range) as the entry
/// point.
pub fn inject_provenance_layer(base: &SchemaIR) -> Result<SchemaIR, ExtendError> {
    if base.class_by_uri(PROV_ACTIVITY).is_none() {
        return Err(ExtendError::MissingEntryPoint);
    }
    let layer = dcat_ap_plus();
    for class in &layer.new_classes {
        if base.classes.contains_key(&class.name) {
            return Err(ExtendError::AlreadyExtended(class.name.clone()));
        }
    }
    apply_layer(base, &layer.rebound_to(&base.id))
}

/// Apply the built-in ChemDCAT-AP layer on top of a profile that already
/// contains the provenance layer.
pub fn apply_chem_layer(plus: &SchemaIR) -> Result<SchemaIR, ExtendError> {
    let has_plus_lineage = plus
        .classes
        .get("DataGeneratingActivity")
        .map(|dga| {
            dga.class_uri.ends_with("DataGeneratingActivity")
                && plus
                    .subsumes("Activity", "DataGeneratingActivity")
                    .unwrap_or(false)
        })
        .unwrap_or(false)
        && plus.slots.contains_key("has_output_entity")
        && plus.slots.contains_key("carried_out_by");
    if !has_plus_lineage {
        return Err(ExtendError::MissingBaseLayer);
    }
    let layer = chem_dcat_ap();
    for class in &layer.new_classes {
        if plus.classes.contains_key(&class.name) {
            return Err(ExtendError::AlreadyExtended(class.name.clone()));
        }
    }
    apply_layer(plus, &layer.rebound_to(&plus.id))
}

/// Check an extension against the DCAT-AP extension guidelines: no duplicate
/// semantics on a class, no broadened cardinality, mandatory constraints
/// kept. An empty report means the extension is admissible.
pub fn lint_extension(
    base: &SchemaIR,
    ext: &ExtensionLayer,
) -> Result<ValidationReport, ExtendError> {
    if ext.layer_of != base.id {
        return Err(ExtendError::LayerMismatch {
            layer: ext.id.clone(),
            declared: ext.layer_of.clone(),
            actual: base.id.clone(),
        });
    }
    let mut report = ValidationReport::empty();

    let slot_uri_of = |name: &str| -> Option<String> {
        ext.new_slots
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.slot_uri.clone())
            .or_else(|| base.slots.get(name).map(|s| s.slot_uri.clone()))
    };

    // (a) DUPLICATE_SEMANTICS: an attachment whose slot_uri collides with a
    // different slot already effective on that (existing) class.
    for (class_name, slot_name) in &ext.slot_attachments {
        let Ok(effective) = base.effective_slots(class_name) else {
            continue; // attachment to a new class; nothing to duplicate
        };
        let Some(uri) = slot_uri_of(slot_name) else {
            continue;
        };
        for (existing_name, existing) in effective {
            if existing.slot_uri == uri && existing_name != *slot_name {
                report.push(Finding::error(
                    rules::DUPLICATE_SEMANTICS,
                    format!("{class_name}/{slot_name}"),
                    format!(
                        "slot {slot_name} duplicates {existing_name} ({uri}) already on {class_name}"
                    ),
                ));
            }
        }
    }

    // (b)/(c) cardinality rules against base slots.
    for ov in &ext.cardinality_overrides {
        let Some(base_slot) = base.slots.get(&ov.slot) else {
            continue; // overriding a slot introduced by this same layer
        };
        let context = format!("{}/{}", ov.class, ov.slot);
        if base_slot.min_cardinality >= 1 && ov.min == 0 {
            report.push(Finding::error(
                rules::MANDATORY_DROPPED,
                &context,
                format!(
                    "override drops mandatory minimum {} to 0",
                    base_slot.min_cardinality
                ),
            ));
        } else if ov.min < base_slot.min_cardinality {
            report.push(Finding::error(
                rules::BROADENED_CARDINALITY,
                &context,
                format!(
                    "override lowers minimum {} to {}",
                    base_slot.min_cardinality, ov.min
                ),
            ));
        }
        if ov.max > base_slot.max_cardinality {
            report.push(Finding::error(
                rules::BROADENED_CARDINALITY,
                &context,
                format!(
                    "override raises maximum {} to {}",
                    base_slot.max_cardinality, ov.max
                ),
            ));
        }
    }

    Ok(report)
}

static DCAT_AP_PLUS: LazyLock<ExtensionLayer> = LazyLock::new(|| {
    ExtensionLayer::from_json(include_bytes!("../resources/layers/dcat_ap_plus.layer.json"))
        .expect("bundled dcat-ap-plus layer is valid")
});

static CHEM_DCAT_AP: LazyLock<ExtensionLayer> = LazyLock::new(|| {
    ExtensionLayer::from_json(include_bytes!("../resources/layers/chem_dcat_ap.layer.json"))
        .expect("bundled chem-dcat-ap layer is valid")
});

/// Built-in provenance core layer (Activity/Entity/AgentEntity pattern,
/// attribute classes, classifier mixin).
pub fn dcat_ap_plus() -> &'static ExtensionLayer {
    &DCAT_AP_PLUS
}

/// Built-in chemistry layer (substance samples, chemical entities,
/// reactions, structure notations).
pub fn chem_dcat_ap() -> &'static ExtensionLayer {
    &CHEM_DCAT_AP
}

/// Resolve a `--layer` argument: a built-in name or a `.layer.json` path.
pub fn resolve_layer(spec: &str) -> Result<ExtensionLayer, ExtendError> {
    match spec {
        "plus" => Ok(dcat_ap_plus().clone()),
        "chem" => Ok(chem_dcat_ap().clone()),
        path => {
            let bytes = std::fs::read(path).map_err(|e| {
                ExtendError::Json(serde_json::Error::io(std::io::Error::new(
                    e.kind(),
                    format!("{path}: {e}"),
                )))
            })?;
            ExtensionLayer::from_json(&bytes)
        }
    }
}

/// Apply a layer the way the CLI does: built-ins rebind to the current base
/// and run their entry-point checks; file layers must match `layer_of`.
pub fn extend_with(base: &SchemaIR, spec: &str) -> Result<SchemaIR, ExtendError> {
    match spec {
        "plus" => inject_provenance_layer(base),
        "chem" => apply_chem_layer(base),
        path => {
            let layer = resolve_layer(path)?;
            apply_layer(base, &layer)
        }
    }
}

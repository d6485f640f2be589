//! Generate a draft 2020-12 JSON Schema for instance documents of a
//! profile class. Class-ranged slots accept any concrete subclass via
//! `anyOf`; `@type` discriminates; multivalued slots accept a single value
//! or an array, matching the validator's normalization.

use super::ArtifactError;
use crate::ir::{concrete_descendants, MaxCard, RangeSpec, SchemaIR};
use crate::validate::lexical::pattern_for_rule;
use serde_json::{json, Map, Value};
use std::collections::BTreeSet;

pub fn gen_jsonschema(ir: &SchemaIR, root_class: &str) -> Result<Value, ArtifactError> {
    if !ir.classes.contains_key(root_class) {
        return Err(ArtifactError::UnknownRootClass(root_class.to_string()));
    }

    // Reachable classes: BFS over slot ranges, expanding each class range to
    // its concrete descendants.
    let mut reachable: BTreeSet<String> = BTreeSet::new();
    let mut queue: Vec<String> = vec![root_class.to_string()];
    while let Some(class) = queue.pop() {
        if !reachable.insert(class.clone()) {
            continue;
        }
        for (_, slot) in ir.effective_slots(&class)? {
            let members: Vec<&String> = match &slot.range {
                RangeSpec::Class { name } => vec![name],
                RangeSpec::Union { members } => members.iter().collect(),
                RangeSpec::Datatype { .. } => vec![],
            };
            for member in members {
                for descendant in concrete_descendants(ir, member)? {
                    if !reachable.contains(&descendant) {
                        queue.push(descendant);
                    }
                }
            }
        }
    }

    let mut defs = Map::new();
    for class in &reachable {
        defs.insert(class.clone(), class_def(ir, class)?);
    }

    let mut root = Map::new();
    root.insert(
        "$schema".to_string(),
        json!("https://json-schema.org/draft/2020-12/schema"),
    );
    root.insert("title".to_string(), json!(format!("{} / {root_class}", ir.id)));
    root.insert("$ref".to_string(), json!(format!("#/$defs/{root_class}")));
    root.insert("$defs".to_string(), Value::Object(defs));
    Ok(Value::Object(root))
}

fn class_def(ir: &SchemaIR, class: &str) -> Result<Value, ArtifactError> {
    let mut properties = Map::new();
    properties.insert("@type".to_string(), json!({"enum": [class]}));
    properties.insert("@id".to_string(), json!({"type": "string", "format": "uri"}));

    let mut required: Vec<String> = Vec::new();
    for (slot_name, slot) in ir.effective_slots(class)? {
        let item = item_schema(ir, &slot.range)?;
        properties.insert(slot_name.clone(), value_schema(item, slot.min_cardinality, slot.max_cardinality));
        if slot.min_cardinality >= 1 {
            required.push(slot_name);
        }
    }
    required.sort();

    let mut def = Map::new();
    def.insert("type".to_string(), json!("object"));
    def.insert("additionalProperties".to_string(), json!(false));
    def.insert("properties".to_string(), Value::Object(properties));
    if !required.is_empty() {
        def.insert("required".to_string(), json!(required));
    }
    Ok(Value::Object(def))
}

fn item_schema(ir: &SchemaIR, range: &RangeSpec) -> Result<Value, ArtifactError> {
    match range {
        RangeSpec::Datatype { name } => {
            let (base_uri, rule) = ir
                .resolve_datatype(name)
                .expect("validated IR resolves all datatypes");
            Ok(datatype_schema(&base_uri, &rule))
        }
        RangeSpec::Class { name } => class_refs(ir, std::slice::from_ref(name)),
        RangeSpec::Union { members } => class_refs(ir, members),
    }
}

fn class_refs(ir: &SchemaIR, members: &[String]) -> Result<Value, ArtifactError> {
    let mut targets: BTreeSet<String> = BTreeSet::new();
    for member in members {
        for descendant in concrete_descendants(ir, member)? {
            targets.insert(descendant);
        }
    }
    let refs: Vec<Value> = targets
        .iter()
        .map(|t| json!({"$ref": format!("#/$defs/{t}")}))
        .collect();
    Ok(match refs.len() {
        1 => refs.into_iter().next().unwrap(),
        _ => json!({"anyOf": refs}),
    })
}

fn datatype_schema(base_uri: &str, rule: &str) -> Value {
    if let Some(pattern) = pattern_for_rule(rule) {
        return json!({"type": "string", "pattern": pattern});
    }
    match rule {
        "DATE" => json!({"type": "string", "format": "date"}),
        "DATETIME" => json!({"type": "string", "format": "date-time"}),
        "ANYURI" => json!({"type": "string", "format": "uri"}),
        "DURATION" => json!({"type": "string", "format": "duration"}),
        "DECIMAL" => json!({"type": "number"}),
        "INTEGER" => json!({"type": "integer"}),
        "BOOLEAN" => json!({"type": "boolean"}),
        _ => {
            let _ = base_uri;
            json!({"type": "string"})
        }
    }
}

/// A slot value may be a single item (when one value is within bounds) or an
/// array constrained by the cardinalities.
fn value_schema(item: Value, min: u32, max: MaxCard) -> Value {
    let mut array = Map::new();
    array.insert("type".to_string(), json!("array"));
    array.insert("items".to_string(), item.clone());
    if min > 0 {
        array.insert("minItems".to_string(), json!(min));
    }
    if let MaxCard::Bounded(n) = max {
        array.insert("maxItems".to_string(), json!(n));
    }
    let array = Value::Object(array);
    if min <= 1 {
        json!({"anyOf": [item, array]})
    } else {
        array
    }
}

/// Render with sorted keys, trailing newline.
pub fn to_pretty_json(value: &Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("JSON rendering cannot fail");
    out.push('\n');
    out
}

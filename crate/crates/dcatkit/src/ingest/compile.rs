//! Compile a parsed [`ShapeGraph`] into a [`SchemaIR`].

use super::{IngestError, OrBranch, PropertyShape, ShapeGraph};
use crate::ir::{
    builtin_by_uri, canonical_rule_for, ClassDef, DatatypeDef, MaxCard, RangeSpec, SchemaIR,
    SlotDef,
};
use crate::iri::{local_name, snake_case, NameAllocator, XSD_NS};
use crate::report::{rules, Finding, ValidationReport};
use crate::validate::lexical::rule_for_pattern;
use std::collections::HashMap;

/// Compilation result: the IR plus structured diagnostics (warnings for
/// skipped shapes and fallbacks; hard failures are returned as errors).
#[derive(Debug, Clone)]
pub struct CompiledProfile {
    pub ir: SchemaIR,
    pub report: ValidationReport,
}

/// XSD datatypes that collapse to `date` when they appear together in a
/// union.
const DATE_LIKE: &[&str] = &[
    "http://www.w3.org/2001/XMLSchema#date",
    "http://www.w3.org/2001/XMLSchema#dateTime",
    "http://www.w3.org/2001/XMLSchema#gYear",
    "http://www.w3.org/2001/XMLSchema#gYearMonth",
];

const XSD_DATE: &str = "http://www.w3.org/2001/XMLSchema#date";
const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";

pub fn compile(shapes: &ShapeGraph, profile_id: &str) -> Result<CompiledProfile, IngestError> {
    let mut report = ValidationReport::empty();
    for warning in &shapes.parse_warnings {
        report.push(Finding::warning(rules::UNSUPPORTED_KEYWORD, "", warning));
    }

    let mut ir = SchemaIR::new(profile_id, "1.0.0");
    ir.prefix_map = shapes.prefix_map.clone();

    let mut names = NameAllocator::new();
    // Shapes compiled into classes, paired for the slot pass.
    let mut class_shapes: Vec<(String, &super::NodeShape)> = Vec::new();

    // Pass 1: classes and datatypes.
    for shape in &shapes.node_shapes {
        let Some(target) = &shape.target_class else {
            report.push(Finding::warning(
                rules::NO_TARGET,
                &shape.id,
                "node shape has neither class nor datatype target; skipped",
            ));
            continue;
        };
        if target.starts_with(XSD_NS) {
            match builtin_by_uri(target) {
                Some((_, base_uri, rule)) => {
                    let exists = ir
                        .datatypes
                        .values()
                        .any(|d| d.base_uri == base_uri && d.lexical_check == rule);
                    if !exists {
                        let name = names.allocate(&local_name(target));
                        ir.datatypes.insert(
                            name.clone(),
                            DatatypeDef {
                                name,
                                base_uri: base_uri.to_string(),
                                lexical_check: rule.to_string(),
                            },
                        );
                    }
                }
                None => report.push(Finding::warning(
                    rules::UNSUPPORTED_DATATYPE,
                    &shape.id,
                    format!("unsupported XSD datatype {target}; shape skipped"),
                )),
            }
            continue;
        }
        let name = names.allocate(&local_name(target));
        ir.classes.insert(
            name.clone(),
            ClassDef {
                name: name.clone(),
                class_uri: target.clone(),
                description: shape.description.clone(),
                parents: Vec::new(),
                mixins: Vec::new(),
                own_slots: Vec::new(),
                is_mixin: false,
                is_abstract: false,
            },
        );
        class_shapes.push((name, shape));
    }

    // Pass 2: slots. Identical property shapes (same path, name, range and
    // cardinalities) reuse one slot definition; conflicting reuses of a name
    // get deterministic `_2`, `_3`, ... suffixes.
    let mut slots_by_base: HashMap<String, Vec<String>> = HashMap::new();
    for (class_name, shape) in &class_shapes {
        for ps in &shape.property_shapes {
            let Some(path) = &ps.path else {
                report.push(Finding::warning(
                    rules::NO_CONSTRAINT,
                    &ps.id,
                    "property shape without sh:path; skipped",
                ));
                continue;
            };
            let range = match resolve_range(&mut ir, &mut names, &mut report, ps, path) {
                Ok(range) => range,
                Err(e) => return Err(e),
            };
            let min = ps.min_count.unwrap_or(0);
            let max = match ps.max_count {
                Some(n) => MaxCard::Bounded(n),
                None => MaxCard::Unbounded,
            };
            let base_name = match &ps.name {
                Some(given) => sanitize_name(given),
                None => snake_case(&local_name(path)),
            };

            let existing = slots_by_base
                .get(&base_name)
                .and_then(|candidates| {
                    candidates.iter().find(|candidate| {
                        let slot = &ir.slots[*candidate];
                        slot.slot_uri == *path
                            && slot.range == range
                            && slot.min_cardinality == min
                            && slot.max_cardinality == max
                    })
                })
                .cloned();

            let slot_name = match existing {
                Some(name) => name,
                None => {
                    let allocated = names.allocate(&base_name);
                    ir.slots.insert(
                        allocated.clone(),
                        SlotDef {
                            name: allocated.clone(),
                            slot_uri: path.clone(),
                            range: range.clone(),
                            min_cardinality: min,
                            max_cardinality: max,
                            super_slot: None,
                            description: ps.description.clone(),
                        },
                    );
                    slots_by_base
                        .entry(base_name)
                        .or_default()
                        .push(allocated.clone());
                    allocated
                }
            };

            let class = ir.classes.get_mut(class_name).expect("class exists");
            if !class.own_slots.contains(&slot_name) {
                class.own_slots.push(slot_name);
            }
        }
    }

    ir.validate()?;
    Ok(CompiledProfile { ir, report })
}

fn sanitize_name(raw: &str) -> String {
    let cleaned: String = raw
        .trim()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    let mut collapsed = String::with_capacity(cleaned.len());
    for c in cleaned.chars() {
        if c == '_' && collapsed.ends_with('_') {
            continue;
        }
        collapsed.push(c);
    }
    let out = snake_case(collapsed.trim_matches('_'));
    if out.is_empty() {
        "unnamed".to_string()
    } else {
        out
    }
}

enum ConstraintKind {
    Classes(Vec<String>),
    Datatypes(Vec<String>),
    Or(Vec<OrBranch>),
    NodeKindIri,
    None,
}

fn resolve_range(
    ir: &mut SchemaIR,
    names: &mut NameAllocator,
    report: &mut ValidationReport,
    ps: &PropertyShape,
    path: &str,
) -> Result<RangeSpec, IngestError> {
    let mut kinds: Vec<ConstraintKind> = Vec::new();
    if !ps.class_constraints.is_empty() {
        kinds.push(ConstraintKind::Classes(ps.class_constraints.clone()));
    }
    if !ps.datatype_constraints.is_empty() {
        kinds.push(ConstraintKind::Datatypes(ps.datatype_constraints.clone()));
    }
    if !ps.or_branches.is_empty() {
        kinds.push(ConstraintKind::Or(ps.or_branches.clone()));
    }
    if kinds.is_empty() && ps.node_kind_iri {
        kinds.push(ConstraintKind::NodeKindIri);
    }
    if kinds.len() > 1 {
        report.push(Finding::warning(
            rules::MULTIPLE_CONSTRAINTS,
            &ps.id,
            "property shape mixes constraint kinds; using the first",
        ));
    }

    match kinds.into_iter().next().unwrap_or(ConstraintKind::None) {
        ConstraintKind::Classes(classes) => {
            if classes.len() > 1 {
                report.push(Finding::warning(
                    rules::UNSUPPORTED_CONSTRAINT,
                    &ps.id,
                    "multiple sh:class constraints; using the first",
                ));
            }
            let class_name = class_name_for(ir, &ps.id, &classes[0])?;
            Ok(RangeSpec::class(class_name))
        }
        ConstraintKind::Datatypes(datatypes) => {
            if datatypes.len() == 1 {
                datatype_range(ir, names, report, ps, &datatypes[0])
            } else {
                datatype_union_range(ir, names, report, ps, &datatypes)
            }
        }
        ConstraintKind::Or(branches) => {
            let all_classes: Vec<String> = branches.iter().flat_map(|b| b.classes.clone()).collect();
            let all_datatypes: Vec<String> =
                branches.iter().flat_map(|b| b.datatypes.clone()).collect();
            match (all_classes.is_empty(), all_datatypes.is_empty()) {
                (false, true) => {
                    let mut members = Vec::new();
                    for iri in &all_classes {
                        let name = class_name_for(ir, &ps.id, iri)?;
                        if !members.contains(&name) {
                            members.push(name);
                        }
                    }
                    if members.len() == 1 {
                        Ok(RangeSpec::class(members.remove(0)))
                    } else {
                        Ok(RangeSpec::union(members))
                    }
                }
                (true, false) => {
                    if all_datatypes.len() == 1 {
                        datatype_range(ir, names, report, ps, &all_datatypes[0])
                    } else {
                        datatype_union_range(ir, names, report, ps, &all_datatypes)
                    }
                }
                (true, true) => {
                    report.push(Finding::warning(
                        rules::NO_CONSTRAINT,
                        &ps.id,
                        "sh:or without usable branches; falling back to string",
                    ));
                    Ok(string_fallback(ir, names))
                }
                (false, false) => {
                    report.push(Finding::warning(
                        rules::MIXED_OR_FALLBACK,
                        &ps.id,
                        "sh:or mixes classes and datatypes; falling back to string",
                    ));
                    Ok(string_fallback(ir, names))
                }
            }
        }
        ConstraintKind::NodeKindIri => Ok(named_or_builtin(
            ir,
            "http://www.w3.org/2001/XMLSchema#anyURI",
        )),
        ConstraintKind::None => {
            report.push(Finding::warning(
                rules::NO_CONSTRAINT,
                &ps.id,
                format!("property shape for {path} has no range constraint; defaulting to string"),
            ));
            Ok(string_fallback(ir, names))
        }
    }
}

fn class_name_for(ir: &SchemaIR, shape_id: &str, iri: &str) -> Result<String, IngestError> {
    ir.class_by_uri(iri)
        .map(|c| c.name.clone())
        .ok_or_else(|| IngestError::UnresolvedRange {
            shape: shape_id.to_string(),
            iri: iri.to_string(),
        })
}

/// Resolve a single `sh:datatype` IRI, taking an accompanying `sh:pattern`
/// into account: a known pattern recovers a named datatype with the matching
/// lexical rule, creating it on demand.
fn datatype_range(
    ir: &mut SchemaIR,
    names: &mut NameAllocator,
    report: &mut ValidationReport,
    ps: &PropertyShape,
    iri: &str,
) -> Result<RangeSpec, IngestError> {
    let Some((_, base_uri, canonical_rule)) = builtin_by_uri(iri) else {
        if iri.starts_with(XSD_NS) {
            report.push(Finding::warning(
                rules::UNSUPPORTED_DATATYPE,
                &ps.id,
                format!("unsupported XSD datatype {iri}; falling back to string"),
            ));
            return Ok(string_fallback(ir, names));
        }
        return Err(IngestError::UnresolvedRange {
            shape: ps.id.to_string(),
            iri: iri.to_string(),
        });
    };

    let rule = match &ps.pattern {
        Some(pattern) => match rule_for_pattern(pattern) {
            Some(rule) => rule,
            None => {
                report.push(Finding::warning(
                    rules::UNKNOWN_PATTERN,
                    &ps.id,
                    format!("sh:pattern {pattern} has no registered lexical rule; ignored"),
                ));
                canonical_rule
            }
        },
        None => canonical_rule,
    };

    if let Some(existing) = ir
        .datatypes
        .values()
        .find(|d| d.base_uri == base_uri && d.lexical_check == rule)
    {
        return Ok(RangeSpec::datatype(existing.name.clone()));
    }
    if rule == canonical_rule {
        return Ok(named_or_builtin(ir, base_uri));
    }
    // Custom-ruled datatype discovered through a pattern: synthesize a named
    // definition, `<slot>_<base>` style.
    let slot_part = match &ps.name {
        Some(n) => sanitize_name(n),
        None => snake_case(&local_name(ps.path.as_deref().unwrap_or("value"))),
    };
    let base_local = local_name(base_uri);
    let name = names.allocate(&format!("{slot_part}_{base_local}"));
    ir.datatypes.insert(
        name.clone(),
        DatatypeDef {
            name: name.clone(),
            base_uri: base_uri.to_string(),
            lexical_check: rule.to_string(),
        },
    );
    Ok(RangeSpec::datatype(name))
}

fn datatype_union_range(
    ir: &mut SchemaIR,
    names: &mut NameAllocator,
    report: &mut ValidationReport,
    ps: &PropertyShape,
    members: &[String],
) -> Result<RangeSpec, IngestError> {
    if members.iter().all(|m| DATE_LIKE.contains(&m.as_str())) {
        return Ok(named_or_builtin(ir, XSD_DATE));
    }
    report.push(Finding::warning(
        rules::DATATYPE_UNION_FALLBACK,
        &ps.id,
        format!(
            "datatype union {{{}}} is not supported; falling back to string",
            members.join(", ")
        ),
    ));
    Ok(string_fallback(ir, names))
}

/// Prefer a compiled `DatatypeDef` carrying the canonical rule for this base
/// IRI; otherwise use the built-in name.
fn named_or_builtin(ir: &SchemaIR, base_uri: &str) -> RangeSpec {
    let canonical = canonical_rule_for(base_uri).expect("supported base");
    if let Some(existing) = ir
        .datatypes
        .values()
        .find(|d| d.base_uri == base_uri && d.lexical_check == canonical)
    {
        return RangeSpec::datatype(existing.name.clone());
    }
    let (name, _, _) = builtin_by_uri(base_uri).expect("supported base");
    RangeSpec::datatype(name)
}

fn string_fallback(ir: &SchemaIR, _names: &mut NameAllocator) -> RangeSpec {
    named_or_builtin(ir, XSD_STRING)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_jsonld;

    fn compile_doc(doc: &str) -> CompiledProfile {
        let shapes = parse_jsonld(doc.as_bytes()).unwrap();
        compile(&shapes, "test").unwrap()
    }

    #[test]
    fn class_and_datatype_targets_compile() {
        let out = compile_doc(
            r#"{
            "@context": {"sh": "http://www.w3.org/ns/shacl#", "dcat": "http://www.w3.org/ns/dcat#", "xsd": "http://www.w3.org/2001/XMLSchema#"},
            "@graph": [
                {"@type": "sh:NodeShape", "sh:targetClass": {"@id": "dcat:Dataset"}},
                {"@type": "sh:NodeShape", "sh:targetClass": {"@id": "xsd:duration"}}
            ]
        }"#,
        );
        assert!(out.ir.classes.contains_key("Dataset"));
        assert_eq!(
            out.ir.classes["Dataset"].class_uri,
            "http://www.w3.org/ns/dcat#Dataset"
        );
        assert!(out.ir.datatypes.contains_key("duration"));
        assert_eq!(out.ir.datatypes["duration"].lexical_check, "DURATION");
    }

    #[test]
    fn shape_without_target_is_skipped_with_warning() {
        let out = compile_doc(
            r#"{
            "@context": {"sh": "http://www.w3.org/ns/shacl#", "dct": "http://purl.org/dc/terms/", "xsd": "http://www.w3.org/2001/XMLSchema#"},
            "@graph": [
                {"@type": "sh:NodeShape", "sh:property": [{"sh:path": {"@id": "dct:title"}, "sh:datatype": {"@id": "xsd:string"}}]}
            ]
        }"#,
        );
        assert!(out.ir.classes.is_empty());
        assert_eq!(out.report.warning_count(), 1);
        assert_eq!(out.report.findings[0].rule, rules::NO_TARGET);
    }

    #[test]
    fn date_like_union_collapses_to_date() {
        let out = compile_doc(
            r#"{
            "@context": {"sh": "http://www.w3.org/ns/shacl#", "dcat": "http://www.w3.org/ns/dcat#", "dct": "http://purl.org/dc/terms/", "xsd": "http://www.w3.org/2001/XMLSchema#"},
            "@graph": [{
                "@type": "sh:NodeShape",
                "sh:targetClass": {"@id": "dcat:Dataset"},
                "sh:property": [{
                    "sh:path": {"@id": "dct:issued"},
                    "sh:or": [
                        {"sh:datatype": {"@id": "xsd:date"}},
                        {"sh:datatype": {"@id": "xsd:dateTime"}}
                    ]
                }]
            }]
        }"#,
        );
        assert_eq!(
            out.ir.slots["issued"].range,
            RangeSpec::datatype("date".to_string())
        );
        assert_eq!(out.report.warning_count(), 0);
    }

    #[test]
    fn non_date_datatype_union_falls_back_to_string() {
        let out = compile_doc(
            r#"{
            "@context": {"sh": "http://www.w3.org/ns/shacl#", "dcat": "http://www.w3.org/ns/dcat#", "dct": "http://purl.org/dc/terms/", "xsd": "http://www.w3.org/2001/XMLSchema#"},
            "@graph": [{
                "@type": "sh:NodeShape",
                "sh:targetClass": {"@id": "dcat:Dataset"},
                "sh:property": [{
                    "sh:path": {"@id": "dct:identifier"},
                    "sh:or": [
                        {"sh:datatype": {"@id": "xsd:string"}},
                        {"sh:datatype": {"@id": "xsd:integer"}}
                    ]
                }]
            }]
        }"#,
        );
        assert_eq!(
            out.ir.slots["identifier"].range,
            RangeSpec::datatype("string".to_string())
        );
        assert_eq!(out.report.findings[0].rule, rules::DATATYPE_UNION_FALLBACK);
    }

    #[test]
    fn cross_namespace_local_name_collision_gets_suffix() {
        let out = compile_doc(
            r#"{
            "@context": {"sh": "http://www.w3.org/ns/shacl#", "foaf": "http://xmlns.com/foaf/0.1/", "ex": "http://example.org/vocab/"},
            "@graph": [
                {"@type": "sh:NodeShape", "sh:targetClass": {"@id": "foaf:Agent"}},
                {"@type": "sh:NodeShape", "sh:targetClass": {"@id": "ex:Agent"}}
            ]
        }"#,
        );
        assert!(out.ir.classes.contains_key("Agent"));
        assert!(out.ir.classes.contains_key("Agent_2"));
        assert_eq!(
            out.ir.classes["Agent"].class_uri,
            "http://xmlns.com/foaf/0.1/Agent"
        );
        assert_eq!(out.ir.classes["Agent_2"].class_uri, "http://example.org/vocab/Agent");
    }

    #[test]
    fn identical_property_shapes_share_a_slot() {
        let out = compile_doc(
            r#"{
            "@context": {"sh": "http://www.w3.org/ns/shacl#", "dcat": "http://www.w3.org/ns/dcat#", "dct": "http://purl.org/dc/terms/", "xsd": "http://www.w3.org/2001/XMLSchema#"},
            "@graph": [
                {"@type": "sh:NodeShape", "sh:targetClass": {"@id": "dcat:Catalog"},
                 "sh:property": [{"sh:path": {"@id": "dct:title"}, "sh:datatype": {"@id": "xsd:string"}}]},
                {"@type": "sh:NodeShape", "sh:targetClass": {"@id": "dcat:Dataset"},
                 "sh:property": [{"sh:path": {"@id": "dct:title"}, "sh:datatype": {"@id": "xsd:string"}}]}
            ]
        }"#,
        );
        assert_eq!(out.ir.slots.len(), 1);
        assert_eq!(out.ir.classes["Catalog"].own_slots, vec!["title"]);
        assert_eq!(out.ir.classes["Dataset"].own_slots, vec!["title"]);
    }

    #[test]
    fn conflicting_reuse_of_a_name_gets_suffix() {
        let out = compile_doc(
            r#"{
            "@context": {"sh": "http://www.w3.org/ns/shacl#", "dcat": "http://www.w3.org/ns/dcat#", "dct": "http://purl.org/dc/terms/", "xsd": "http://www.w3.org/2001/XMLSchema#"},
            "@graph": [
                {"@type": "sh:NodeShape", "sh:targetClass": {"@id": "dcat:Catalog"},
                 "sh:property": [{"sh:path": {"@id": "dct:title"}, "sh:datatype": {"@id": "xsd:string"}, "sh:minCount": 1}]},
                {"@type": "sh:NodeShape", "sh:targetClass": {"@id": "dcat:Dataset"},
                 "sh:property": [{"sh:path": {"@id": "dct:title"}, "sh:datatype": {"@id": "xsd:string"}}]}
            ]
        }"#,
        );
        assert_eq!(out.ir.slots.len(), 2);
        assert_eq!(out.ir.classes["Catalog"].own_slots, vec!["title"]);
        assert_eq!(out.ir.classes["Dataset"].own_slots, vec!["title_2"]);
        assert_eq!(out.ir.slots["title"].min_cardinality, 1);
        assert_eq!(out.ir.slots["title_2"].min_cardinality, 0);
    }

    #[test]
    fn node_kind_iri_maps_to_any_uri() {
        let out = compile_doc(
            r#"{
            "@context": {"sh": "http://www.w3.org/ns/shacl#", "dcat": "http://www.w3.org/ns/dcat#"},
            "@graph": [{
                "@type": "sh:NodeShape", "sh:targetClass": {"@id": "dcat:Dataset"},
                "sh:property": [{"sh:path": {"@id": "dcat:theme"}, "sh:nodeKind": {"@id": "sh:IRI"}}]
            }]
        }"#,
        );
        assert_eq!(
            out.ir.slots["theme"].range,
            RangeSpec::datatype("anyURI".to_string())
        );
    }

    #[test]
    fn unresolved_class_range_is_an_error() {
        let shapes = parse_jsonld(
            br#"{
            "@context": {"sh": "http://www.w3.org/ns/shacl#", "dcat": "http://www.w3.org/ns/dcat#", "foaf": "http://xmlns.com/foaf/0.1/"},
            "@graph": [{
                "@type": "sh:NodeShape", "sh:targetClass": {"@id": "dcat:Dataset"},
                "sh:property": [{"sh:path": {"@id": "dcat:contactPoint"}, "sh:class": {"@id": "foaf:Missing"}}]
            }]
        }"#,
        )
        .unwrap();
        assert!(matches!(
            compile(&shapes, "test"),
            Err(IngestError::UnresolvedRange { .. })
        ));
    }

    #[test]
    fn cardinality_defaults_are_zero_and_unbounded() {
        let out = compile_doc(
            r#"{
            "@context": {"sh": "http://www.w3.org/ns/shacl#", "dcat": "http://www.w3.org/ns/dcat#", "dct": "http://purl.org/dc/terms/", "xsd": "http://www.w3.org/2001/XMLSchema#"},
            "@graph": [{
                "@type": "sh:NodeShape", "sh:targetClass": {"@id": "dcat:Dataset"},
                "sh:property": [{"sh:path": {"@id": "dct:title"}, "sh:datatype": {"@id": "xsd:string"}}]
            }]
        }"#,
        );
        let slot = &out.ir.slots["title"];
        assert_eq!(slot.min_cardinality, 0);
        assert_eq!(slot.max_cardinality, MaxCard::Unbounded);
    }
}

//! Instance validation against a compiled profile: slot membership,
//! cardinalities, range classes, datatype lexical rules, and
//! abstract/mixin instantiation.

use crate::instance::{InstanceDocument, Node, NodeMap, SlotValues};
use crate::ir::{RangeSpec, SchemaIR, SlotDef};
use crate::report::{rules, Finding, ValidationReport};
use std::collections::HashMap;
use thiserror::Error;

/// Named lexical rules for scalar values.
pub mod lexical {
    use crate::instance::Scalar;
    use crate::iri::is_absolute_iri;
    use regex::Regex;
    use std::sync::LazyLock;
    use thiserror::Error;

    pub const INCHIKEY_PATTERN: &str = "^[A-Z]{14}-[A-Z]{10}-[A-Z]$";
    pub const SMILES_PATTERN: &str = "^\\S+$";

    static INCHIKEY_RE: LazyLock<Regex> =
        LazyLock::new(|| Regex::new(INCHIKEY_PATTERN).unwrap());
    static DATE_RE: LazyLock<Regex> =
        LazyLock::new(|| Regex::new(r"^\d{4}-\d{2}-\d{2}$").unwrap());
    static DATETIME_RE: LazyLock<Regex> = LazyLock::new(|| {
        Regex::new(r"^(\d{4}-\d{2}-\d{2})T(\d{2}:\d{2}:\d{2})(\.\d+)?(Z|[+-]\d{2}:\d{2})?$")
            .unwrap()
    });
    static DECIMAL_RE: LazyLock<Regex> =
        LazyLock::new(|| Regex::new(r"^[+-]?(\d+(\.\d*)?|\.\d+)$").unwrap());
    static INTEGER_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[+-]?\d+$").unwrap());
    static DURATION_RE: LazyLock<Regex> = LazyLock::new(|| {
        Regex::new(r"^-?P(\d+Y)?(\d+M)?(\d+D)?(T(\d+H)?(\d+M)?(\d+(\.\d+)?S)?)?$").unwrap()
    });

    #[derive(Debug, Error, PartialEq, Eq)]
    #[error("unknown lexical rule: {0}")]
    pub struct UnknownRule(pub String);

    /// Regex published for a rule in generated SHACL / JSON Schema, when the
    /// rule is pattern-expressible.
    pub fn pattern_for_rule(rule: &str) -> Option<&'static str> {
        match rule {
            "INCHIKEY" => Some(INCHIKEY_PATTERN),
            "SMILES_NONEMPTY" => Some(SMILES_PATTERN),
            _ => None,
        }
    }

    /// Reverse mapping used when recompiling generated shapes.
    pub fn rule_for_pattern(pattern: &str) -> Option<&'static str> {
        match pattern {
            INCHIKEY_PATTERN => Some("INCHIKEY"),
            SMILES_PATTERN => Some("SMILES_NONEMPTY"),
            _ => None,
        }
    }

    pub fn check(rule: &str, value: &Scalar) -> Result<bool, UnknownRule> {
        let ok = match rule {
            "STRING" => true,
            "DATE" => match value {
                Scalar::Str(s) => is_valid_date(s),
                _ => false,
            },
            "DATETIME" => match value {
                Scalar::Str(s) => is_valid_datetime(s),
                _ => false,
            },
            "DECIMAL" => match value {
                Scalar::Int(_) => true,
                Scalar::Float(f) => f.is_finite(),
                Scalar::Str(s) => DECIMAL_RE.is_match(s),
                Scalar::Bool(_) => false,
            },
            "INTEGER" => match value {
                Scalar::Int(_) => true,
                Scalar::Str(s) => INTEGER_RE.is_match(s),
                _ => false,
            },
            "BOOLEAN" => match value {
                Scalar::Bool(_) => true,
                Scalar::Str(s) => matches!(s.as_str(), "true" | "false" | "1" | "0"),
                _ => false,
            },
            "ANYURI" => match value {
                Scalar::Str(s) => is_absolute_iri(s),
                _ => false,
            },
            "INCHIKEY" => match value {
                Scalar::Str(s) => INCHIKEY_RE.is_match(s),
                _ => false,
            },
            "SMILES_NONEMPTY" => match value {
                Scalar::Str(s) => !s.is_empty() && !s.chars().any(char::is_whitespace),
                _ => false,
            },
            "DURATION" => match value {
                Scalar::Str(s) => is_valid_duration(s),
                _ => false,
            },
            other => return Err(UnknownRule(other.to_string())),
        };
        Ok(ok)
    }

    fn is_valid_date(s: &str) -> bool {
        if !DATE_RE.is_match(s) {
            return false;
        }
        chrono::NaiveDate::parse_from_str(s, "%Y-%m-%d").is_ok()
    }

    fn is_valid_datetime(s: &str) -> bool {
        let Some(captures) = DATETIME_RE.captures(s) else {
            return false;
        };
        let date = captures.get(1).map(|m| m.as_str()).unwrap_or_default();
        chrono::NaiveDate::parse_from_str(date, "%Y-%m-%d").is_ok()
            && captures
                .get(2)
                .map(|m| {
                    chrono::NaiveTime::parse_from_str(m.as_str(), "%H:%M:%S").is_ok()
                })
                .unwrap_or(false)
    }

    fn is_valid_duration(s: &str) -> bool {
        if !DURATION_RE.is_match(s) {
            return false;
        }
        // "P" (or "-P") alone, or a trailing bare "T", designates nothing.
        let stripped = s.trim_start_matches('-');
        stripped.len() > 1 && !stripped.ends_with('T') && stripped.chars().any(|c| c.is_ascii_digit())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidateError {
    #[error("unknown root class: {0}")]
    UnknownRootClass(String),
}

/// Validate a document against a profile. Aggregates all findings (no
/// fail-fast); finding order follows document order.
pub fn validate(doc: &InstanceDocument, ir: &SchemaIR) -> Result<ValidationReport, ValidateError> {
    if !ir.classes.contains_key(&doc.root_class) {
        return Err(ValidateError::UnknownRootClass(doc.root_class.clone()));
    }
    let mut cx = Context {
        ir,
        findings: Vec::new(),
        effective_cache: HashMap::new(),
    };
    let root_range = RangeSpec::class(doc.root_class.clone());
    cx.check_node(&doc.root, &root_range, "");
    Ok(ValidationReport::from_findings(cx.findings))
}

struct Context<'ir> {
    ir: &'ir SchemaIR,
    findings: Vec<Finding>,
    effective_cache: HashMap<String, Vec<(String, &'ir SlotDef)>>,
}

impl<'ir> Context<'ir> {
    fn effective(&mut self, class: &str) -> &[(String, &'ir SlotDef)] {
        if !self.effective_cache.contains_key(class) {
            let slots = self.ir.effective_slots(class).unwrap_or_default();
            self.effective_cache.insert(class.to_string(), slots);
        }
        &self.effective_cache[class]
    }

    fn node_path(path: &str) -> String {
        if path.is_empty() {
            "/".to_string()
        } else {
            path.to_string()
        }
    }

    /// Resolve the node's class against the declared range and, if it is
    /// instantiable, check the node body. A rejected `@type` still gets its
    /// body checked under the claimed class; mixin/abstract claims and
    /// missing union discriminators stop at the class-level finding.
    fn check_node(&mut self, map: &NodeMap, range: &RangeSpec, path: &str) {
        let class = match &map.type_hint {
            Some(claimed) => {
                let Some(class_def) = self.ir.classes.get(claimed) else {
                    self.findings.push(Finding::error(
                        rules::RANGE_CLASS,
                        format!("{}/@type", Self::node_path(path).trim_end_matches('/')),
                        format!("@type names unknown class {claimed}"),
                    ));
                    return;
                };
                if class_def.is_mixin || class_def.is_abstract {
                    let kind = if class_def.is_mixin { "mixin" } else { "abstract" };
                    self.findings.push(Finding::error(
                        rules::ABSTRACT_INSTANTIATION,
                        format!("{}/@type", Self::node_path(path).trim_end_matches('/')),
                        format!("@type names {kind} class {claimed}, which cannot be instantiated"),
                    ));
                    return;
                }
                if !self.subsumed_by_range(claimed, range) {
                    self.findings.push(Finding::error(
                        rules::RANGE_CLASS,
                        Self::node_path(path),
                        format!("@type {claimed} is not subsumed by the declared range"),
                    ));
                }
                claimed.clone()
            }
            None => match range {
                RangeSpec::Class { name } => {
                    let class_def = &self.ir.classes[name];
                    if class_def.is_mixin || class_def.is_abstract {
                        let kind = if class_def.is_mixin { "mixin" } else { "abstract" };
                        self.findings.push(Finding::error(
                            rules::ABSTRACT_INSTANTIATION,
                            Self::node_path(path),
                            format!("{kind} class {name} cannot be instantiated"),
                        ));
                        return;
                    }
                    name.clone()
                }
                RangeSpec::Union { .. } => {
                    self.findings.push(Finding::error(
                        rules::RANGE_CLASS,
                        Self::node_path(path),
                        "union-ranged value requires an explicit @type".to_string(),
                    ));
                    return;
                }
                RangeSpec::Datatype { .. } => unreachable!("caller checks datatype ranges"),
            },
        };
        self.check_body(map, &class, path);
    }

    fn subsumed_by_range(&self, class: &str, range: &RangeSpec) -> bool {
        match range {
            RangeSpec::Class { name } => self.ir.subsumes(name, class).unwrap_or(false),
            RangeSpec::Union { members } => members
                .iter()
                .any(|m| self.ir.subsumes(m, class).unwrap_or(false)),
            RangeSpec::Datatype { .. } => false,
        }
    }

    fn check_body(&mut self, map: &NodeMap, class: &str, path: &str) {
        if let Some(id) = &map.id {
            if !crate::iri::is_absolute_iri(id) {
                self.findings.push(Finding::error(
                    rules::RANGE_DATATYPE,
                    format!("{}/@id", Self::node_path(path).trim_end_matches('/')),
                    format!("@id must be an absolute IRI, got `{id}`"),
                ));
            }
        }

        let effective: Vec<(String, &SlotDef)> = self
            .effective(class)
            .iter()
            .map(|(n, d)| (n.clone(), *d))
            .collect();
        let by_name: HashMap<&str, &SlotDef> =
            effective.iter().map(|(n, d)| (n.as_str(), *d)).collect();

        for (key, slot_values) in &map.entries {
            let key_path = format!("{path}/{key}");
            let Some(slot) = by_name.get(key.as_str()) else {
                self.findings.push(Finding::error(
                    rules::UNKNOWN_SLOT,
                    &key_path,
                    format!("class {class} has no slot named {key}"),
                ));
                continue;
            };
            let count = slot_values.values.len();
            if count < slot.min_cardinality as usize || !slot.max_cardinality.allows(count) {
                self.findings.push(Finding::error(
                    rules::CARDINALITY,
                    &key_path,
                    format!(
                        "{count} value(s) outside cardinality {}..{}",
                        slot.min_cardinality, slot.max_cardinality
                    ),
                ));
            }
            self.check_values(slot, slot_values, &key_path);
        }

        // Mandatory slots that are entirely absent.
        for (name, slot) in &effective {
            if slot.min_cardinality >= 1 && !map.entries.contains_key(name) {
                self.findings.push(Finding::error(
                    rules::CARDINALITY,
                    format!("{path}/{name}"),
                    format!(
                        "required slot ({}..{}) is missing",
                        slot.min_cardinality, slot.max_cardinality
                    ),
                ));
            }
        }
    }

    fn check_values(&mut self, slot: &SlotDef, slot_values: &SlotValues, key_path: &str) {
        for (idx, value) in slot_values.values.iter().enumerate() {
            let value_path = if slot_values.was_list {
                format!("{key_path}/{idx}")
            } else {
                key_path.to_string()
            };
            match (&slot.range, value) {
                (RangeSpec::Datatype { name }, Node::Scalar(scalar)) => {
                    let Some((_, rule)) = self.ir.resolve_datatype(name) else {
                        self.findings.push(Finding::error(
                            rules::RANGE_DATATYPE,
                            &value_path,
                            format!("unresolvable datatype {name}"),
                        ));
                        continue;
                    };
                    match lexical::check(&rule, scalar) {
                        Ok(true) => {}
                        Ok(false) => self.findings.push(Finding::error(
                            rules::RANGE_DATATYPE,
                            &value_path,
                            format!(
                                "value `{}` fails lexical rule {rule} of datatype {name}",
                                scalar.lexical()
                            ),
                        )),
                        Err(unknown) => self.findings.push(Finding::error(
                            rules::RANGE_DATATYPE,
                            &value_path,
                            unknown.to_string(),
                        )),
                    }
                }
                (RangeSpec::Datatype { name }, Node::Map(_)) => {
                    self.findings.push(Finding::error(
                        rules::RANGE_DATATYPE,
                        &value_path,
                        format!("expected a {name} literal, found a nested object"),
                    ));
                }
                (RangeSpec::Class { .. } | RangeSpec::Union { .. }, Node::Map(child)) => {
                    self.check_node(child, &slot.range, &value_path);
                }
                (RangeSpec::Class { .. } | RangeSpec::Union { .. }, Node::Scalar(s)) => {
                    self.findings.push(Finding::error(
                        rules::RANGE_CLASS,
                        &value_path,
                        format!("expected a nested object, found scalar `{}`", s.lexical()),
                    ));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Scalar;
    use crate::ir::{ClassDef, MaxCard, SchemaIR, SlotDef};

    fn ir_with_dataset() -> SchemaIR {
        let mut ir = SchemaIR::new("t", "1.0.0");
        ir.classes.insert(
            "Dataset".into(),
            ClassDef {
                name: "Dataset".into(),
                class_uri: "http://www.w3.org/ns/dcat#Dataset".into(),
                description: None,
                parents: vec![],
                mixins: vec![],
                own_slots: vec!["title".into(), "issued".into(), "publisher".into()],
                is_mixin: false,
                is_abstract: false,
            },
        );
        ir.classes.insert(
            "Agent".into(),
            ClassDef {
                name: "Agent".into(),
                class_uri: "http://xmlns.com/foaf/0.1/Agent".into(),
                description: None,
                parents: vec![],
                mixins: vec![],
                own_slots: vec!["name".into()],
                is_mixin: false,
                is_abstract: false,
            },
        );
        ir.classes.insert(
            "Helper".into(),
            ClassDef {
                name: "Helper".into(),
                class_uri: "http://example.org/ns#Helper".into(),
                description: None,
                parents: vec![],
                mixins: vec![],
                own_slots: vec![],
                is_mixin: true,
                is_abstract: false,
            },
        );
        ir.slots.insert(
            "title".into(),
            SlotDef {
                name: "title".into(),
                slot_uri: "http://purl.org/dc/terms/title".into(),
                range: crate::ir::RangeSpec::datatype("string"),
                min_cardinality: 0,
                max_cardinality: MaxCard::Unbounded,
                super_slot: None,
                description: None,
            },
        );
        ir.slots.insert(
            "issued".into(),
            SlotDef {
                name: "issued".into(),
                slot_uri: "http://purl.org/dc/terms/issued".into(),
                range: crate::ir::RangeSpec::datatype("date"),
                min_cardinality: 0,
                max_cardinality: MaxCard::Bounded(1),
                super_slot: None,
                description: None,
            },
        );
        ir.slots.insert(
            "publisher".into(),
            SlotDef {
                name: "publisher".into(),
                slot_uri: "http://purl.org/dc/terms/publisher".into(),
                range: crate::ir::RangeSpec::class("Agent"),
                min_cardinality: 0,
                max_cardinality: MaxCard::Bounded(1),
                super_slot: None,
                description: None,
            },
        );
        ir.slots.insert(
            "name".into(),
            SlotDef {
                name: "name".into(),
                slot_uri: "http://xmlns.com/foaf/0.1/name".into(),
                range: crate::ir::RangeSpec::datatype("string"),
                min_cardinality: 1,
                max_cardinality: MaxCard::Unbounded,
                super_slot: None,
                description: None,
            },
        );
        ir.validate().unwrap();
        ir
    }

    fn doc(yaml: &str) -> InstanceDocument {
        InstanceDocument::parse(yaml, "Dataset", "test").unwrap()
    }

    #[test]
    fn empty_map_is_conformant_for_all_optional_class() {
        let ir = ir_with_dataset();
        let report = validate(&doc("{}"), &ir).unwrap();
        assert!(report.conformant, "{:?}", report.findings);
    }

    #[test]
    fn unknown_root_class_is_an_error() {
        let ir = ir_with_dataset();
        let d = InstanceDocument::parse("{}", "Nope", "test").unwrap();
        assert_eq!(
            validate(&d, &ir).unwrap_err(),
            ValidateError::UnknownRootClass("Nope".into())
        );
    }

    #[test]
    fn unknown_slot_is_reported_at_its_path() {
        let ir = ir_with_dataset();
        let report = validate(&doc("bogus: 1\n"), &ir).unwrap();
        assert_eq!(report.error_count(), 1);
        assert_eq!(report.findings[0].rule, rules::UNKNOWN_SLOT);
        assert_eq!(report.findings[0].path, "/bogus");
    }

    #[test]
    fn cardinality_violation_is_one_finding() {
        let ir = ir_with_dataset();
        let report = validate(&doc("issued:\n  - 2024-01-01\n  - 2024-01-02\n"), &ir).unwrap();
        assert_eq!(report.error_count(), 1);
        assert_eq!(report.findings[0].rule, rules::CARDINALITY);
        assert_eq!(report.findings[0].path, "/issued");
    }

    #[test]
    fn missing_required_slot_is_reported() {
        let ir = ir_with_dataset();
        let report = validate(&doc("publisher: {}\n"), &ir).unwrap();
        assert_eq!(report.error_count(), 1);
        assert_eq!(report.findings[0].rule, rules::CARDINALITY);
        assert_eq!(report.findings[0].path, "/publisher/name");
    }

    #[test]
    fn bad_date_is_range_datatype() {
        let ir = ir_with_dataset();
        let report = validate(&doc("issued: 2024-02-30\n"), &ir).unwrap();
        assert_eq!(report.error_count(), 1);
        assert_eq!(report.findings[0].rule, rules::RANGE_DATATYPE);
        assert_eq!(report.findings[0].path, "/issued");
    }

    #[test]
    fn mixin_type_claim_is_abstract_instantiation_only() {
        let ir = ir_with_dataset();
        let report = validate(
            &doc("publisher:\n  \"@type\": Helper\n  name: x\n"),
            &ir,
        )
        .unwrap();
        assert_eq!(report.error_count(), 1);
        assert_eq!(report.findings[0].rule, rules::ABSTRACT_INSTANTIATION);
        assert_eq!(report.findings[0].path, "/publisher/@type");
    }

    #[test]
    fn wrong_type_claim_is_range_class() {
        let ir = ir_with_dataset();
        let report = validate(&doc("publisher:\n  \"@type\": Dataset\n"), &ir).unwrap();
        assert_eq!(report.error_count(), 1);
        assert_eq!(report.findings[0].rule, rules::RANGE_CLASS);
        assert_eq!(report.findings[0].path, "/publisher");
    }

    #[test]
    fn scalar_for_class_range_is_range_class() {
        // One RANGE_CLASS finding for the scalar; no recursion into a body
        // that does not exist.
        let ir = ir_with_dataset();
        let report = validate(&doc("publisher: someone\n"), &ir).unwrap();
        assert_eq!(report.error_count(), 1);
        assert_eq!(report.findings[0].rule, rules::RANGE_CLASS);
        assert_eq!(report.findings[0].path, "/publisher");
    }

    #[test]
    fn lexical_rules_cover_registry() {
        use lexical::check;
        assert!(check("DATE", &Scalar::Str("2024-02-29".into())).unwrap());
        assert!(!check("DATE", &Scalar::Str("2024-02-30".into())).unwrap());
        assert!(!check("DATE", &Scalar::Str("2023-02-29".into())).unwrap());
        assert!(check("INCHIKEY", &Scalar::Str("AAAAAAAAAAAAAA-BBBBBBBBFA-N".into())).unwrap());
        assert!(!check("INCHIKEY", &Scalar::Str("not-a-key".into())).unwrap());
        assert!(check(
            "ANYURI",
            &Scalar::Str("http://purl.obolibrary.org/obo/CHMO_0000595".into())
        )
        .unwrap());
        assert!(!check("ANYURI", &Scalar::Str("not a uri".into())).unwrap());
        assert!(check("SMILES_NONEMPTY", &Scalar::Str("CCO".into())).unwrap());
        assert!(!check("SMILES_NONEMPTY", &Scalar::Str("C C".into())).unwrap());
        assert!(!check("SMILES_NONEMPTY", &Scalar::Str("".into())).unwrap());
        assert!(check("DECIMAL", &Scalar::Float(7.4)).unwrap());
        assert!(check("DECIMAL", &Scalar::Str("7.4".into())).unwrap());
        assert!(check("INTEGER", &Scalar::Int(42)).unwrap());
        assert!(!check("INTEGER", &Scalar::Float(4.2)).unwrap());
        assert!(check("BOOLEAN", &Scalar::Bool(true)).unwrap());
        assert!(check("DURATION", &Scalar::Str("P1DT2H".into())).unwrap());
        assert!(!check("DURATION", &Scalar::Str("P".into())).unwrap());
        assert!(check("DATETIME", &Scalar::Str("2024-01-01T10:30:00Z".into())).unwrap());
        assert!(!check("DATETIME", &Scalar::Str("2024-01-01".into())).unwrap());
        assert!(matches!(check("NOPE", &Scalar::Int(1)), Err(_)));
    }
}

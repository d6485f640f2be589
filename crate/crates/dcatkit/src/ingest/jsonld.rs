//! Minimal JSON-LD subset reader for SHACL shape documents.
//!
//! Supported: a top-level `@context` prefix object, `@graph` arrays,
//! `@id`/`@type`, nested node objects, value objects with `@value`, arrays,
//! and `sh:or` as either a plain array or an `@list` wrapper. Remote
//! contexts are not fetched; a local prefix override can be supplied.

use super::{IngestError, NodeShape, OrBranch, PropertyShape, ShapeGraph};
use crate::iri::{expand, Expansion, SHACL_NS};
use serde_json::{Map, Value};
use std::collections::BTreeMap;

pub fn parse_jsonld(bytes: &[u8]) -> Result<ShapeGraph, IngestError> {
    parse_jsonld_with_context(bytes, &BTreeMap::new())
}

/// Parse with additional prefix bindings that stand in for remote contexts.
pub fn parse_jsonld_with_context(
    bytes: &[u8],
    context_override: &BTreeMap<String, String>,
) -> Result<ShapeGraph, IngestError> {
    let root: Value = serde_json::from_slice(bytes)?;
    let Value::Object(ref obj) = root else {
        return Err(IngestError::NotAnObject);
    };

    let mut parser = Parser {
        prefixes: context_override.clone(),
        warnings: Vec::new(),
        blank_node_count: 0,
        blank_prop_count: 0,
    };
    if let Some(ctx) = obj.get("@context") {
        parser.read_context(ctx)?;
    }

    let graph_nodes: Vec<&Map<String, Value>> = match obj.get("@graph") {
        Some(Value::Array(items)) => items
            .iter()
            .filter_map(|item| match item {
                Value::Object(o) => Some(o),
                other => {
                    parser
                        .warnings
                        .push(format!("@graph entry is not an object: {other}"));
                    None
                }
            })
            .collect(),
        Some(other) => {
            parser
                .warnings
                .push(format!("@graph is not an array: {other}"));
            Vec::new()
        }
        // A document without @graph may itself be a single node object.
        None => {
            if obj.keys().any(|k| k != "@context") {
                vec![obj]
            } else {
                Vec::new()
            }
        }
    };

    // Index graph nodes by @id so sh:property can reference shapes declared
    // as separate graph nodes.
    let mut by_id: BTreeMap<String, &Map<String, Value>> = BTreeMap::new();
    for node in &graph_nodes {
        if let Some(Value::String(id)) = node.get("@id") {
            if let Ok(expanded) = parser.expand_loose(id) {
                by_id.insert(expanded, node);
            }
            by_id.insert(id.clone(), node);
        }
    }

    let mut node_shapes = Vec::new();
    for node in &graph_nodes {
        if !parser.is_node_shape(node) {
            continue;
        }
        let shape = parser.read_node_shape(node, &by_id)?;
        node_shapes.push(shape);
    }

    Ok(ShapeGraph {
        prefix_map: parser.prefixes,
        node_shapes,
        parse_warnings: parser.warnings,
    })
}

struct Parser {
    prefixes: BTreeMap<String, String>,
    warnings: Vec<String>,
    blank_node_count: usize,
    blank_prop_count: usize,
}

impl Parser {
    fn read_context(&mut self, ctx: &Value) -> Result<(), IngestError> {
        match ctx {
            Value::Object(entries) => {
                for (key, value) in entries {
                    if key.starts_with('@') {
                        self.warnings
                            .push(format!("unsupported @context keyword {key} ignored"));
                        continue;
                    }
                    match value {
                        Value::String(base) => {
                            self.prefixes.insert(key.clone(), base.clone());
                        }
                        Value::Object(def) => match def.get("@id") {
                            Some(Value::String(base)) => {
                                self.prefixes.insert(key.clone(), base.clone());
                            }
                            _ => self.warnings.push(format!(
                                "context term {key} has no usable @id; ignored"
                            )),
                        },
                        other => self
                            .warnings
                            .push(format!("context term {key} has unsupported form {other}")),
                    }
                }
                Ok(())
            }
            Value::Array(parts) => {
                for part in parts {
                    self.read_context(part)?;
                }
                Ok(())
            }
            Value::String(remote) => {
                if self.prefixes.is_empty() {
                    Err(IngestError::RemoteContext(remote.clone()))
                } else {
                    // An override was supplied; note the skipped remote.
                    self.warnings
                        .push(format!("remote @context {remote} replaced by local override"));
                    Ok(())
                }
            }
            other => {
                self.warnings
                    .push(format!("unsupported @context form {other}"));
                Ok(())
            }
        }
    }

    fn expand_strict(&self, token: &str) -> Result<String, IngestError> {
        match expand(token, &self.prefixes) {
            Expansion::Absolute(iri) => Ok(iri),
            Expansion::UnresolvedPrefix(t) | Expansion::NotAnIri(t) => {
                Err(IngestError::MissingContext(t))
            }
        }
    }

    fn expand_loose(&self, token: &str) -> Result<String, ()> {
        match expand(token, &self.prefixes) {
            Expansion::Absolute(iri) => Ok(iri),
            _ => Err(()),
        }
    }

    /// A graph node counts as a node shape if typed sh:NodeShape or if it
    /// carries sh:targetClass / sh:property keys.
    fn is_node_shape(&self, node: &Map<String, Value>) -> bool {
        if let Some(types) = node.get("@type") {
            let type_list: Vec<&str> = match types {
                Value::String(s) => vec![s.as_str()],
                Value::Array(items) => items.iter().filter_map(|v| v.as_str()).collect(),
                _ => vec![],
            };
            for t in type_list {
                if let Ok(iri) = self.expand_loose(t) {
                    if iri == format!("{SHACL_NS}NodeShape") {
                        return true;
                    }
                    if iri == format!("{SHACL_NS}PropertyShape") {
                        return false;
                    }
                }
            }
        }
        self.shacl_key(node, "targetClass").is_some() || self.shacl_key(node, "property").is_some()
    }

    /// Find the value of a SHACL term among the node's keys, whatever prefix
    /// spelling the document uses.
    fn shacl_key<'v>(&self, node: &'v Map<String, Value>, term: &str) -> Option<&'v Value> {
        let want = format!("{SHACL_NS}{term}");
        node.iter().find_map(|(key, value)| {
            if key.starts_with('@') {
                return None;
            }
            match self.expand_loose(key) {
                Ok(iri) if iri == want => Some(value),
                _ => None,
            }
        })
    }

    fn read_node_shape(
        &mut self,
        node: &Map<String, Value>,
        by_id: &BTreeMap<String, &Map<String, Value>>,
    ) -> Result<NodeShape, IngestError> {
        let id = match node.get("@id") {
            Some(Value::String(id)) => self.expand_loose(id).unwrap_or_else(|_| id.clone()),
            _ => {
                self.blank_node_count += 1;
                format!("_:ns{}", self.blank_node_count)
            }
        };

        let mut shape = NodeShape {
            id: id.clone(),
            ..Default::default()
        };

        for (key, value) in node {
            if key.starts_with('@') {
                match key.as_str() {
                    "@id" | "@type" => {}
                    other => self
                        .warnings
                        .push(format!("{id}: unsupported keyword {other} ignored")),
                }
                continue;
            }
            let expanded_key = match self.expand_loose(key) {
                Ok(iri) => iri,
                Err(()) => {
                    self.warnings
                        .push(format!("{id}: key {key} has no resolvable prefix; ignored"));
                    continue;
                }
            };
            let Some(term) = expanded_key.strip_prefix(SHACL_NS) else {
                self.warnings
                    .push(format!("{id}: non-SHACL key {key} ignored"));
                continue;
            };
            match term {
                "targetClass" => shape.target_class = Some(self.iri_value(&id, value)?),
                "description" => shape.description = self.string_value(value),
                "name" => {}
                "property" => {
                    for entry in as_array(value) {
                        match entry {
                            Value::Object(obj) => {
                                let resolved = self.resolve_property_node(obj, by_id);
                                let ps = self.read_property_shape(resolved, &id)?;
                                shape.property_shapes.push(ps);
                            }
                            other => self.warnings.push(format!(
                                "{id}: sh:property entry is not an object: {other}"
                            )),
                        }
                    }
                }
                other => self
                    .warnings
                    .push(format!("{id}: unsupported constraint sh:{other} ignored")),
            }
        }
        Ok(shape)
    }

    /// A `{"@id": ...}`-only object under sh:property is a reference to a
    /// property shape declared elsewhere in the graph.
    fn resolve_property_node<'v>(
        &mut self,
        obj: &'v Map<String, Value>,
        by_id: &BTreeMap<String, &'v Map<String, Value>>,
    ) -> &'v Map<String, Value> {
        if obj.len() == 1 {
            if let Some(Value::String(reference)) = obj.get("@id") {
                let expanded = self
                    .expand_loose(reference)
                    .unwrap_or_else(|_| reference.clone());
                if let Some(target) = by_id.get(&expanded).or_else(|| by_id.get(reference)) {
                    return target;
                }
                self.warnings
                    .push(format!("unresolved sh:property reference {reference}"));
            }
        }
        obj
    }

    fn read_property_shape(
        &mut self,
        node: &Map<String, Value>,
        owner: &str,
    ) -> Result<PropertyShape, IngestError> {
        let id = match node.get("@id") {
            Some(Value::String(id)) if !id.starts_with("_:") => {
                self.expand_loose(id).unwrap_or_else(|_| id.clone())
            }
            _ => {
                self.blank_prop_count += 1;
                format!("_:ps{}", self.blank_prop_count)
            }
        };
        let mut ps = PropertyShape::new(id.clone());

        for (key, value) in node {
            if key.starts_with('@') {
                continue;
            }
            let expanded_key = match self.expand_loose(key) {
                Ok(iri) => iri,
                Err(()) => {
                    self.warnings
                        .push(format!("{owner}/{id}: key {key} unresolvable; ignored"));
                    continue;
                }
            };
            let Some(term) = expanded_key.strip_prefix(SHACL_NS) else {
                self.warnings
                    .push(format!("{owner}/{id}: non-SHACL key {key} ignored"));
                continue;
            };
            match term {
                "path" => ps.path = Some(self.iri_value(&id, value)?),
                "name" => ps.name = self.string_value(value),
                "description" => ps.description = self.string_value(value),
                "minCount" => ps.min_count = self.int_value(&id, value),
                "maxCount" => ps.max_count = self.int_value(&id, value),
                "pattern" => ps.pattern = self.string_value(value),
                "class" => {
                    for v in as_array(value) {
                        ps.class_constraints.push(self.iri_value(&id, v)?);
                    }
                }
                "datatype" => {
                    for v in as_array(value) {
                        ps.datatype_constraints.push(self.iri_value(&id, v)?);
                    }
                }
                "nodeKind" => {
                    let kind = self.iri_value(&id, value)?;
                    if kind == format!("{SHACL_NS}IRI") {
                        ps.node_kind_iri = true;
                    } else {
                        self.warnings
                            .push(format!("{id}: sh:nodeKind {kind} not enforced"));
                    }
                }
                "or" => {
                    let branches = match value {
                        Value::Object(obj) if obj.contains_key("@list") => {
                            as_array(obj.get("@list").unwrap())
                        }
                        other => as_array(other),
                    };
                    for branch in branches {
                        match branch {
                            Value::Object(b) => {
                                let parsed = self.read_or_branch(b, &id)?;
                                ps.or_branches.push(parsed);
                            }
                            other => self
                                .warnings
                                .push(format!("{id}: sh:or branch is not an object: {other}")),
                        }
                    }
                }
                other => self
                    .warnings
                    .push(format!("{id}: unsupported constraint sh:{other} ignored")),
            }
        }
        Ok(ps)
    }

    fn read_or_branch(
        &mut self,
        branch: &Map<String, Value>,
        owner: &str,
    ) -> Result<OrBranch, IngestError> {
        let mut out = OrBranch::default();
        for (key, value) in branch {
            if key.starts_with('@') {
                continue;
            }
            let expanded_key = match self.expand_loose(key) {
                Ok(iri) => iri,
                Err(()) => continue,
            };
            match expanded_key.strip_prefix(SHACL_NS) {
                Some("class") => {
                    for v in as_array(value) {
                        out.classes.push(self.iri_value(owner, v)?);
                    }
                }
                Some("datatype") => {
                    for v in as_array(value) {
                        out.datatypes.push(self.iri_value(owner, v)?);
                    }
                }
                Some(other) => self
                    .warnings
                    .push(format!("{owner}: sh:or branch constraint sh:{other} ignored")),
                None => {}
            }
        }
        Ok(out)
    }

    /// Extract an IRI from `"token"`, `{"@id": "token"}` or a one-element
    /// array of either.
    fn iri_value(&mut self, owner: &str, value: &Value) -> Result<String, IngestError> {
        match value {
            Value::String(s) => self.expand_strict(s),
            Value::Object(obj) => match obj.get("@id") {
                Some(Value::String(s)) => self.expand_strict(s),
                _ => Err(IngestError::MissingContext(format!(
                    "{owner}: expected @id object"
                ))),
            },
            Value::Array(items) => {
                if items.len() > 1 {
                    self.warnings
                        .push(format!("{owner}: multiple IRI values; using the first"));
                }
                match items.first() {
                    Some(first) => self.iri_value(owner, first),
                    None => Err(IngestError::MissingContext(format!(
                        "{owner}: empty IRI value list"
                    ))),
                }
            }
            other => Err(IngestError::MissingContext(format!(
                "{owner}: unsupported IRI value {other}"
            ))),
        }
    }

    fn string_value(&mut self, value: &Value) -> Option<String> {
        match value {
            Value::String(s) => Some(s.clone()),
            Value::Object(obj) => match obj.get("@value") {
                Some(Value::String(s)) => Some(s.clone()),
                Some(other) => Some(other.to_string()),
                None => None,
            },
            Value::Array(items) => match items.first() {
                Some(first) => self.string_value(first),
                None => None,
            },
            _ => None,
        }
    }

    fn int_value(&mut self, owner: &str, value: &Value) -> Option<u32> {
        let n = match value {
            Value::Number(n) => n.as_u64(),
            Value::String(s) => s.parse::<u64>().ok(),
            Value::Object(obj) => match obj.get("@value") {
                Some(Value::Number(n)) => n.as_u64(),
                Some(Value::String(s)) => s.parse::<u64>().ok(),
                _ => None,
            },
            _ => None,
        };
        match n.and_then(|v| u32::try_from(v).ok()) {
            Some(v) => Some(v),
            None => {
                self.warnings
                    .push(format!("{owner}: non-integer count {value} ignored"));
                None
            }
        }
    }
}

fn as_array(value: &Value) -> Vec<&Value> {
    match value {
        Value::Array(items) => items.iter().collect(),
        other => vec![other],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expands_target_class_via_context() {
        let doc = br#"{
            "@context": {"sh": "http://www.w3.org/ns/shacl#", "dcat": "http://www.w3.org/ns/dcat#"},
            "@graph": [{
                "@id": "_:s1",
                "@type": "sh:NodeShape",
                "sh:targetClass": {"@id": "dcat:Dataset"}
            }]
        }"#;
        let graph = parse_jsonld(doc).unwrap();
        assert_eq!(graph.node_shapes.len(), 1);
        assert_eq!(
            graph.node_shapes[0].target_class.as_deref(),
            Some("http://www.w3.org/ns/dcat#Dataset")
        );
    }

    #[test]
    fn empty_graph_yields_zero_shapes() {
        let doc = br#"{"@context": {"sh": "http://www.w3.org/ns/shacl#"}, "@graph": []}"#;
        let graph = parse_jsonld(doc).unwrap();
        assert!(graph.node_shapes.is_empty());
        assert!(graph.parse_warnings.is_empty());
    }

    #[test]
    fn malformed_json_is_an_error() {
        assert!(matches!(
            parse_jsonld(b"{not json"),
            Err(IngestError::MalformedJson(_))
        ));
    }

    #[test]
    fn unresolvable_prefix_is_missing_context() {
        let doc = br#"{
            "@context": {"sh": "http://www.w3.org/ns/shacl#"},
            "@graph": [{"@type": "sh:NodeShape", "sh:targetClass": {"@id": "mystery:Thing"}}]
        }"#;
        assert!(matches!(
            parse_jsonld(doc),
            Err(IngestError::MissingContext(_))
        ));
    }

    #[test]
    fn remote_context_requires_override() {
        let doc = br#"{"@context": "https://example.org/ctx.jsonld", "@graph": []}"#;
        assert!(matches!(
            parse_jsonld(doc),
            Err(IngestError::RemoteContext(_))
        ));
        let mut overrides = BTreeMap::new();
        overrides.insert("sh".to_string(), "http://www.w3.org/ns/shacl#".to_string());
        let graph = parse_jsonld_with_context(doc, &overrides).unwrap();
        assert_eq!(graph.parse_warnings.len(), 1);
    }

    #[test]
    fn blank_property_shapes_get_document_order_ids() {
        let doc = br#"{
            "@context": {"sh": "http://www.w3.org/ns/shacl#", "dct": "http://purl.org/dc/terms/", "dcat": "http://www.w3.org/ns/dcat#", "xsd": "http://www.w3.org/2001/XMLSchema#"},
            "@graph": [{
                "@type": "sh:NodeShape",
                "sh:targetClass": {"@id": "dcat:Dataset"},
                "sh:property": [
                    {"sh:path": {"@id": "dct:title"}, "sh:datatype": {"@id": "xsd:string"}},
                    {"sh:path": {"@id": "dct:description"}, "sh:datatype": {"@id": "xsd:string"}}
                ]
            }]
        }"#;
        let graph = parse_jsonld(doc).unwrap();
        let ids: Vec<&str> = graph.node_shapes[0]
            .property_shapes
            .iter()
            .map(|p| p.id.as_str())
            .collect();
        assert_eq!(ids, vec!["_:ps1", "_:ps2"]);
    }

    #[test]
    fn sh_or_accepts_list_and_array_forms() {
        let doc = br#"{
            "@context": {"sh": "http://www.w3.org/ns/shacl#", "dcat": "http://www.w3.org/ns/dcat#", "foaf": "http://xmlns.com/foaf/0.1/"},
            "@graph": [{
                "@type": "sh:NodeShape",
                "sh:targetClass": {"@id": "dcat:CatalogRecord"},
                "sh:property": [{
                    "sh:path": {"@id": "foaf:primaryTopic"},
                    "sh:or": {"@list": [
                        {"sh:class": {"@id": "dcat:Dataset"}},
                        {"sh:class": {"@id": "dcat:Catalog"}}
                    ]}
                }]
            }]
        }"#;
        let graph = parse_jsonld(doc).unwrap();
        let ps = &graph.node_shapes[0].property_shapes[0];
        assert_eq!(ps.or_branches.len(), 2);
        assert_eq!(
            ps.or_branches[0].classes,
            vec!["http://www.w3.org/ns/dcat#Dataset".to_string()]
        );
    }
}

//! Instance metadata documents: YAML/JSON trees of typed records claiming
//! conformance to a profile class.
//!
//! Multivalued slots accept either a scalar/map or a list; singletons are
//! normalized to one-element lists at parse time, remembering whether the
//! source used a list so findings can point at exact value positions.

use indexmap::IndexMap;
use thiserror::Error;

pub const TYPE_KEY: &str = "@type";
pub const ID_KEY: &str = "@id";

#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Str(String),
    Int(i64),
    Float(f64),
    Bool(bool),
}

impl Scalar {
    /// Lexical form used for checks and RDF literal emission.
    pub fn lexical(&self) -> String {
        match self {
            Scalar::Str(s) => s.clone(),
            Scalar::Int(i) => i.to_string(),
            Scalar::Float(f) => f.to_string(),
            Scalar::Bool(b) => b.to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Scalar::Str(_) => "string",
            Scalar::Int(_) => "integer",
            Scalar::Float(_) => "number",
            Scalar::Bool(_) => "boolean",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotValues {
    pub values: Vec<Node>,
    /// True when the source document used a YAML/JSON list.
    pub was_list: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodeMap {
    /// `@type`: overrides or refines the class claim for this node.
    pub type_hint: Option<String>,
    /// `@id`: instance IRI, used as the RDF subject.
    pub id: Option<String>,
    pub entries: IndexMap<String, SlotValues>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Scalar(Scalar),
    Map(NodeMap),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceDocument {
    pub root_class: String,
    pub root: NodeMap,
    pub source_name: String,
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("{0}")]
    Yaml(#[from] serde_yaml::Error),
    #[error("document root must be a mapping")]
    RootNotAMap,
    #[error("{path}: mapping keys must be strings")]
    NonStringKey { path: String },
    #[error("{path}: nested lists are not supported")]
    NestedList { path: String },
    #[error("{path}: reserved key {key} must be a string scalar")]
    BadReservedKey { path: String, key: String },
}

impl InstanceDocument {
    /// Parse a YAML or JSON document (YAML is a superset of JSON, so one
    /// parser covers both external formats).
    pub fn parse(
        source: &str,
        root_class: impl Into<String>,
        source_name: impl Into<String>,
    ) -> Result<InstanceDocument, DocumentError> {
        let value: serde_yaml::Value = serde_yaml::from_str(source)?;
        let root = match yaml_to_map(&value, "") {
            Ok(map) => map,
            Err(e) => return Err(e),
        };
        Ok(InstanceDocument {
            root_class: root_class.into(),
            root,
            source_name: source_name.into(),
        })
    }

    /// Build a document from an already-parsed JSON value (harvested
    /// records arrive this way).
    pub fn from_json_value(
        value: &serde_json::Value,
        root_class: impl Into<String>,
        source_name: impl Into<String>,
    ) -> Result<InstanceDocument, DocumentError> {
        let root = json_to_map(value, "")?;
        Ok(InstanceDocument {
            root_class: root_class.into(),
            root,
            source_name: source_name.into(),
        })
    }
}

impl NodeMap {
    /// JSON rendering of the tree (used by the JSON Schema oracle and for
    /// persisting harvested records).
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        if let Some(t) = &self.type_hint {
            obj.insert(TYPE_KEY.to_string(), serde_json::Value::String(t.clone()));
        }
        if let Some(id) = &self.id {
            obj.insert(ID_KEY.to_string(), serde_json::Value::String(id.clone()));
        }
        for (key, slot) in &self.entries {
            let rendered: Vec<serde_json::Value> =
                slot.values.iter().map(node_to_json).collect();
            let value = if slot.was_list {
                serde_json::Value::Array(rendered)
            } else {
                rendered.into_iter().next().unwrap_or(serde_json::Value::Null)
            };
            obj.insert(key.clone(), value);
        }
        serde_json::Value::Object(obj)
    }
}

fn node_to_json(node: &Node) -> serde_json::Value {
    match node {
        Node::Scalar(Scalar::Str(s)) => serde_json::Value::String(s.clone()),
        Node::Scalar(Scalar::Int(i)) => serde_json::Value::Number((*i).into()),
        Node::Scalar(Scalar::Float(f)) => serde_json::Number::from_f64(*f)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null),
        Node::Scalar(Scalar::Bool(b)) => serde_json::Value::Bool(*b),
        Node::Map(map) => map.to_json_value(),
    }
}

fn join(path: &str, key: &str) -> String {
    format!("{path}/{key}")
}

fn yaml_to_map(value: &serde_yaml::Value, path: &str) -> Result<NodeMap, DocumentError> {
    let value = untag(value);
    let serde_yaml::Value::Mapping(mapping) = value else {
        return Err(DocumentError::RootNotAMap);
    };
    let mut map = NodeMap::default();
    for (k, v) in mapping {
        let serde_yaml::Value::String(key) = untag(k) else {
            return Err(DocumentError::NonStringKey {
                path: path.to_string(),
            });
        };
        if key == TYPE_KEY || key == ID_KEY {
            match untag(v) {
                serde_yaml::Value::String(s) => {
                    if key == TYPE_KEY {
                        map.type_hint = Some(s.clone());
                    } else {
                        map.id = Some(s.clone());
                    }
                }
                _ => {
                    return Err(DocumentError::BadReservedKey {
                        path: path.to_string(),
                        key: key.clone(),
                    })
                }
            }
            continue;
        }
        let entry_path = join(path, &key);
        let slot = yaml_to_values(v, &entry_path)?;
        map.entries.insert(key.clone(), slot);
    }
    Ok(map)
}

fn yaml_to_values(value: &serde_yaml::Value, path: &str) -> Result<SlotValues, DocumentError> {
    match untag(value) {
        serde_yaml::Value::Null => Ok(SlotValues {
            values: Vec::new(),
            was_list: false,
        }),
        serde_yaml::Value::Sequence(items) => {
            let mut values = Vec::new();
            for (idx, item) in items.iter().enumerate() {
                let item_path = join(path, &idx.to_string());
                values.push(yaml_to_node(item, &item_path)?);
            }
            Ok(SlotValues {
                values,
                was_list: true,
            })
        }
        other => Ok(SlotValues {
            values: vec![yaml_to_node(other, path)?],
            was_list: false,
        }),
    }
}

fn yaml_to_node(value: &serde_yaml::Value, path: &str) -> Result<Node, DocumentError> {
    match untag(value) {
        serde_yaml::Value::Null => Ok(Node::Scalar(Scalar::Str(String::new()))),
        serde_yaml::Value::Bool(b) => Ok(Node::Scalar(Scalar::Bool(*b))),
        serde_yaml::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Node::Scalar(Scalar::Int(i)))
            } else {
                Ok(Node::Scalar(Scalar::Float(n.as_f64().unwrap_or(f64::NAN))))
            }
        }
        serde_yaml::Value::String(s) => Ok(Node::Scalar(Scalar::Str(s.clone()))),
        serde_yaml::Value::Sequence(_) => Err(DocumentError::NestedList {
            path: path.to_string(),
        }),
        serde_yaml::Value::Mapping(_) => Ok(Node::Map(yaml_to_map(value, path)?)),
        serde_yaml::Value::Tagged(_) => unreachable!("untagged above"),
    }
}

fn untag(value: &serde_yaml::Value) -> &serde_yaml::Value {
    match value {
        serde_yaml::Value::Tagged(tagged) => untag(&tagged.value),
        other => other,
    }
}

fn json_to_map(value: &serde_json::Value, path: &str) -> Result<NodeMap, DocumentError> {
    let serde_json::Value::Object(obj) = value else {
        return Err(DocumentError::RootNotAMap);
    };
    let mut map = NodeMap::default();
    for (key, v) in obj {
        if key == TYPE_KEY || key == ID_KEY {
            match v {
                serde_json::Value::String(s) => {
                    if key == TYPE_KEY {
                        map.type_hint = Some(s.clone());
                    } else {
                        map.id = Some(s.clone());
                    }
                }
                _ => {
                    return Err(DocumentError::BadReservedKey {
                        path: path.to_string(),
                        key: key.clone(),
                    })
                }
            }
            continue;
        }
        let entry_path = join(path, key);
        let slot = match v {
            serde_json::Value::Null => SlotValues {
                values: Vec::new(),
                was_list: false,
            },
            serde_json::Value::Array(items) => {
                let mut values = Vec::new();
                for (idx, item) in items.iter().enumerate() {
                    let item_path = join(&entry_path, &idx.to_string());
                    values.push(json_to_node(item, &item_path)?);
                }
                SlotValues {
                    values,
                    was_list: true,
                }
            }
            other => SlotValues {
                values: vec![json_to_node(other, &entry_path)?],
                was_list: false,
            },
        };
        map.entries.insert(key.clone(), slot);
    }
    Ok(map)
}

fn json_to_node(value: &serde_json::Value, path: &str) -> Result<Node, DocumentError> {
    match value {
        serde_json::Value::Null => Ok(Node::Scalar(Scalar::Str(String::new()))),
        serde_json::Value::Bool(b) => Ok(Node::Scalar(Scalar::Bool(*b))),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Node::Scalar(Scalar::Int(i)))
            } else {
                Ok(Node::Scalar(Scalar::Float(n.as_f64().unwrap_or(f64::NAN))))
            }
        }
        serde_json::Value::String(s) => Ok(Node::Scalar(Scalar::Str(s.clone()))),
        serde_json::Value::Array(_) => Err(DocumentError::NestedList {
            path: path.to_string(),
        }),
        serde_json::Value::Object(_) => Ok(Node::Map(json_to_map(value, path)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_normalize_to_singleton_lists() {
        let doc = InstanceDocument::parse("title: hello\n", "Dataset", "t").unwrap();
        let slot = &doc.root.entries["title"];
        assert_eq!(slot.values.len(), 1);
        assert!(!slot.was_list);
    }

    #[test]
    fn lists_keep_positions() {
        let doc = InstanceDocument::parse("title:\n  - a\n  - b\n", "Dataset", "t").unwrap();
        let slot = &doc.root.entries["title"];
        assert_eq!(slot.values.len(), 2);
        assert!(slot.was_list);
    }

    #[test]
    fn reserved_keys_are_extracted() {
        let doc = InstanceDocument::parse(
            "\"@type\": Dataset\n\"@id\": https://ex.org/d/1\ntitle: x\n",
            "Dataset",
            "t",
        )
        .unwrap();
        assert_eq!(doc.root.type_hint.as_deref(), Some("Dataset"));
        assert_eq!(doc.root.id.as_deref(), Some("https://ex.org/d/1"));
        assert_eq!(doc.root.entries.len(), 1);
    }

    #[test]
    fn nested_lists_are_rejected() {
        let err = InstanceDocument::parse("xs:\n  - - 1\n", "Dataset", "t").unwrap_err();
        assert!(matches!(err, DocumentError::NestedList { .. }));
    }

    #[test]
    fn null_value_means_absent() {
        let doc = InstanceDocument::parse("title: null\n", "Dataset", "t").unwrap();
        assert!(doc.root.entries["title"].values.is_empty());
    }

    #[test]
    fn json_documents_parse_through_the_same_path() {
        let doc =
            InstanceDocument::parse(r#"{"title": ["a"], "issued": "2024-01-01"}"#, "Dataset", "t")
                .unwrap();
        assert!(doc.root.entries["title"].was_list);
        assert_eq!(doc.root.entries.keys().collect::<Vec<_>>(), vec!["title", "issued"]);
    }

    #[test]
    fn to_json_value_round_trips_shape() {
        let doc = InstanceDocument::parse(
            "\"@type\": Dataset\ntitle: [a, b]\nvalue: 0.5\nflag: true\n",
            "Dataset",
            "t",
        )
        .unwrap();
        let json = doc.root.to_json_value();
        assert_eq!(json["@type"], "Dataset");
        assert_eq!(json["title"][1], "b");
        assert_eq!(json["value"], 0.5);
        assert_eq!(json["flag"], true);
    }
}

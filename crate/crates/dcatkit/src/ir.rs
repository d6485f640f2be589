//! Profile intermediate representation: classes, slots, datatypes, layered
//! merge semantics and inheritance resolution.
//!
//! IR values are immutable after construction and safe to share across
//! threads; every constructor and loader runs the full invariant check.

use crate::iri::is_absolute_iri;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use thiserror::Error;

pub const UNBOUNDED_TOKEN: &str = "*";

/// Upper cardinality bound. `Bounded(n) < Unbounded` for every `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MaxCard {
    Bounded(u32),
    Unbounded,
}

impl MaxCard {
    pub fn allows(&self, count: usize) -> bool {
        match self {
            MaxCard::Bounded(n) => count <= *n as usize,
            MaxCard::Unbounded => true,
        }
    }

    pub fn is_multivalued(&self) -> bool {
        match self {
            MaxCard::Bounded(n) => *n > 1,
            MaxCard::Unbounded => true,
        }
    }
}

impl std::fmt::Display for MaxCard {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MaxCard::Bounded(n) => write!(f, "{n}"),
            MaxCard::Unbounded => write!(f, "{UNBOUNDED_TOKEN}"),
        }
    }
}

impl Serialize for MaxCard {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            MaxCard::Bounded(n) => ser.serialize_u32(*n),
            MaxCard::Unbounded => ser.serialize_str(UNBOUNDED_TOKEN),
        }
    }
}

impl<'de> Deserialize<'de> for MaxCard {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(de)?;
        match value {
            serde_json::Value::Number(n) => n
                .as_u64()
                .and_then(|v| u32::try_from(v).ok())
                .map(MaxCard::Bounded)
                .ok_or_else(|| D::Error::custom("max cardinality out of range")),
            serde_json::Value::String(s) if s == UNBOUNDED_TOKEN => Ok(MaxCard::Unbounded),
            other => Err(D::Error::custom(format!(
                "expected integer or \"{UNBOUNDED_TOKEN}\", got {other}"
            ))),
        }
    }
}

/// Range of a slot: a class, a (possibly built-in) datatype, or a union of
/// classes. Datatype unions are rejected at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "UPPERCASE")]
pub enum RangeSpec {
    Class { name: String },
    Datatype { name: String },
    Union { members: Vec<String> },
}

impl RangeSpec {
    pub fn class(name: impl Into<String>) -> Self {
        RangeSpec::Class { name: name.into() }
    }

    pub fn datatype(name: impl Into<String>) -> Self {
        RangeSpec::Datatype { name: name.into() }
    }

    pub fn union(members: Vec<String>) -> Self {
        RangeSpec::Union { members }
    }

    pub fn is_class_like(&self) -> bool {
        matches!(self, RangeSpec::Class { .. } | RangeSpec::Union { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDef {
    pub name: String,
    pub class_uri: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub parents: Vec<String>,
    #[serde(default)]
    pub mixins: Vec<String>,
    #[serde(default)]
    pub own_slots: Vec<String>,
    #[serde(default)]
    pub is_mixin: bool,
    #[serde(default)]
    pub is_abstract: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotDef {
    pub name: String,
    pub slot_uri: String,
    pub range: RangeSpec,
    #[serde(default)]
    pub min_cardinality: u32,
    pub max_cardinality: MaxCard,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub super_slot: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

impl SlotDef {
    pub fn is_required(&self) -> bool {
        self.min_cardinality >= 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatatypeDef {
    pub name: String,
    /// One of the supported XSD datatype IRIs.
    pub base_uri: String,
    /// Rule id resolved by the lexical-check registry at validation time.
    pub lexical_check: String,
}

/// Built-in datatypes usable as ranges without a `DatatypeDef` entry:
/// (name, XSD IRI, canonical lexical rule).
pub const BUILTIN_DATATYPES: &[(&str, &str, &str)] = &[
    ("string", "http://www.w3.org/2001/XMLSchema#string", "STRING"),
    ("date", "http://www.w3.org/2001/XMLSchema#date", "DATE"),
    (
        "dateTime",
        "http://www.w3.org/2001/XMLSchema#dateTime",
        "DATETIME",
    ),
    (
        "decimal",
        "http://www.w3.org/2001/XMLSchema#decimal",
        "DECIMAL",
    ),
    (
        "integer",
        "http://www.w3.org/2001/XMLSchema#integer",
        "INTEGER",
    ),
    (
        "boolean",
        "http://www.w3.org/2001/XMLSchema#boolean",
        "BOOLEAN",
    ),
    (
        "anyURI",
        "http://www.w3.org/2001/XMLSchema#anyURI",
        "ANYURI",
    ),
    (
        "duration",
        "http://www.w3.org/2001/XMLSchema#duration",
        "DURATION",
    ),
];

pub fn builtin_by_name(name: &str) -> Option<(&'static str, &'static str, &'static str)> {
    BUILTIN_DATATYPES.iter().copied().find(|(n, _, _)| *n == name)
}

pub fn builtin_by_uri(uri: &str) -> Option<(&'static str, &'static str, &'static str)> {
    BUILTIN_DATATYPES.iter().copied().find(|(_, u, _)| *u == uri)
}

/// Canonical lexical rule for a supported XSD base IRI.
pub fn canonical_rule_for(base_uri: &str) -> Option<&'static str> {
    builtin_by_uri(base_uri).map(|(_, _, rule)| rule)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IrError {
    #[error("invalid IRI for {element}: {iri}")]
    InvalidIri { element: String, iri: String },
    #[error("duplicate name across classes/slots/datatypes: {0}")]
    DuplicateName(String),
    #[error("{kind} {name} references unknown {what}: {target}")]
    UnknownReference {
        kind: &'static str,
        name: String,
        what: &'static str,
        target: String,
    },
    #[error("inheritance cycle involving class {0}")]
    ClassCycle(String),
    #[error("super-slot cycle involving slot {0}")]
    SlotCycle(String),
    #[error("profile {0} declares itself as its own base layer")]
    LayerCycle(String),
    #[error("slot {slot}: min cardinality {min} exceeds max {max}")]
    CardinalityOrder { slot: String, min: u32, max: String },
    #[error("slot {slot}: union range must have at least two members")]
    UnionTooSmall { slot: String },
    #[error("slot {slot}: union member {member} is not a class (datatype unions are rejected)")]
    DatatypeUnion { slot: String, member: String },
    #[error("datatype {name}: unsupported base {base_uri}")]
    UnsupportedDatatypeBase { name: String, base_uri: String },
    #[error("slot {sub}: range is not a subtype of super-slot {sup} range")]
    SuperSlotRange { sub: String, sup: String },
    #[error("unknown class: {0}")]
    UnknownClass(String),
    #[error("layer mismatch: extension {extension} declares base {declared}, got {actual}")]
    LayerMismatch {
        extension: String,
        declared: String,
        actual: String,
    },
    #[error("name collision on {name}: {reason}")]
    NameCollision { name: String, reason: String },
}

/// A compiled application profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaIR {
    pub id: String,
    pub version: String,
    #[serde(default)]
    pub prefix_map: BTreeMap<String, String>,
    #[serde(default)]
    pub classes: BTreeMap<String, ClassDef>,
    #[serde(default)]
    pub slots: BTreeMap<String, SlotDef>,
    #[serde(default)]
    pub datatypes: BTreeMap<String, DatatypeDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer_of: Option<String>,
}

impl SchemaIR {
    pub fn new(id: impl Into<String>, version: impl Into<String>) -> Self {
        SchemaIR {
            id: id.into(),
            version: version.into(),
            prefix_map: BTreeMap::new(),
            classes: BTreeMap::new(),
            slots: BTreeMap::new(),
            datatypes: BTreeMap::new(),
            layer_of: None,
        }
    }

    /// Full invariant check. Loaders and constructors must call this before
    /// handing out an IR.
    pub fn validate(&self) -> Result<(), IrError> {
        if self.layer_of.as_deref() == Some(self.id.as_str()) {
            return Err(IrError::LayerCycle(self.id.clone()));
        }

        // Name maps are keyed by name, so uniqueness within one map holds by
        // construction; names must additionally match their key and be
        // disjoint across the three maps.
        let mut all_names: HashSet<&str> = HashSet::new();
        for name in self
            .classes
            .keys()
            .chain(self.slots.keys())
            .chain(self.datatypes.keys())
        {
            if !all_names.insert(name.as_str()) {
                return Err(IrError::DuplicateName(name.clone()));
            }
        }
        for (key, c) in &self.classes {
            if key != &c.name {
                return Err(IrError::DuplicateName(c.name.clone()));
            }
            if !is_absolute_iri(&c.class_uri) {
                return Err(IrError::InvalidIri {
                    element: format!("class {}", c.name),
                    iri: c.class_uri.clone(),
                });
            }
            for parent in c.parents.iter().chain(c.mixins.iter()) {
                if !self.classes.contains_key(parent) {
                    return Err(IrError::UnknownReference {
                        kind: "class",
                        name: c.name.clone(),
                        what: "parent/mixin",
                        target: parent.clone(),
                    });
                }
            }
            for slot in &c.own_slots {
                if !self.slots.contains_key(slot) {
                    return Err(IrError::UnknownReference {
                        kind: "class",
                        name: c.name.clone(),
                        what: "slot",
                        target: slot.clone(),
                    });
                }
            }
        }
        for (key, s) in &self.slots {
            if key != &s.name {
                return Err(IrError::DuplicateName(s.name.clone()));
            }
            if !is_absolute_iri(&s.slot_uri) {
                return Err(IrError::InvalidIri {
                    element: format!("slot {}", s.name),
                    iri: s.slot_uri.clone(),
                });
            }
            if let MaxCard::Bounded(max) = s.max_cardinality {
                if s.min_cardinality > max {
                    return Err(IrError::CardinalityOrder {
                        slot: s.name.clone(),
                        min: s.min_cardinality,
                        max: max.to_string(),
                    });
                }
            }
            self.validate_range(&s.name, &s.range)?;
            if let Some(sup) = &s.super_slot {
                if !self.slots.contains_key(sup) {
                    return Err(IrError::UnknownReference {
                        kind: "slot",
                        name: s.name.clone(),
                        what: "super_slot",
                        target: sup.clone(),
                    });
                }
            }
        }
        for (key, d) in &self.datatypes {
            if key != &d.name {
                return Err(IrError::DuplicateName(d.name.clone()));
            }
            if builtin_by_uri(&d.base_uri).is_none() {
                return Err(IrError::UnsupportedDatatypeBase {
                    name: d.name.clone(),
                    base_uri: d.base_uri.clone(),
                });
            }
        }

        self.check_class_acyclicity()?;
        self.check_super_slot_chains()?;
        Ok(())
    }

    fn validate_range(&self, slot: &str, range: &RangeSpec) -> Result<(), IrError> {
        match range {
            RangeSpec::Class { name } => {
                if !self.classes.contains_key(name) {
                    return Err(IrError::UnknownReference {
                        kind: "slot",
                        name: slot.to_string(),
                        what: "range class",
                        target: name.clone(),
                    });
                }
            }
            RangeSpec::Datatype { name } => {
                if !self.datatypes.contains_key(name) && builtin_by_name(name).is_none() {
                    return Err(IrError::UnknownReference {
                        kind: "slot",
                        name: slot.to_string(),
                        what: "range datatype",
                        target: name.clone(),
                    });
                }
            }
            RangeSpec::Union { members } => {
                if members.len() < 2 {
                    return Err(IrError::UnionTooSmall {
                        slot: slot.to_string(),
                    });
                }
                for member in members {
                    if !self.classes.contains_key(member) {
                        return Err(IrError::DatatypeUnion {
                            slot: slot.to_string(),
                            member: member.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_class_acyclicity(&self) -> Result<(), IrError> {
        // Three-color DFS over the combined parent + mixin graph.
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            White,
            Gray,
            Black,
        }
        let mut marks: HashMap<&str, Mark> =
            self.classes.keys().map(|k| (k.as_str(), Mark::White)).collect();

        fn visit<'a>(
            ir: &'a SchemaIR,
            name: &'a str,
            marks: &mut HashMap<&'a str, Mark>,
        ) -> Result<(), IrError> {
            match marks.get(name) {
                Some(Mark::Black) => return Ok(()),
                Some(Mark::Gray) => return Err(IrError::ClassCycle(name.to_string())),
                _ => {}
            }
            marks.insert(name, Mark::Gray);
            if let Some(c) = ir.classes.get(name) {
                for next in c.parents.iter().chain(c.mixins.iter()) {
                    visit(ir, next, marks)?;
                }
            }
            marks.insert(name, Mark::Black);
            Ok(())
        }

        let names: Vec<&str> = self.classes.keys().map(|k| k.as_str()).collect();
        for name in names {
            visit(self, name, &mut marks)?;
        }
        Ok(())
    }

    fn check_super_slot_chains(&self) -> Result<(), IrError> {
        for (name, slot) in &self.slots {
            let mut visited = HashSet::new();
            visited.insert(name.as_str());
            let mut current = slot;
            while let Some(sup_name) = &current.super_slot {
                if !visited.insert(sup_name.as_str()) {
                    return Err(IrError::SlotCycle(name.clone()));
                }
                let sup = self
                    .slots
                    .get(sup_name)
                    .ok_or_else(|| IrError::UnknownReference {
                        kind: "slot",
                        name: name.clone(),
                        what: "super_slot",
                        target: sup_name.clone(),
                    })?;
                if !self.range_is_subtype(&current.range, &sup.range) {
                    return Err(IrError::SuperSlotRange {
                        sub: current.name.clone(),
                        sup: sup.name.clone(),
                    });
                }
                current = sup;
            }
        }
        Ok(())
    }

    /// `sub` may be used where `super` is expected: subsumed class, subset
    /// union, or identical datatype.
    pub fn range_is_subtype(&self, sub: &RangeSpec, sup: &RangeSpec) -> bool {
        let covered = |member: &str, sup: &RangeSpec| -> bool {
            match sup {
                RangeSpec::Class { name } => self.subsumes_unchecked(name, member),
                RangeSpec::Union { members } => members
                    .iter()
                    .any(|candidate| self.subsumes_unchecked(candidate, member)),
                RangeSpec::Datatype { .. } => false,
            }
        };
        match (sub, sup) {
            (RangeSpec::Datatype { name: a }, RangeSpec::Datatype { name: b }) => {
                a == b || self.same_datatype(a, b)
            }
            (RangeSpec::Class { name }, _) => covered(name, sup),
            (RangeSpec::Union { members }, _) => members.iter().all(|m| covered(m, sup)),
            _ => false,
        }
    }

    fn same_datatype(&self, a: &str, b: &str) -> bool {
        let resolve = |n: &str| -> Option<(String, String)> {
            if let Some(d) = self.datatypes.get(n) {
                Some((d.base_uri.clone(), d.lexical_check.clone()))
            } else {
                builtin_by_name(n).map(|(_, uri, rule)| (uri.to_string(), rule.to_string()))
            }
        };
        match (resolve(a), resolve(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    /// Reflexive-transitive subsumption over parents and mixins.
    pub fn subsumes(&self, ancestor: &str, descendant: &str) -> Result<bool, IrError> {
        if !self.classes.contains_key(ancestor) {
            return Err(IrError::UnknownClass(ancestor.to_string()));
        }
        if !self.classes.contains_key(descendant) {
            return Err(IrError::UnknownClass(descendant.to_string()));
        }
        Ok(self.subsumes_unchecked(ancestor, descendant))
    }

    fn subsumes_unchecked(&self, ancestor: &str, descendant: &str) -> bool {
        if ancestor == descendant {
            return true;
        }
        let mut stack = vec![descendant];
        let mut seen: HashSet<&str> = HashSet::new();
        while let Some(current) = stack.pop() {
            if !seen.insert(current) {
                continue;
            }
            if let Some(c) = self.classes.get(current) {
                for next in c.parents.iter().chain(c.mixins.iter()) {
                    if next == ancestor {
                        return true;
                    }
                    stack.push(next);
                }
            }
        }
        false
    }

    /// All class names subsumed by `ancestor` (including itself), sorted.
    pub fn descendants(&self, ancestor: &str) -> Result<Vec<String>, IrError> {
        if !self.classes.contains_key(ancestor) {
            return Err(IrError::UnknownClass(ancestor.to_string()));
        }
        let mut out: Vec<String> = self
            .classes
            .keys()
            .filter(|c| self.subsumes_unchecked(ancestor, c))
            .cloned()
            .collect();
        out.sort();
        Ok(out)
    }

    /// Own slots in declaration order, then inherited slots depth-first in
    /// parent (then mixin) declaration order; nearest definition wins on
    /// name collisions.
    pub fn effective_slots(&self, class_name: &str) -> Result<Vec<(String, &SlotDef)>, IrError> {
        if !self.classes.contains_key(class_name) {
            return Err(IrError::UnknownClass(class_name.to_string()));
        }
        let mut ordered: Vec<String> = Vec::new();
        let mut seen: HashSet<String> = HashSet::new();
        let mut visited_classes: HashSet<&str> = HashSet::new();
        self.collect_slots(class_name, &mut ordered, &mut seen, &mut visited_classes);
        Ok(ordered
            .into_iter()
            .map(|name| {
                let def = &self.slots[&name];
                (name, def)
            })
            .collect())
    }

    fn collect_slots<'a>(
        &'a self,
        class_name: &'a str,
        ordered: &mut Vec<String>,
        seen: &mut HashSet<String>,
        visited: &mut HashSet<&'a str>,
    ) {
        if !visited.insert(class_name) {
            return;
        }
        let Some(class) = self.classes.get(class_name) else {
            return;
        };
        for slot in &class.own_slots {
            if seen.insert(slot.clone()) {
                ordered.push(slot.clone());
            }
        }
        for parent in class.parents.iter().chain(class.mixins.iter()) {
            self.collect_slots(parent, ordered, seen, visited);
        }
    }

    /// Effective datatype of a datatype-kind range: `(base_uri, rule)`.
    pub fn resolve_datatype(&self, name: &str) -> Option<(String, String)> {
        if let Some(d) = self.datatypes.get(name) {
            return Some((d.base_uri.clone(), d.lexical_check.clone()));
        }
        builtin_by_name(name).map(|(_, uri, rule)| (uri.to_string(), rule.to_string()))
    }

    /// First class whose `class_uri` equals `uri`, in sorted-name order.
    pub fn class_by_uri(&self, uri: &str) -> Option<&ClassDef> {
        self.classes.values().find(|c| c.class_uri == uri)
    }

    /// Canonical serialization: sorted-key pretty JSON, LF newlines, UTF-8.
    pub fn to_canonical_json(&self) -> String {
        // Round-tripping through Value sorts every object key.
        let value = serde_json::to_value(self).expect("IR serialization cannot fail");
        let mut out = serde_json::to_string_pretty(&value).expect("JSON rendering cannot fail");
        out.push('\n');
        out
    }

    /// Parse and invariant-check a canonical `.profile.json` document.
    pub fn from_json(bytes: &[u8]) -> Result<SchemaIR, ProfileLoadError> {
        let ir: SchemaIR = serde_json::from_slice(bytes)?;
        ir.validate()?;
        Ok(ir)
    }
}

#[derive(Debug, Error)]
pub enum ProfileLoadError {
    #[error("malformed profile JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("profile violates IR invariants: {0}")]
    Invalid(#[from] IrError),
}

/// Merge an extension IR onto its declared base layer.
///
/// The extension may add classes, slots and datatypes, attach slots to
/// existing classes (by redeclaring the class with a larger `own_slots`
/// set), and narrow cardinalities or ranges of existing slots. Anything
/// else is a name collision.
pub fn merge_layers(base: &SchemaIR, extension: &SchemaIR) -> Result<SchemaIR, IrError> {
    if extension.layer_of.as_deref() != Some(base.id.as_str()) {
        return Err(IrError::LayerMismatch {
            extension: extension.id.clone(),
            declared: extension.layer_of.clone().unwrap_or_default(),
            actual: base.id.clone(),
        });
    }
    base.validate()?;
    extension.validate()?;

    let mut merged = SchemaIR::new(extension.id.clone(), extension.version.clone());
    merged.layer_of = Some(base.id.clone());
    merged.prefix_map = base.prefix_map.clone();
    for (k, v) in &extension.prefix_map {
        merged.prefix_map.insert(k.clone(), v.clone());
    }

    merged.classes = base.classes.clone();
    for (name, ext_class) in &extension.classes {
        match base.classes.get(name) {
            None => {
                merged.classes.insert(name.clone(), ext_class.clone());
            }
            Some(base_class) => {
                let combined = merge_class(base_class, ext_class)?;
                merged.classes.insert(name.clone(), combined);
            }
        }
    }

    merged.slots = base.slots.clone();
    for (name, ext_slot) in &extension.slots {
        match base.slots.get(name) {
            None => {
                merged.slots.insert(name.clone(), ext_slot.clone());
            }
            Some(base_slot) => {
                let combined = merge_slot(base, base_slot, ext_slot)?;
                merged.slots.insert(name.clone(), combined);
            }
        }
    }

    merged.datatypes = base.datatypes.clone();
    for (name, ext_dt) in &extension.datatypes {
        match base.datatypes.get(name) {
            None => {
                merged.datatypes.insert(name.clone(), ext_dt.clone());
            }
            Some(base_dt) if base_dt == ext_dt => {}
            Some(_) => {
                return Err(IrError::NameCollision {
                    name: name.clone(),
                    reason: "datatype redefined with different content".to_string(),
                });
            }
        }
    }

    merged.validate()?;
    Ok(merged)
}

fn merge_class(base: &ClassDef, ext: &ClassDef) -> Result<ClassDef, IrError> {
    if base.class_uri != ext.class_uri {
        return Err(IrError::NameCollision {
            name: base.name.clone(),
            reason: format!(
                "class_uri {} redefined as {}",
                base.class_uri, ext.class_uri
            ),
        });
    }
    if base.is_mixin != ext.is_mixin || base.is_abstract != ext.is_abstract {
        return Err(IrError::NameCollision {
            name: base.name.clone(),
            reason: "mixin/abstract flag changed by extension".to_string(),
        });
    }
    let mut combined = base.clone();
    if ext.description.is_some() {
        combined.description = ext.description.clone();
    }
    for parent in &ext.parents {
        if !combined.parents.contains(parent) {
            combined.parents.push(parent.clone());
        }
    }
    for mixin in &ext.mixins {
        if !combined.mixins.contains(mixin) {
            combined.mixins.push(mixin.clone());
        }
    }
    for slot in &ext.own_slots {
        if !combined.own_slots.contains(slot) {
            combined.own_slots.push(slot.clone());
        }
    }
    Ok(combined)
}

fn merge_slot(base_ir: &SchemaIR, base: &SlotDef, ext: &SlotDef) -> Result<SlotDef, IrError> {
    if base.slot_uri != ext.slot_uri {
        return Err(IrError::NameCollision {
            name: base.name.clone(),
            reason: format!("slot_uri {} redefined as {}", base.slot_uri, ext.slot_uri),
        });
    }
    if base.super_slot != ext.super_slot {
        return Err(IrError::NameCollision {
            name: base.name.clone(),
            reason: "super_slot changed by extension".to_string(),
        });
    }
    if ext.range != base.range && !base_ir.range_is_subtype(&ext.range, &base.range) {
        return Err(IrError::NameCollision {
            name: base.name.clone(),
            reason: "range broadened or replaced with unrelated type".to_string(),
        });
    }
    if ext.min_cardinality < base.min_cardinality || ext.max_cardinality > base.max_cardinality {
        return Err(IrError::NameCollision {
            name: base.name.clone(),
            reason: format!(
                "cardinality {}..{} broadens {}..{}",
                ext.min_cardinality, ext.max_cardinality, base.min_cardinality, base.max_cardinality
            ),
        });
    }
    let mut combined = ext.clone();
    if combined.description.is_none() {
        combined.description = base.description.clone();
    }
    Ok(combined)
}

/// Names reachable as classes from validation's point of view, split out for
/// reuse by generators: concrete = neither mixin nor abstract.
pub fn concrete_descendants(ir: &SchemaIR, ancestor: &str) -> Result<Vec<String>, IrError> {
    Ok(ir
        .descendants(ancestor)?
        .into_iter()
        .filter(|name| {
            let c = &ir.classes[name];
            !c.is_mixin && !c.is_abstract
        })
        .collect())
}

/// Deduplicated, sorted set of slot URIs along the super-slot chain of
/// `slot`, excluding the slot's own URI.
pub fn super_slot_uri_chain(ir: &SchemaIR, slot: &SlotDef) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut current = slot;
    while let Some(sup_name) = &current.super_slot {
        let Some(sup) = ir.slots.get(sup_name) else {
            break;
        };
        if sup.slot_uri != slot.slot_uri && seen.insert(sup.slot_uri.clone()) {
            out.push(sup.slot_uri.clone());
        }
        current = sup;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(name: &str, uri: &str) -> ClassDef {
        ClassDef {
            name: name.to_string(),
            class_uri: uri.to_string(),
            description: None,
            parents: vec![],
            mixins: vec![],
            own_slots: vec![],
            is_mixin: false,
            is_abstract: false,
        }
    }

    fn slot(name: &str, uri: &str, range: RangeSpec) -> SlotDef {
        SlotDef {
            name: name.to_string(),
            slot_uri: uri.to_string(),
            range,
            min_cardinality: 0,
            max_cardinality: MaxCard::Unbounded,
            super_slot: None,
            description: None,
        }
    }

    fn tiny_ir() -> SchemaIR {
        let mut ir = SchemaIR::new("tiny", "1.0.0");
        let mut a = class("A", "http://example.org/ns#A");
        let mut b = class("B", "http://example.org/ns#B");
        b.parents.push("A".to_string());
        let mut m = class("M", "http://example.org/ns#M");
        m.is_mixin = true;
        m.own_slots.push("tag".to_string());
        b.mixins.push("M".to_string());
        a.own_slots.push("label".to_string());
        ir.classes.insert("A".into(), a);
        ir.classes.insert("B".into(), b);
        ir.classes.insert("M".into(), m);
        ir.slots.insert(
            "label".into(),
            slot("label", "http://example.org/ns#label", RangeSpec::datatype("string")),
        );
        ir.slots.insert(
            "tag".into(),
            slot("tag", "http://example.org/ns#tag", RangeSpec::datatype("anyURI")),
        );
        ir
    }

    #[test]
    fn tiny_ir_validates() {
        tiny_ir().validate().unwrap();
    }

    #[test]
    fn subsumes_is_reflexive_and_follows_parents() {
        let ir = tiny_ir();
        assert!(ir.subsumes("A", "A").unwrap());
        assert!(ir.subsumes("A", "B").unwrap());
        assert!(!ir.subsumes("B", "A").unwrap());
        assert!(ir.subsumes("M", "B").unwrap());
        assert_eq!(
            ir.subsumes("A", "nope").unwrap_err(),
            IrError::UnknownClass("nope".to_string())
        );
    }

    #[test]
    fn effective_slots_inherits_through_parents_and_mixins() {
        let ir = tiny_ir();
        let names: Vec<String> = ir
            .effective_slots("B")
            .unwrap()
            .into_iter()
            .map(|(n, _)| n)
            .collect();
        assert_eq!(names, vec!["label".to_string(), "tag".to_string()]);
        let a_names: Vec<String> = ir
            .effective_slots("A")
            .unwrap()
            .into_iter()
            .map(|(n, _)| n)
            .collect();
        assert_eq!(a_names, vec!["label".to_string()]);
    }

    #[test]
    fn class_cycles_are_rejected() {
        let mut ir = tiny_ir();
        ir.classes.get_mut("A").unwrap().parents.push("B".to_string());
        assert!(matches!(ir.validate(), Err(IrError::ClassCycle(_))));
    }

    #[test]
    fn name_disjointness_is_enforced() {
        let mut ir = tiny_ir();
        ir.datatypes.insert(
            "label".into(),
            DatatypeDef {
                name: "label".into(),
                base_uri: "http://www.w3.org/2001/XMLSchema#string".into(),
                lexical_check: "STRING".into(),
            },
        );
        assert!(matches!(ir.validate(), Err(IrError::DuplicateName(_))));
    }

    #[test]
    fn datatype_unions_are_rejected() {
        let mut ir = tiny_ir();
        ir.slots.insert(
            "bad".into(),
            slot(
                "bad",
                "http://example.org/ns#bad",
                RangeSpec::union(vec!["A".to_string(), "string".to_string()]),
            ),
        );
        ir.classes.get_mut("A").unwrap().own_slots.push("bad".into());
        assert!(matches!(ir.validate(), Err(IrError::DatatypeUnion { .. })));
    }

    #[test]
    fn max_card_orders_and_serializes() {
        assert!(MaxCard::Bounded(5) < MaxCard::Unbounded);
        assert!(MaxCard::Bounded(1) < MaxCard::Bounded(2));
        assert_eq!(serde_json::to_string(&MaxCard::Unbounded).unwrap(), "\"*\"");
        assert_eq!(serde_json::to_string(&MaxCard::Bounded(3)).unwrap(), "3");
        let parsed: MaxCard = serde_json::from_str("\"*\"").unwrap();
        assert_eq!(parsed, MaxCard::Unbounded);
    }

    #[test]
    fn merge_rejects_layer_mismatch_and_broadening() {
        let base = tiny_ir();
        let mut ext = SchemaIR::new("ext", "1.0.0");
        ext.layer_of = Some("other".to_string());
        assert!(matches!(
            merge_layers(&base, &ext),
            Err(IrError::LayerMismatch { .. })
        ));

        let mut ext = SchemaIR::new("ext", "1.0.0");
        ext.layer_of = Some("tiny".to_string());
        let mut broad = slot(
            "label",
            "http://example.org/ns#label",
            RangeSpec::datatype("string"),
        );
        broad.min_cardinality = 0;
        broad.max_cardinality = MaxCard::Unbounded;
        // Same content is fine...
        ext.slots.insert("label".into(), broad.clone());
        assert!(merge_layers(&base, &ext).is_ok());
        // ...but a different slot_uri is a collision.
        let mut ext2 = SchemaIR::new("ext", "1.0.0");
        ext2.layer_of = Some("tiny".to_string());
        broad.slot_uri = "http://example.org/ns#other".to_string();
        ext2.slots.insert("label".into(), broad);
        assert!(matches!(
            merge_layers(&base, &ext2),
            Err(IrError::NameCollision { .. })
        ));
    }

    #[test]
    fn merge_narrows_cardinality_but_not_broader() {
        let mut base = tiny_ir();
        base.slots.get_mut("label").unwrap().min_cardinality = 1;
        base.slots.get_mut("label").unwrap().max_cardinality = MaxCard::Bounded(2);

        let mut narrow = base.slots["label"].clone();
        narrow.max_cardinality = MaxCard::Bounded(1);
        let mut ext = SchemaIR::new("ext", "1.0.0");
        ext.layer_of = Some("tiny".to_string());
        ext.slots.insert("label".into(), narrow);
        let merged = merge_layers(&base, &ext).unwrap();
        assert_eq!(merged.slots["label"].max_cardinality, MaxCard::Bounded(1));

        let mut broad = base.slots["label"].clone();
        broad.min_cardinality = 0;
        let mut ext = SchemaIR::new("ext", "1.0.0");
        ext.layer_of = Some("tiny".to_string());
        ext.slots.insert("label".into(), broad);
        assert!(matches!(
            merge_layers(&base, &ext),
            Err(IrError::NameCollision { .. })
        ));
    }

    #[test]
    fn canonical_json_is_deterministic_and_round_trips() {
        let ir = tiny_ir();
        let a = ir.to_canonical_json();
        let b = ir.to_canonical_json();
        assert_eq!(a, b);
        let reloaded = SchemaIR::from_json(a.as_bytes()).unwrap();
        assert_eq!(reloaded, ir);
        assert_eq!(reloaded.to_canonical_json(), a);
    }
}

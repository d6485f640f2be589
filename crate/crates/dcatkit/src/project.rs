//! Rewrite extension-profile documents so a base-profile consumer can
//! interpret them: extension-only slot keys are renamed to their nearest
//! super-slot available on the projected class, keys with no base ancestor
//! are dropped, and `@type` claims naming extension-only classes are
//! rewritten to their nearest base ancestor.

use crate::instance::{InstanceDocument, Node, NodeMap, SlotValues};
use crate::ir::{RangeSpec, SchemaIR};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProjectError {
    #[error("profile {ext} is not an extension of {base}")]
    NotAnExtension { ext: String, base: String },
    #[error("root class {0} has no ancestor in the base profile")]
    UnprojectableRoot(String),
    #[error("unknown class in document: {0}")]
    UnknownClass(String),
}

pub fn project_to_base(
    doc: &InstanceDocument,
    ext_ir: &SchemaIR,
    base_ir: &SchemaIR,
) -> Result<InstanceDocument, ProjectError> {
    if ext_ir.layer_of.as_deref() != Some(base_ir.id.as_str()) {
        return Err(ProjectError::NotAnExtension {
            ext: ext_ir.id.clone(),
            base: base_ir.id.clone(),
        });
    }
    let cx = Projector { ext_ir, base_ir };
    let root_class = cx
        .nearest_base_class(&doc.root_class)
        .ok_or_else(|| ProjectError::UnprojectableRoot(doc.root_class.clone()))?;
    let ext_root_class = match &doc.root.type_hint {
        Some(t) => t.clone(),
        None => doc.root_class.clone(),
    };
    let root = cx
        .project_node(&doc.root, &ext_root_class)
        .ok_or_else(|| ProjectError::UnknownClass(ext_root_class.clone()))?;
    Ok(InstanceDocument {
        root_class,
        root,
        source_name: doc.source_name.clone(),
    })
}

struct Projector<'a> {
    ext_ir: &'a SchemaIR,
    base_ir: &'a SchemaIR,
}

impl<'a> Projector<'a> {
    /// Nearest ancestor (breadth-first over parents, then mixins) whose name
    /// exists in the base profile.
    fn nearest_base_class(&self, class: &str) -> Option<String> {
        let mut queue = std::collections::VecDeque::new();
        let mut seen = HashSet::new();
        queue.push_back(class.to_string());
        while let Some(current) = queue.pop_front() {
            if !seen.insert(current.clone()) {
                continue;
            }
            if self.base_ir.classes.contains_key(&current) {
                return Some(current);
            }
            if let Some(def) = self.ext_ir.classes.get(&current) {
                for next in def.parents.iter().chain(def.mixins.iter()) {
                    queue.push_back(next.clone());
                }
            }
        }
        None
    }

    /// Slot key usable on `base_class` in the base profile: the key itself
    /// or the nearest super-slot that is effective there.
    fn project_key(&self, key: &str, base_class: &str) -> Option<String> {
        let base_effective: HashSet<String> = self
            .base_ir
            .effective_slots(base_class)
            .unwrap_or_default()
            .into_iter()
            .map(|(n, _)| n)
            .collect();
        if base_effective.contains(key) {
            return Some(key.to_string());
        }
        let mut current = self.ext_ir.slots.get(key)?;
        let mut guard = HashSet::new();
        while let Some(sup) = &current.super_slot {
            if !guard.insert(sup.clone()) {
                break;
            }
            if base_effective.contains(sup) {
                return Some(sup.clone());
            }
            current = self.ext_ir.slots.get(sup)?;
        }
        None
    }

    /// Project a node known (in the extension profile) to be of `ext_class`.
    /// Returns `None` if the class cannot be projected at all.
    fn project_node(&self, map: &NodeMap, ext_class: &str) -> Option<NodeMap> {
        let base_class = self.nearest_base_class(ext_class)?;
        let mut out = NodeMap {
            type_hint: map
                .type_hint
                .as_ref()
                .map(|_| base_class.clone()),
            id: map.id.clone(),
            entries: Default::default(),
        };

        for (key, slot_values) in &map.entries {
            let Some(target_key) = self.project_key(key, &base_class) else {
                continue;
            };
            let ext_slot = self.ext_ir.slots.get(key)?;
            let base_slot = self.base_ir.slots.get(&target_key);
            let mut projected_values = Vec::new();
            for value in &slot_values.values {
                match value {
                    Node::Scalar(s) => projected_values.push(Node::Scalar(s.clone())),
                    Node::Map(child) => {
                        let child_ext_class = match &child.type_hint {
                            Some(t) => t.clone(),
                            None => match single_class(&ext_slot.range) {
                                Some(c) => c,
                                None => continue,
                            },
                        };
                        let Some(mut projected) = self.project_node(child, &child_ext_class)
                        else {
                            continue;
                        };
                        // Make the projected class explicit whenever the
                        // base slot alone would resolve to something else.
                        let projected_class = self
                            .nearest_base_class(&child_ext_class)
                            .expect("projected above");
                        let needs_type = match base_slot.map(|s| &s.range) {
                            Some(RangeSpec::Class { name }) => *name != projected_class,
                            Some(RangeSpec::Union { .. }) => true,
                            _ => false,
                        };
                        if projected.type_hint.is_none() && needs_type {
                            projected.type_hint = Some(projected_class);
                        }
                        projected_values.push(Node::Map(projected));
                    }
                }
            }
            if projected_values.is_empty() && !slot_values.values.is_empty() {
                continue;
            }
            let was_list = slot_values.was_list;
            match out.entries.get_mut(&target_key) {
                Some(existing) => {
                    existing.values.extend(projected_values);
                    existing.was_list = true;
                }
                None => {
                    out.entries.insert(
                        target_key,
                        SlotValues {
                            values: projected_values,
                            was_list,
                        },
                    );
                }
            }
        }
        Some(out)
    }
}

fn single_class(range: &RangeSpec) -> Option<String> {
    match range {
        RangeSpec::Class { name } => Some(name.clone()),
        _ => None,
    }
}

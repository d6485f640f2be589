//! Regenerate SHACL shapes (Turtle) from a compiled profile.
//!
//! Every node and property shape receives an explicit IRI from a
//! [`ShapeIriPolicy`]; no shape is left as a blank node. Classes emit their
//! effective (flattened) slot set, so the output validates instances
//! without inheritance awareness, and recompiling it yields the same
//! class/slot/datatype content.

use super::ArtifactError;
use crate::ir::{canonical_rule_for, MaxCard, RangeSpec, SchemaIR};
use crate::iri::is_absolute_iri;
use crate::rdf::{write_turtle, Term, Triple, TripleSet, RDF_FIRST, RDF_NIL, RDF_REST, RDF_TYPE};
use crate::validate::lexical::pattern_for_rule;
use std::collections::{BTreeMap, HashSet};

const SH: &str = "http://www.w3.org/ns/shacl#";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IriMode {
    Fragment,
    Path,
}

#[derive(Debug, Clone)]
pub struct ShapeIriPolicy {
    pub mode: IriMode,
    pub base: String,
    /// Pattern with `{ClassName}`.
    pub node_template: String,
    /// Pattern with `{ClassName}` and `{slot_name}`.
    pub property_template: String,
}

impl ShapeIriPolicy {
    pub fn fragment(base: impl Into<String>) -> ShapeIriPolicy {
        ShapeIriPolicy {
            mode: IriMode::Fragment,
            base: base.into(),
            node_template: "{ClassName}Shape".to_string(),
            property_template: "{ClassName}-{slot_name}".to_string(),
        }
    }

    /// Default policy for a profile: fragment IRIs under a w3id-style base.
    pub fn default_for(ir: &SchemaIR) -> ShapeIriPolicy {
        ShapeIriPolicy::fragment(format!("https://w3id.org/shapes/{}", ir.id))
    }

    fn separator(&self) -> &'static str {
        match self.mode {
            IriMode::Fragment => "#",
            IriMode::Path => "/",
        }
    }

    pub fn node_iri(&self, class_name: &str) -> String {
        format!(
            "{}{}{}",
            self.base,
            self.separator(),
            self.node_template.replace("{ClassName}", class_name)
        )
    }

    pub fn property_iri(&self, class_name: &str, slot_name: &str) -> String {
        format!(
            "{}{}{}",
            self.base,
            self.separator(),
            self.property_template
                .replace("{ClassName}", class_name)
                .replace("{slot_name}", slot_name)
        )
    }
}

pub fn gen_shacl(ir: &SchemaIR, policy: &ShapeIriPolicy) -> Result<String, ArtifactError> {
    let mut ts = TripleSet::new();
    let mut issued: HashSet<String> = HashSet::new();
    let mut blank_counter = 0usize;

    let issue = |iri: String, issued: &mut HashSet<String>| -> Result<Term, ArtifactError> {
        if !is_absolute_iri(&iri) {
            return Err(ArtifactError::InvalidPolicyIri(iri));
        }
        if !issued.insert(iri.clone()) {
            return Err(ArtifactError::PolicyCollision(iri));
        }
        Ok(Term::Iri(iri))
    };

    for (class_name, class) in &ir.classes {
        let shape = issue(policy.node_iri(class_name), &mut issued)?;
        ts.insert(Triple::new(shape.clone(), RDF_TYPE, sh_term("NodeShape")));
        ts.insert(Triple::new(
            shape.clone(),
            sh("targetClass"),
            Term::iri(class.class_uri.clone()),
        ));
        if let Some(desc) = &class.description {
            ts.insert(Triple::new(shape.clone(), sh("description"), Term::plain(desc.clone())));
        }

        for (slot_name, slot) in ir.effective_slots(class_name)? {
            let ps = issue(policy.property_iri(class_name, &slot_name), &mut issued)?;
            ts.insert(Triple::new(shape.clone(), sh("property"), ps.clone()));
            ts.insert(Triple::new(ps.clone(), RDF_TYPE, sh_term("PropertyShape")));
            ts.insert(Triple::new(
                ps.clone(),
                sh("path"),
                Term::iri(slot.slot_uri.clone()),
            ));
            ts.insert(Triple::new(ps.clone(), sh("name"), Term::plain(slot_name.clone())));
            if let Some(desc) = &slot.description {
                ts.insert(Triple::new(ps.clone(), sh("description"), Term::plain(desc.clone())));
            }
            if slot.min_cardinality > 0 {
                ts.insert(Triple::new(
                    ps.clone(),
                    sh("minCount"),
                    int_literal(slot.min_cardinality),
                ));
            }
            if let MaxCard::Bounded(max) = slot.max_cardinality {
                ts.insert(Triple::new(ps.clone(), sh("maxCount"), int_literal(max)));
            }

            match &slot.range {
                RangeSpec::Class { name } => {
                    ts.insert(Triple::new(
                        ps.clone(),
                        sh("class"),
                        Term::iri(ir.classes[name].class_uri.clone()),
                    ));
                }
                RangeSpec::Union { members } => {
                    let mut branches = Vec::new();
                    for member in members {
                        blank_counter += 1;
                        let branch = Term::blank(format!("g{blank_counter}"));
                        ts.insert(Triple::new(
                            branch.clone(),
                            sh("class"),
                            Term::iri(ir.classes[member].class_uri.clone()),
                        ));
                        branches.push(branch);
                    }
                    let head = build_list(&mut ts, &mut blank_counter, branches);
                    ts.insert(Triple::new(ps.clone(), sh("or"), head));
                }
                RangeSpec::Datatype { name } => {
                    let (base_uri, rule) = ir
                        .resolve_datatype(name)
                        .expect("validated IR resolves all datatypes");
                    ts.insert(Triple::new(
                        ps.clone(),
                        sh("datatype"),
                        Term::iri(base_uri.clone()),
                    ));
                    let canonical = canonical_rule_for(&base_uri);
                    if canonical != Some(rule.as_str()) {
                        if let Some(pattern) = pattern_for_rule(&rule) {
                            ts.insert(Triple::new(
                                ps.clone(),
                                sh("pattern"),
                                Term::plain(pattern),
                            ));
                        }
                    }
                }
            }
        }
    }

    // Datatype definitions carrying the canonical rule for their base are
    // emitted as datatype-targeting node shapes; pattern-backed ones are
    // recovered from the property shapes that use them.
    for (name, dt) in &ir.datatypes {
        if canonical_rule_for(&dt.base_uri) != Some(dt.lexical_check.as_str()) {
            continue;
        }
        let shape = issue(policy.node_iri(name), &mut issued)?;
        ts.insert(Triple::new(shape.clone(), RDF_TYPE, sh_term("NodeShape")));
        ts.insert(Triple::new(
            shape,
            sh("targetClass"),
            Term::iri(dt.base_uri.clone()),
        ));
    }

    let mut prefixes: BTreeMap<String, String> = ir.prefix_map.clone();
    prefixes.entry("sh".to_string()).or_insert_with(|| SH.to_string());
    prefixes
        .entry("rdf".to_string())
        .or_insert_with(|| "http://www.w3.org/1999/02/22-rdf-syntax-ns#".to_string());
    prefixes
        .entry("xsd".to_string())
        .or_insert_with(|| "http://www.w3.org/2001/XMLSchema#".to_string());
    Ok(write_turtle(&ts, &prefixes))
}

fn sh(term: &str) -> String {
    format!("{SH}{term}")
}

fn sh_term(term: &str) -> Term {
    Term::iri(sh(term))
}

fn int_literal(n: u32) -> Term {
    Term::typed(n.to_string(), "http://www.w3.org/2001/XMLSchema#integer")
}

fn build_list(ts: &mut TripleSet, blank_counter: &mut usize, items: Vec<Term>) -> Term {
    let mut head = Term::iri(RDF_NIL);
    for item in items.into_iter().rev() {
        *blank_counter += 1;
        let cell = Term::blank(format!("g{blank_counter}"));
        ts.insert(Triple::new(cell.clone(), RDF_FIRST, item));
        ts.insert(Triple::new(cell.clone(), RDF_REST, head));
        head = cell;
    }
    head
}

//! Convert conformant instance documents into RDF triples using the
//! profile's class and slot URI mappings.

use super::{Term, Triple, TripleSet, RDF_TYPE};
use crate::instance::{InstanceDocument, Node, NodeMap};
use crate::ir::{super_slot_uri_chain, RangeSpec, SchemaIR};
use crate::report::ValidationReport;
use crate::validate::{validate, ValidateError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("document is not conformant; emission refused ({0} error(s))")]
    NotConformant(usize),
    #[error(transparent)]
    Validate(#[from] ValidateError),
}

impl EmitError {
    pub fn report(report: ValidationReport) -> EmitError {
        EmitError::NotConformant(report.error_count())
    }
}

/// Emit triples for a validated document. Each map node becomes a subject
/// (its `@id`, else a fresh `_:b<N>` blank in pre-order); every node gets an
/// `rdf:type` triple for its effective class, and slots with URI `rdf:type`
/// contribute additional type triples verbatim.
pub fn to_triples(doc: &InstanceDocument, ir: &SchemaIR) -> Result<TripleSet, EmitError> {
    let report = validate(doc, ir)?;
    if !report.conformant {
        return Err(EmitError::report(report));
    }
    let mut emitter = Emitter {
        ir,
        ts: TripleSet::new(),
        blank_counter: 0,
    };
    emitter.emit_node(&doc.root, &doc.root_class);
    Ok(emitter.ts)
}

struct Emitter<'ir> {
    ir: &'ir SchemaIR,
    ts: TripleSet,
    blank_counter: usize,
}

impl<'ir> Emitter<'ir> {
    fn emit_node(&mut self, map: &NodeMap, declared_class: &str) -> Term {
        let subject = match &map.id {
            Some(id) => Term::iri(id.clone()),
            None => {
                let label = format!("b{}", self.blank_counter);
                self.blank_counter += 1;
                Term::blank(label)
            }
        };
        let class_name = map.type_hint.as_deref().unwrap_or(declared_class);
        let class_uri = &self.ir.classes[class_name].class_uri;
        self.ts.insert(Triple::new(
            subject.clone(),
            RDF_TYPE,
            Term::iri(class_uri.clone()),
        ));

        for (key, slot_values) in &map.entries {
            let slot = &self.ir.slots[key];
            for value in &slot_values.values {
                match value {
                    Node::Scalar(scalar) => {
                        let object = if slot.slot_uri == RDF_TYPE {
                            // rdf_type annotations are IRIs, emitted verbatim.
                            Term::iri(scalar.lexical())
                        } else {
                            let (base_uri, _) = match &slot.range {
                                RangeSpec::Datatype { name } => self
                                    .ir
                                    .resolve_datatype(name)
                                    .expect("validated IR resolves all datatypes"),
                                _ => unreachable!("scalar under class range fails validation"),
                            };
                            if base_uri == super::XSD_STRING {
                                Term::plain(scalar.lexical())
                            } else {
                                Term::typed(scalar.lexical(), base_uri)
                            }
                        };
                        self.ts.insert(Triple::new(
                            subject.clone(),
                            slot.slot_uri.clone(),
                            object,
                        ));
                    }
                    Node::Map(child) => {
                        let child_declared = match &slot.range {
                            RangeSpec::Class { name } => name.clone(),
                            RangeSpec::Union { .. } => child
                                .type_hint
                                .clone()
                                .expect("validated union values carry @type"),
                            RangeSpec::Datatype { .. } => {
                                unreachable!("map under datatype range fails validation")
                            }
                        };
                        let child_subject = self.emit_node(child, &child_declared);
                        self.ts.insert(Triple::new(
                            subject.clone(),
                            slot.slot_uri.clone(),
                            child_subject,
                        ));
                    }
                }
            }
        }
        subject
    }
}

/// Add, for every triple whose predicate is a sub-slot's URI, the triples
/// along its super-slot chain up to the base layer. Off by default in the
/// CLI; enabled by flag.
pub fn materialize_super_properties(ts: &TripleSet, ir: &SchemaIR) -> TripleSet {
    let mut out = TripleSet::new();
    for triple in ts.iter() {
        out.insert(triple.clone());
        let mut chain_uris: Vec<String> = Vec::new();
        for slot in ir.slots.values() {
            if slot.slot_uri == triple.predicate {
                for uri in super_slot_uri_chain(ir, slot) {
                    if !chain_uris.contains(&uri) {
                        chain_uris.push(uri);
                    }
                }
            }
        }
        chain_uris.sort();
        for uri in chain_uris {
            out.insert(Triple::new(
                triple.subject.clone(),
                uri,
                triple.object.clone(),
            ));
        }
    }
    out.base_iri = ts.base_iri.clone();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::InstanceDocument;
    use crate::ir::{ClassDef, MaxCard, SlotDef};

    fn small_ir() -> SchemaIR {
        let mut ir = SchemaIR::new("t", "1.0.0");
        ir.classes.insert(
            "Thing".into(),
            ClassDef {
                name: "Thing".into(),
                class_uri: "http://ex/Thing".into(),
                description: None,
                parents: vec![],
                mixins: vec![],
                own_slots: vec!["label".into(), "extra_type".into(), "part".into()],
                is_mixin: false,
                is_abstract: false,
            },
        );
        ir.slots.insert(
            "label".into(),
            SlotDef {
                name: "label".into(),
                slot_uri: "http://ex/label".into(),
                range: RangeSpec::datatype("string"),
                min_cardinality: 0,
                max_cardinality: MaxCard::Unbounded,
                super_slot: None,
                description: None,
            },
        );
        ir.slots.insert(
            "extra_type".into(),
            SlotDef {
                name: "extra_type".into(),
                slot_uri: RDF_TYPE.into(),
                range: RangeSpec::datatype("anyURI"),
                min_cardinality: 0,
                max_cardinality: MaxCard::Unbounded,
                super_slot: None,
                description: None,
            },
        );
        ir.slots.insert(
            "part".into(),
            SlotDef {
                name: "part".into(),
                slot_uri: "http://ex/part".into(),
                range: RangeSpec::class("Thing"),
                min_cardinality: 0,
                max_cardinality: MaxCard::Unbounded,
                super_slot: None,
                description: None,
            },
        );
        ir.validate().unwrap();
        ir
    }

    #[test]
    fn rdf_type_slot_values_emit_additional_type_triples() {
        let ir = small_ir();
        let doc = InstanceDocument::parse(
            "label: x\nextra_type: http://ex/OtherType\n",
            "Thing",
            "t",
        )
        .unwrap();
        let ts = to_triples(&doc, &ir).unwrap();
        let subject = Term::blank("b0");
        let types = ts.objects(&subject, RDF_TYPE);
        assert_eq!(types.len(), 2);
    }

    #[test]
    fn empty_document_emits_exactly_one_type_triple() {
        let ir = small_ir();
        let doc = InstanceDocument::parse("{}", "Thing", "t").unwrap();
        let ts = to_triples(&doc, &ir).unwrap();
        assert_eq!(ts.len(), 1);
    }

    #[test]
    fn non_conformant_input_is_refused() {
        let ir = small_ir();
        let doc = InstanceDocument::parse("nope: 1\n", "Thing", "t").unwrap();
        assert!(matches!(
            to_triples(&doc, &ir),
            Err(EmitError::NotConformant(1))
        ));
    }

    #[test]
    fn blank_labels_follow_preorder() {
        let ir = small_ir();
        let doc = InstanceDocument::parse(
            "part:\n  - label: child-a\n  - label: child-b\n",
            "Thing",
            "t",
        )
        .unwrap();
        let ts = to_triples(&doc, &ir).unwrap();
        let root = Term::blank("b0");
        let parts = ts.objects(&root, "http://ex/part");
        assert_eq!(parts, vec![&Term::blank("b1"), &Term::blank("b2")]);
    }
}

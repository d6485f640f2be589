//! Build a [`ShapeGraph`] from parsed RDF triples (Turtle form of a shapes
//! document), mirroring what the JSON-LD reader produces. This is the read
//! half of the SHACL round trip.

use super::{NodeShape, OrBranch, PropertyShape, ShapeGraph};
use crate::iri::SHACL_NS;
use crate::rdf::{Term, TripleSet, RDF_FIRST, RDF_NIL, RDF_REST, RDF_TYPE};
use std::collections::BTreeMap;

const KNOWN_NODE_PREDICATES: &[&str] = &["targetClass", "property", "description", "name"];
const KNOWN_PROPERTY_PREDICATES: &[&str] = &[
    "path",
    "name",
    "description",
    "minCount",
    "maxCount",
    "class",
    "datatype",
    "nodeKind",
    "or",
    "pattern",
];

pub fn shapes_from_triples(ts: &TripleSet, prefixes: &BTreeMap<String, String>) -> ShapeGraph {
    let mut graph = ShapeGraph {
        prefix_map: prefixes.clone(),
        node_shapes: Vec::new(),
        parse_warnings: Vec::new(),
    };

    let node_shape_type = format!("{SHACL_NS}NodeShape");
    for subject in ts.subjects_of_type(&node_shape_type) {
        let id = term_id(subject);
        let mut shape = NodeShape {
            id: id.clone(),
            target_class: first_iri(ts, subject, "targetClass"),
            property_shapes: Vec::new(),
            description: first_literal(ts, subject, "description"),
        };
        warn_unknown(ts, subject, KNOWN_NODE_PREDICATES, &mut graph.parse_warnings);

        for prop in ts.objects(subject, &sh("property")) {
            let ps = read_property_shape(ts, prop, &mut graph.parse_warnings);
            shape.property_shapes.push(ps);
        }
        graph.node_shapes.push(shape);
    }
    graph
}

fn sh(term: &str) -> String {
    format!("{SHACL_NS}{term}")
}

fn term_id(t: &Term) -> String {
    match t {
        Term::Iri(iri) => iri.clone(),
        Term::Blank(label) => format!("_:{label}"),
        Term::Literal { lexical, .. } => lexical.clone(),
    }
}

fn first_iri(ts: &TripleSet, subject: &Term, term: &str) -> Option<String> {
    ts.objects(subject, &sh(term))
        .into_iter()
        .find_map(|o| o.as_iri().map(str::to_string))
}

fn first_literal(ts: &TripleSet, subject: &Term, term: &str) -> Option<String> {
    ts.objects(subject, &sh(term))
        .into_iter()
        .find_map(|o| o.as_literal().map(str::to_string))
}

fn first_u32(ts: &TripleSet, subject: &Term, term: &str) -> Option<u32> {
    ts.objects(subject, &sh(term))
        .into_iter()
        .find_map(|o| o.as_literal().and_then(|l| l.parse::<u32>().ok()))
}

fn warn_unknown(ts: &TripleSet, subject: &Term, known: &[&str], warnings: &mut Vec<String>) {
    for triple in ts.iter().filter(|t| &t.subject == subject) {
        if triple.predicate == RDF_TYPE {
            continue;
        }
        if let Some(term) = triple.predicate.strip_prefix(SHACL_NS) {
            if !known.contains(&term) {
                warnings.push(format!(
                    "{}: unsupported constraint sh:{term} ignored",
                    term_id(subject)
                ));
            }
        }
    }
}

fn read_property_shape(ts: &TripleSet, subject: &Term, warnings: &mut Vec<String>) -> PropertyShape {
    let mut ps = PropertyShape::new(term_id(subject));
    ps.path = first_iri(ts, subject, "path");
    ps.name = first_literal(ts, subject, "name");
    ps.description = first_literal(ts, subject, "description");
    ps.min_count = first_u32(ts, subject, "minCount");
    ps.max_count = first_u32(ts, subject, "maxCount");
    ps.pattern = first_literal(ts, subject, "pattern");
    warn_unknown(ts, subject, KNOWN_PROPERTY_PREDICATES, warnings);

    for o in ts.objects(subject, &sh("class")) {
        if let Some(iri) = o.as_iri() {
            ps.class_constraints.push(iri.to_string());
        }
    }
    for o in ts.objects(subject, &sh("datatype")) {
        if let Some(iri) = o.as_iri() {
            ps.datatype_constraints.push(iri.to_string());
        }
    }
    if let Some(kind) = first_iri(ts, subject, "nodeKind") {
        if kind == sh("IRI") {
            ps.node_kind_iri = true;
        } else {
            warnings.push(format!("{}: sh:nodeKind {kind} not enforced", ps.id));
        }
    }

    for head in ts.objects(subject, &sh("or")) {
        for member in walk_list(ts, head) {
            let mut branch = OrBranch::default();
            for o in ts.objects(&member, &sh("class")) {
                if let Some(iri) = o.as_iri() {
                    branch.classes.push(iri.to_string());
                }
            }
            for o in ts.objects(&member, &sh("datatype")) {
                if let Some(iri) = o.as_iri() {
                    branch.datatypes.push(iri.to_string());
                }
            }
            ps.or_branches.push(branch);
        }
    }
    ps
}

/// Walk an rdf:first / rdf:rest chain, returning the members in order.
fn walk_list(ts: &TripleSet, head: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    let mut current = head.clone();
    let mut guard = 0;
    while current != Term::Iri(RDF_NIL.to_string()) {
        guard += 1;
        if guard > 10_000 {
            break;
        }
        let Some(first) = ts.objects(&current, RDF_FIRST).into_iter().next() else {
            break;
        };
        out.push(first.clone());
        match ts.objects(&current, RDF_REST).into_iter().next() {
            Some(rest) => current = rest.clone(),
            None => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::read_turtle;

    #[test]
    fn rebuilds_shapes_from_turtle() {
        let ttl = r#"
            @prefix sh: <http://www.w3.org/ns/shacl#> .
            @prefix dcat: <http://www.w3.org/ns/dcat#> .
            @prefix dct: <http://purl.org/dc/terms/> .
            @prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
            @prefix ex: <http://ex/shapes#> .

            ex:DatasetShape a sh:NodeShape ;
                sh:targetClass dcat:Dataset ;
                sh:description "A dataset." ;
                sh:property ex:Dataset-title, ex:Dataset-topic .

            ex:Dataset-title a sh:PropertyShape ;
                sh:path dct:title ;
                sh:name "title" ;
                sh:minCount 1 ;
                sh:datatype xsd:string .

            ex:Dataset-topic a sh:PropertyShape ;
                sh:path dcat:theme ;
                sh:or ( [ sh:class dcat:Dataset ] [ sh:class dcat:Catalog ] ) .
        "#;
        let (ts, prefixes) = read_turtle(ttl).unwrap();
        let graph = shapes_from_triples(&ts, &prefixes);
        assert_eq!(graph.node_shapes.len(), 1);
        let shape = &graph.node_shapes[0];
        assert_eq!(
            shape.target_class.as_deref(),
            Some("http://www.w3.org/ns/dcat#Dataset")
        );
        assert_eq!(shape.property_shapes.len(), 2);
        let title = &shape.property_shapes[0];
        assert_eq!(title.name.as_deref(), Some("title"));
        assert_eq!(title.min_count, Some(1));
        let topic = &shape.property_shapes[1];
        assert_eq!(topic.or_branches.len(), 2);
        assert_eq!(
            topic.or_branches[1].classes,
            vec!["http://www.w3.org/ns/dcat#Catalog".to_string()]
        );
    }
}

//! RDF triples, emission from instance documents, and N-Triples / Turtle
//! serialization.

mod emit;
mod ntriples;
mod turtle;

pub use emit::{materialize_super_properties, to_triples, EmitError};
pub use ntriples::{read_ntriples, write_ntriples, NtParseError};
pub use turtle::{read_turtle, write_turtle, TurtleParseError};

use std::collections::BTreeSet;
use std::collections::HashSet;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_FIRST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#first";
pub const RDF_REST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#rest";
pub const RDF_NIL: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#nil";
pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    /// Blank node label without the `_:` prefix.
    Blank(String),
    /// Literal; `datatype == None` means a plain (xsd:string) literal.
    Literal {
        lexical: String,
        datatype: Option<String>,
    },
}

impl Term {
    pub fn iri(s: impl Into<String>) -> Term {
        Term::Iri(s.into())
    }

    pub fn blank(label: impl Into<String>) -> Term {
        Term::Blank(label.into())
    }

    pub fn plain(lexical: impl Into<String>) -> Term {
        Term::Literal {
            lexical: lexical.into(),
            datatype: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Term {
        Term::Literal {
            lexical: lexical.into(),
            datatype: Some(datatype.into()),
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&str> {
        match self {
            Term::Literal { lexical, .. } => Some(lexical),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: String,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: impl Into<String>, object: Term) -> Triple {
        Triple {
            subject,
            predicate: predicate.into(),
            object,
        }
    }
}

/// Insertion-ordered set of triples; duplicates are dropped on insert.
#[derive(Debug, Clone, Default)]
pub struct TripleSet {
    triples: Vec<Triple>,
    seen: HashSet<Triple>,
    pub base_iri: Option<String>,
}

impl TripleSet {
    pub fn new() -> TripleSet {
        TripleSet::default()
    }

    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.seen.contains(&triple) {
            return false;
        }
        self.seen.insert(triple.clone());
        self.triples.push(triple);
        true
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.seen.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn as_btree_set(&self) -> BTreeSet<&Triple> {
        self.triples.iter().collect()
    }

    pub fn set_equals(&self, other: &TripleSet) -> bool {
        self.seen == other.seen
    }

    /// Objects of `(subject, predicate, ?)` in insertion order.
    pub fn objects<'a>(&'a self, subject: &'a Term, predicate: &'a str) -> Vec<&'a Term> {
        self.triples
            .iter()
            .filter(|t| &t.subject == subject && t.predicate == predicate)
            .map(|t| &t.object)
            .collect()
    }

    /// Subjects carrying `rdf:type <type_iri>`, in insertion order.
    pub fn subjects_of_type(&self, type_iri: &str) -> Vec<&Term> {
        self.triples
            .iter()
            .filter(|t| t.predicate == RDF_TYPE && t.object.as_iri() == Some(type_iri))
            .map(|t| &t.subject)
            .collect()
    }
}

impl FromIterator<Triple> for TripleSet {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut set = TripleSet::new();
        for t in iter {
            set.insert(t);
        }
        set
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_deduplicates() {
        let mut ts = TripleSet::new();
        let t = Triple::new(Term::blank("b0"), RDF_TYPE, Term::iri("http://x/C"));
        assert!(ts.insert(t.clone()));
        assert!(!ts.insert(t));
        assert_eq!(ts.len(), 1);
    }

    #[test]
    fn term_ordering_is_total() {
        let mut terms = vec![
            Term::plain("z"),
            Term::iri("http://a"),
            Term::blank("b"),
            Term::typed("1", "http://www.w3.org/2001/XMLSchema#integer"),
        ];
        terms.sort();
        terms.dedup();
        assert_eq!(terms.len(), 4);
    }
}

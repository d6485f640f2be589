//! IRI helpers: absolute-IRI syntax checks, CURIE expansion against prefix
//! tables, local-name extraction and name mangling for compiled elements.

use std::collections::BTreeMap;
use std::collections::HashMap;

/// Prefixes that are resolvable even when a document context omits them.
/// The table mirrors the namespaces that occur in DCAT application profiles.
pub const WELL_KNOWN_PREFIXES: &[(&str, &str)] = &[
    ("adms", "http://www.w3.org/ns/adms#"),
    ("dcat", "http://www.w3.org/ns/dcat#"),
    ("dct", "http://purl.org/dc/terms/"),
    ("dcterms", "http://purl.org/dc/terms/"),
    ("foaf", "http://xmlns.com/foaf/0.1/"),
    ("obo", "http://purl.obolibrary.org/obo/"),
    ("prov", "http://www.w3.org/ns/prov#"),
    ("qudt", "http://qudt.org/schema/qudt/"),
    ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
    ("rdfs", "http://www.w3.org/2000/01/rdf-schema#"),
    ("sh", "http://www.w3.org/ns/shacl#"),
    ("skos", "http://www.w3.org/2004/02/skos/core#"),
    ("spdx", "http://spdx.org/rdf/terms#"),
    ("vcard", "http://www.w3.org/2006/vcard/ns#"),
    ("xsd", "http://www.w3.org/2001/XMLSchema#"),
];

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";
pub const SHACL_NS: &str = "http://www.w3.org/ns/shacl#";

/// Syntactic check for an absolute IRI: a scheme followed by a nonempty
/// remainder, no whitespace or angle brackets anywhere.
pub fn is_absolute_iri(s: &str) -> bool {
    let Some(colon) = s.find(':') else {
        return false;
    };
    let (scheme, rest) = s.split_at(colon);
    let rest = &rest[1..];
    if scheme.is_empty() || rest.is_empty() {
        return false;
    }
    let mut chars = scheme.chars();
    let first = chars.next().unwrap();
    if !first.is_ascii_alphabetic() {
        return false;
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || c == '+' || c == '-' || c == '.') {
        return false;
    }
    !s.chars()
        .any(|c| c.is_whitespace() || c == '<' || c == '>' || c == '"' || c == '{' || c == '}')
}

/// Schemes treated as absolute IRIs rather than unresolvable CURIEs when a
/// colon-separated token has no matching prefix.
const KNOWN_SCHEMES: &[&str] = &[
    "http", "https", "urn", "mailto", "file", "ftp", "tag", "doi", "data",
];

/// Outcome of trying to expand a possibly-compact IRI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expansion {
    Absolute(String),
    /// The token looked like a CURIE but its prefix is not resolvable.
    UnresolvedPrefix(String),
    /// No colon at all; not expandable in this subset.
    NotAnIri(String),
}

/// Expand `token` using the document prefix map first, then the well-known
/// table. Tokens that already carry a known scheme pass through verbatim.
pub fn expand(token: &str, doc_prefixes: &BTreeMap<String, String>) -> Expansion {
    let Some(colon) = token.find(':') else {
        return Expansion::NotAnIri(token.to_string());
    };
    let (prefix, rest) = token.split_at(colon);
    let rest = &rest[1..];
    if let Some(base) = doc_prefixes.get(prefix) {
        return Expansion::Absolute(format!("{base}{rest}"));
    }
    if let Some((_, base)) = WELL_KNOWN_PREFIXES.iter().find(|(p, _)| *p == prefix) {
        return Expansion::Absolute(format!("{base}{rest}"));
    }
    if KNOWN_SCHEMES.contains(&prefix) || rest.starts_with("//") {
        if is_absolute_iri(token) {
            return Expansion::Absolute(token.to_string());
        }
    }
    Expansion::UnresolvedPrefix(token.to_string())
}

/// Local name of an IRI: the substring after the last `#` or `/`, sanitized
/// to an identifier. Empty results fall back to `unnamed`.
pub fn local_name(iri: &str) -> String {
    let tail = match iri.rfind(['#', '/']) {
        Some(idx) => &iri[idx + 1..],
        None => iri,
    };
    let sanitized: String = tail
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    let sanitized = sanitized.trim_matches('_').to_string();
    if sanitized.is_empty() {
        "unnamed".to_string()
    } else {
        sanitized
    }
}

/// Convert a camelCase or TitleCase identifier to snake_case. Runs of
/// uppercase letters are kept together (`accessURL` -> `access_url`).
pub fn snake_case(name: &str) -> String {
    let chars: Vec<char> = name.chars().collect();
    let mut out = String::with_capacity(name.len() + 4);
    for (i, &c) in chars.iter().enumerate() {
        if c.is_ascii_uppercase() {
            let prev_lower = i > 0 && chars[i - 1].is_ascii_lowercase();
            let next_lower = i + 1 < chars.len() && chars[i + 1].is_ascii_lowercase();
            let prev_upper = i > 0 && chars[i - 1].is_ascii_uppercase();
            if prev_lower || (prev_upper && next_lower) {
                out.push('_');
            }
            out.push(c.to_ascii_lowercase());
        } else {
            out.push(c);
        }
    }
    out.replace("__", "_")
}

/// Allocates unique names: the first request for a base name gets it
/// verbatim, later collisions get `_2`, `_3`, ... in first-seen order.
#[derive(Debug, Default)]
pub struct NameAllocator {
    seen: HashMap<String, u32>,
}

impl NameAllocator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Mark a name as taken without allocating (used when names are merged
    /// onto an existing definition).
    pub fn reserve(&mut self, name: &str) {
        self.seen.entry(name.to_string()).or_insert(1);
    }

    pub fn allocate(&mut self, base: &str) -> String {
        let count = self.seen.entry(base.to_string()).or_insert(0);
        *count += 1;
        if *count == 1 {
            base.to_string()
        } else {
            // The suffixed name itself must stay unique.
            let candidate = format!("{base}_{count}");
            self.allocate_suffixed(candidate)
        }
    }

    fn allocate_suffixed(&mut self, candidate: String) -> String {
        let count = self.seen.entry(candidate.clone()).or_insert(0);
        *count += 1;
        if *count == 1 {
            candidate
        } else {
            let next = format!("{candidate}_{count}");
            self.allocate_suffixed(next)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absolute_iri_accepts_common_forms() {
        assert!(is_absolute_iri("http://www.w3.org/ns/dcat#Dataset"));
        assert!(is_absolute_iri("urn:uuid:1234"));
        assert!(is_absolute_iri("http://purl.obolibrary.org/obo/CHMO_0000595"));
        assert!(!is_absolute_iri("dcat:Dataset relative"));
        assert!(!is_absolute_iri("no-colon"));
        assert!(!is_absolute_iri(":missing-scheme"));
        assert!(!is_absolute_iri("1http://x"));
    }

    #[test]
    fn expand_prefers_document_context() {
        let mut ctx = BTreeMap::new();
        ctx.insert("dcat".to_string(), "http://example.org/override#".to_string());
        assert_eq!(
            expand("dcat:Dataset", &ctx),
            Expansion::Absolute("http://example.org/override#Dataset".to_string())
        );
        let empty = BTreeMap::new();
        assert_eq!(
            expand("dcat:Dataset", &empty),
            Expansion::Absolute("http://www.w3.org/ns/dcat#Dataset".to_string())
        );
        assert_eq!(
            expand("unknown:Thing", &empty),
            Expansion::UnresolvedPrefix("unknown:Thing".to_string())
        );
        assert_eq!(
            expand("plain", &empty),
            Expansion::NotAnIri("plain".to_string())
        );
    }

    #[test]
    fn local_name_splits_on_hash_and_slash() {
        assert_eq!(local_name("http://www.w3.org/ns/dcat#Dataset"), "Dataset");
        assert_eq!(local_name("http://www.w3.org/ns/prov#Activity"), "Activity");
        assert_eq!(local_name("http://purl.org/dc/terms/title"), "title");
        assert_eq!(local_name("http://example.org/"), "unnamed");
    }

    #[test]
    fn snake_case_handles_acronym_runs() {
        assert_eq!(snake_case("accessURL"), "access_url");
        assert_eq!(snake_case("primaryTopic"), "primary_topic");
        assert_eq!(snake_case("wasGeneratedBy"), "was_generated_by");
        assert_eq!(snake_case("title"), "title");
        assert_eq!(snake_case("checksumValue"), "checksum_value");
        assert_eq!(snake_case("already_snake"), "already_snake");
    }

    #[test]
    fn allocator_suffixes_in_first_seen_order() {
        let mut alloc = NameAllocator::new();
        assert_eq!(alloc.allocate("Agent"), "Agent");
        assert_eq!(alloc.allocate("Agent"), "Agent_2");
        assert_eq!(alloc.allocate("Agent"), "Agent_3");
        assert_eq!(alloc.allocate("Other"), "Other");
    }
}

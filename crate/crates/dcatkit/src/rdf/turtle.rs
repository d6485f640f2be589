//! Turtle writer and a reader for the emitted subset: prefix directives,
//! `a`, `;`/`,` lists, typed and plain literals, bare integers, RDF
//! collections `( ... )` and bracketed blank nodes `[ ... ]`.

use super::ntriples::escape_literal;
use super::{Term, Triple, TripleSet, RDF_FIRST, RDF_NIL, RDF_REST, RDF_TYPE, XSD_STRING};
use std::collections::BTreeMap;
use thiserror::Error;

const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";

/// Serialize subject-grouped Turtle with a prefix header. Subjects keep
/// first-seen order; `rdf:type` renders as `a` and sorts first within each
/// subject block.
pub fn write_turtle(ts: &TripleSet, prefixes: &BTreeMap<String, String>) -> String {
    let mut out = String::new();
    for (prefix, base) in prefixes {
        out.push_str(&format!("@prefix {prefix}: <{base}> .\n"));
    }
    if !prefixes.is_empty() && !ts.is_empty() {
        out.push('\n');
    }

    // Group by subject, preserving first-seen subject order and first-seen
    // predicate order (rdf:type first).
    let mut subject_order: Vec<&Term> = Vec::new();
    let mut grouped: BTreeMap<String, Vec<&Triple>> = BTreeMap::new();
    for triple in ts.iter() {
        let key = term_key(&triple.subject);
        if !grouped.contains_key(&key) {
            subject_order.push(&triple.subject);
        }
        grouped.entry(key).or_default().push(triple);
    }

    for subject in subject_order {
        let triples = &grouped[&term_key(subject)];
        let mut predicate_order: Vec<&str> = Vec::new();
        for t in triples {
            if !predicate_order.contains(&t.predicate.as_str()) {
                predicate_order.push(&t.predicate);
            }
        }
        // rdf:type renders first; other predicates keep first-seen order.
        if let Some(idx) = predicate_order.iter().position(|p| *p == RDF_TYPE) {
            let ty = predicate_order.remove(idx);
            predicate_order.insert(0, ty);
        }

        out.push_str(&render_resource(subject, prefixes));
        let mut first_predicate = true;
        for predicate in predicate_order {
            let objects: Vec<&Term> = triples
                .iter()
                .filter(|t| t.predicate == predicate)
                .map(|t| &t.object)
                .collect();
            if first_predicate {
                out.push(' ');
                first_predicate = false;
            } else {
                out.push_str(" ;\n    ");
            }
            if predicate == RDF_TYPE {
                out.push_str("a");
            } else {
                out.push_str(&compress_iri(predicate, prefixes));
            }
            out.push(' ');
            let rendered: Vec<String> = objects
                .iter()
                .map(|o| render_object(o, prefixes))
                .collect();
            out.push_str(&rendered.join(", "));
        }
        out.push_str(" .\n");
    }
    out
}

fn term_key(t: &Term) -> String {
    match t {
        Term::Iri(iri) => format!("<{iri}>"),
        Term::Blank(label) => format!("_:{label}"),
        Term::Literal { lexical, datatype } => format!("\"{lexical}\"^^{datatype:?}"),
    }
}

fn render_resource(t: &Term, prefixes: &BTreeMap<String, String>) -> String {
    match t {
        Term::Iri(iri) => compress_iri(iri, prefixes),
        Term::Blank(label) => format!("_:{label}"),
        Term::Literal { .. } => render_object(t, prefixes),
    }
}

fn render_object(t: &Term, prefixes: &BTreeMap<String, String>) -> String {
    match t {
        Term::Iri(_) | Term::Blank(_) => render_resource(t, prefixes),
        Term::Literal { lexical, datatype } => match datatype.as_deref() {
            None | Some(XSD_STRING) => format!("\"{}\"", escape_literal(lexical)),
            Some(XSD_INTEGER) if lexical.chars().all(|c| c.is_ascii_digit() || c == '-') => {
                lexical.clone()
            }
            Some(dt) => format!(
                "\"{}\"^^{}",
                escape_literal(lexical),
                compress_iri(dt, prefixes)
            ),
        },
    }
}

/// Compress with the longest matching prefix when the remainder is a safe
/// local name; otherwise emit the full IRI.
fn compress_iri(iri: &str, prefixes: &BTreeMap<String, String>) -> String {
    let mut best: Option<(&str, &str)> = None;
    for (prefix, base) in prefixes {
        if let Some(rest) = iri.strip_prefix(base.as_str()) {
            if best.map_or(true, |(_, b)| base.len() > b.len()) {
                best = Some((prefix, base));
            }
            let _ = rest;
        }
    }
    if let Some((prefix, base)) = best {
        let local = &iri[base.len()..];
        if is_safe_local(local) {
            return format!("{prefix}:{local}");
        }
    }
    format!("<{iri}>")
}

fn is_safe_local(local: &str) -> bool {
    !local.is_empty()
        && !local.starts_with('.')
        && !local.ends_with('.')
        && local
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TurtleParseError {
    #[error("offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown prefix {0}")]
    UnknownPrefix(String),
}

/// Parse Turtle into triples plus the declared prefix map. Collections are
/// desugared into `rdf:first`/`rdf:rest` chains.
pub fn read_turtle(input: &str) -> Result<(TripleSet, BTreeMap<String, String>), TurtleParseError> {
    let mut parser = TurtleParser {
        chars: input.chars().collect(),
        pos: 0,
        prefixes: BTreeMap::new(),
        triples: TripleSet::new(),
        blank_counter: 0,
    };
    parser.parse_document()?;
    Ok((parser.triples, parser.prefixes))
}

struct TurtleParser {
    chars: Vec<char>,
    pos: usize,
    prefixes: BTreeMap<String, String>,
    triples: TripleSet,
    blank_counter: usize,
}

impl TurtleParser {
    fn err(&self, message: impl Into<String>) -> TurtleParseError {
        TurtleParseError::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.pos += 1;
                }
                Some('#') => {
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn expect(&mut self, c: char) -> Result<(), TurtleParseError> {
        self.skip_ws();
        if self.bump() == Some(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn fresh_blank(&mut self) -> Term {
        self.blank_counter += 1;
        Term::Blank(format!("tg{}", self.blank_counter))
    }

    fn parse_document(&mut self) -> Result<(), TurtleParseError> {
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(());
            }
            if self.lookahead_keyword("@prefix") {
                self.parse_prefix_directive()?;
                continue;
            }
            if self.lookahead_keyword("@base") {
                return Err(self.err("@base is not supported"));
            }
            self.parse_statement()?;
        }
    }

    fn lookahead_keyword(&self, kw: &str) -> bool {
        let mut i = self.pos;
        for expected in kw.chars() {
            match self.chars.get(i) {
                Some(c) if *c == expected => i += 1,
                _ => return false,
            }
        }
        true
    }

    fn parse_prefix_directive(&mut self) -> Result<(), TurtleParseError> {
        self.pos += "@prefix".len();
        self.skip_ws();
        let mut prefix = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            prefix.push(self.bump().unwrap());
        }
        self.expect(':')?;
        self.skip_ws();
        let iri = self.parse_iriref()?;
        self.expect('.')?;
        self.prefixes.insert(prefix, iri);
        Ok(())
    }

    fn parse_iriref(&mut self) -> Result<String, TurtleParseError> {
        self.expect('<')?;
        let mut iri = String::new();
        loop {
            match self.bump() {
                Some('>') => return Ok(iri),
                Some(c) => iri.push(c),
                None => return Err(self.err("unterminated IRI")),
            }
        }
    }

    fn parse_statement(&mut self) -> Result<(), TurtleParseError> {
        let subject = self.parse_subject()?;
        self.parse_predicate_object_list(&subject)?;
        self.expect('.')?;
        Ok(())
    }

    fn parse_subject(&mut self) -> Result<Term, TurtleParseError> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.parse_iriref()?)),
            Some('_') => self.parse_blank_label(),
            Some('[') => {
                let node = self.fresh_blank();
                self.bump();
                self.skip_ws();
                if self.peek() == Some(']') {
                    self.bump();
                } else {
                    self.parse_predicate_object_list(&node)?;
                    self.expect(']')?;
                }
                Ok(node)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let (prefix, local) = self.parse_pname()?;
                self.resolve_pname(&prefix, &local)
            }
            _ => Err(self.err("expected subject")),
        }
    }

    fn parse_blank_label(&mut self) -> Result<Term, TurtleParseError> {
        self.bump();
        if self.bump() != Some(':') {
            return Err(self.err("expected ':' after '_'"));
        }
        let mut label = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            label.push(self.bump().unwrap());
        }
        if label.is_empty() {
            return Err(self.err("empty blank node label"));
        }
        Ok(Term::Blank(label))
    }

    fn parse_pname(&mut self) -> Result<(String, String), TurtleParseError> {
        let mut prefix = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            prefix.push(self.bump().unwrap());
        }
        if self.peek() != Some(':') {
            return Err(self.err(format!("expected ':' in prefixed name after '{prefix}'")));
        }
        self.bump();
        let mut local = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
        {
            local.push(self.bump().unwrap());
        }
        // A trailing '.' is the statement terminator, not part of the name.
        while local.ends_with('.') {
            local.pop();
            self.pos -= 1;
        }
        Ok((prefix, local))
    }

    fn resolve_pname(&self, prefix: &str, local: &str) -> Result<Term, TurtleParseError> {
        match self.prefixes.get(prefix) {
            Some(base) => Ok(Term::Iri(format!("{base}{local}"))),
            None => Err(TurtleParseError::UnknownPrefix(prefix.to_string())),
        }
    }

    fn parse_predicate_object_list(&mut self, subject: &Term) -> Result<(), TurtleParseError> {
        loop {
            self.skip_ws();
            let predicate = self.parse_verb()?;
            loop {
                let object = self.parse_object()?;
                self.triples
                    .insert(Triple::new(subject.clone(), predicate.clone(), object));
                self.skip_ws();
                if self.peek() == Some(',') {
                    self.bump();
                    continue;
                }
                break;
            }
            self.skip_ws();
            if self.peek() == Some(';') {
                self.bump();
                self.skip_ws();
                // Trailing ';' before '.' or ']' is legal Turtle.
                if matches!(self.peek(), Some('.') | Some(']')) {
                    return Ok(());
                }
                continue;
            }
            return Ok(());
        }
    }

    fn parse_verb(&mut self) -> Result<String, TurtleParseError> {
        self.skip_ws();
        if self.peek() == Some('a') {
            let next = self.chars.get(self.pos + 1).copied();
            if next.map_or(true, |c| c.is_whitespace()) {
                self.bump();
                return Ok(RDF_TYPE.to_string());
            }
        }
        match self.peek() {
            Some('<') => self.parse_iriref(),
            Some(c) if c.is_ascii_alphabetic() => {
                let (prefix, local) = self.parse_pname()?;
                match self.resolve_pname(&prefix, &local)? {
                    Term::Iri(iri) => Ok(iri),
                    _ => Err(self.err("verb must be an IRI")),
                }
            }
            _ => Err(self.err("expected predicate")),
        }
    }

    fn parse_object(&mut self) -> Result<Term, TurtleParseError> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.parse_iriref()?)),
            Some('_') => self.parse_blank_label(),
            Some('"') => self.parse_string_literal(),
            Some('(') => self.parse_collection(),
            Some('[') => {
                let node = self.fresh_blank();
                self.bump();
                self.skip_ws();
                if self.peek() == Some(']') {
                    self.bump();
                } else {
                    self.parse_predicate_object_list(&node)?;
                    self.expect(']')?;
                }
                Ok(node)
            }
            Some(c) if c.is_ascii_digit() || c == '-' || c == '+' => self.parse_numeric(),
            Some(c) if c.is_ascii_alphabetic() => {
                if self.lookahead_keyword("true") {
                    self.pos += 4;
                    return Ok(Term::typed("true", XSD_BOOLEAN));
                }
                if self.lookahead_keyword("false") {
                    self.pos += 5;
                    return Ok(Term::typed("false", XSD_BOOLEAN));
                }
                let (prefix, local) = self.parse_pname()?;
                self.resolve_pname(&prefix, &local)
            }
            _ => Err(self.err("expected object")),
        }
    }

    fn parse_string_literal(&mut self) -> Result<Term, TurtleParseError> {
        self.bump();
        let mut lexical = String::new();
        loop {
            match self.bump() {
                Some('"') => break,
                Some('\\') => match self.bump() {
                    Some('\\') => lexical.push('\\'),
                    Some('"') => lexical.push('"'),
                    Some('n') => lexical.push('\n'),
                    Some('r') => lexical.push('\r'),
                    Some('t') => lexical.push('\t'),
                    Some(other) => return Err(self.err(format!("unknown escape \\{other}"))),
                    None => return Err(self.err("unterminated escape")),
                },
                Some(c) => lexical.push(c),
                None => return Err(self.err("unterminated string")),
            }
        }
        if self.peek() == Some('^') {
            self.bump();
            if self.bump() != Some('^') {
                return Err(self.err("expected '^^'"));
            }
            self.skip_ws();
            let dt = match self.peek() {
                Some('<') => self.parse_iriref()?,
                Some(c) if c.is_ascii_alphabetic() => {
                    let (prefix, local) = self.parse_pname()?;
                    match self.resolve_pname(&prefix, &local)? {
                        Term::Iri(iri) => iri,
                        _ => return Err(self.err("datatype must be an IRI")),
                    }
                }
                _ => return Err(self.err("expected datatype IRI")),
            };
            return Ok(Term::typed(lexical, dt));
        }
        if self.peek() == Some('@') {
            return Err(self.err("language tags are not supported"));
        }
        Ok(Term::plain(lexical))
    }

    fn parse_numeric(&mut self) -> Result<Term, TurtleParseError> {
        let mut repr = String::new();
        if matches!(self.peek(), Some('-') | Some('+')) {
            repr.push(self.bump().unwrap());
        }
        let mut is_decimal = false;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
            let c = self.bump().unwrap();
            if c == '.' {
                // a '.' not followed by a digit terminates the statement
                if !matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                    self.pos -= 1;
                    break;
                }
                is_decimal = true;
            }
            repr.push(c);
        }
        if repr.is_empty() || repr == "-" || repr == "+" {
            return Err(self.err("malformed number"));
        }
        if is_decimal {
            Ok(Term::typed(repr, "http://www.w3.org/2001/XMLSchema#decimal"))
        } else {
            Ok(Term::typed(repr, XSD_INTEGER))
        }
    }

    fn parse_collection(&mut self) -> Result<Term, TurtleParseError> {
        self.bump();
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            if self.peek() == Some(')') {
                self.bump();
                break;
            }
            if self.peek().is_none() {
                return Err(self.err("unterminated collection"));
            }
            items.push(self.parse_object()?);
        }
        if items.is_empty() {
            return Ok(Term::Iri(RDF_NIL.to_string()));
        }
        let mut head = Term::Iri(RDF_NIL.to_string());
        for item in items.into_iter().rev() {
            let cell = self.fresh_blank();
            self.triples
                .insert(Triple::new(cell.clone(), RDF_FIRST, item));
            self.triples.insert(Triple::new(cell.clone(), RDF_REST, head));
            head = cell;
        }
        Ok(head)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_simple_graph() {
        let mut prefixes = BTreeMap::new();
        prefixes.insert("ex".to_string(), "http://ex/".to_string());
        let mut ts = TripleSet::new();
        ts.insert(Triple::new(
            Term::iri("http://ex/s"),
            RDF_TYPE,
            Term::iri("http://ex/C"),
        ));
        ts.insert(Triple::new(
            Term::iri("http://ex/s"),
            "http://ex/label",
            Term::plain("hello \"world\""),
        ));
        let ttl = write_turtle(&ts, &prefixes);
        let (back, parsed_prefixes) = read_turtle(&ttl).unwrap();
        assert_eq!(parsed_prefixes["ex"], "http://ex/");
        assert!(back.set_equals(&ts));
    }

    #[test]
    fn parses_collections_into_first_rest_chains() {
        let ttl = r#"
            @prefix sh: <http://www.w3.org/ns/shacl#> .
            @prefix ex: <http://ex/> .
            ex:shape sh:or ( [ sh:class ex:A ] [ sh:class ex:B ] ) .
        "#;
        let (ts, _) = read_turtle(ttl).unwrap();
        let shape = Term::iri("http://ex/shape");
        let heads = ts.objects(&shape, "http://www.w3.org/ns/shacl#or");
        assert_eq!(heads.len(), 1);
        // Walk the list.
        let mut current = heads[0].clone();
        let mut members = Vec::new();
        loop {
            if current == Term::Iri(RDF_NIL.to_string()) {
                break;
            }
            let first = ts.objects(&current, RDF_FIRST);
            assert_eq!(first.len(), 1);
            members.push(first[0].clone());
            let rest = ts.objects(&current, RDF_REST);
            assert_eq!(rest.len(), 1);
            current = rest[0].clone();
        }
        assert_eq!(members.len(), 2);
    }

    #[test]
    fn parses_semicolon_groups_and_integers() {
        let ttl = r#"
            @prefix sh: <http://www.w3.org/ns/shacl#> .
            @prefix ex: <http://ex/> .
            ex:p a sh:PropertyShape ;
                sh:minCount 1 ;
                sh:maxCount 2 .
        "#;
        let (ts, _) = read_turtle(ttl).unwrap();
        assert_eq!(ts.len(), 3);
        let subject = Term::iri("http://ex/p");
        let min = ts.objects(&subject, "http://www.w3.org/ns/shacl#minCount");
        assert_eq!(min[0].as_literal(), Some("1"));
    }

    #[test]
    fn unknown_prefix_is_an_error() {
        assert!(matches!(
            read_turtle("nope:s nope:p nope:o ."),
            Err(TurtleParseError::UnknownPrefix(_))
        ));
    }
}

//! N-Triples writer and reader. The writer sorts lines lexicographically so
//! output is deterministic; the reader accepts the emitted subset (IRIs,
//! blank labels, plain and typed literals).

use super::{Term, Triple, TripleSet, XSD_STRING};
use thiserror::Error;

pub fn write_ntriples(ts: &TripleSet) -> String {
    let mut lines: Vec<String> = ts.iter().map(render_line).collect();
    lines.sort();
    lines.dedup();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

fn render_line(t: &Triple) -> String {
    format!(
        "{} <{}> {} .",
        render_term(&t.subject),
        t.predicate,
        render_term(&t.object)
    )
}

pub(crate) fn render_term(term: &Term) -> String {
    match term {
        Term::Iri(iri) => format!("<{iri}>"),
        Term::Blank(label) => format!("_:{label}"),
        Term::Literal { lexical, datatype } => {
            let quoted = format!("\"{}\"", escape_literal(lexical));
            match datatype.as_deref() {
                None => quoted,
                Some(XSD_STRING) => quoted,
                Some(dt) => format!("{quoted}^^<{dt}>"),
            }
        }
    }
}

pub(crate) fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            other => out.push(other),
        }
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NtParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

pub fn read_ntriples(input: &str) -> Result<TripleSet, NtParseError> {
    let mut ts = TripleSet::new();
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cursor = Cursor {
            chars: line.chars().collect(),
            pos: 0,
            line: line_no,
        };
        let subject = cursor.term()?;
        cursor.skip_ws();
        let predicate = match cursor.term()? {
            Term::Iri(iri) => iri,
            other => {
                return Err(NtParseError::Syntax {
                    line: line_no,
                    message: format!("predicate must be an IRI, got {other:?}"),
                })
            }
        };
        cursor.skip_ws();
        let object = cursor.term()?;
        cursor.skip_ws();
        if cursor.next_char() != Some('.') {
            return Err(NtParseError::Syntax {
                line: line_no,
                message: "expected terminating '.'".to_string(),
            });
        }
        ts.insert(Triple::new(subject, predicate, object));
    }
    Ok(ts)
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn next_char(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn err(&self, message: impl Into<String>) -> NtParseError {
        NtParseError::Syntax {
            line: self.line,
            message: message.into(),
        }
    }

    fn term(&mut self) -> Result<Term, NtParseError> {
        self.skip_ws();
        match self.peek() {
            Some('<') => {
                self.pos += 1;
                let mut iri = String::new();
                loop {
                    match self.next_char() {
                        Some('>') => break,
                        Some(c) => iri.push(c),
                        None => return Err(self.err("unterminated IRI")),
                    }
                }
                Ok(Term::Iri(iri))
            }
            Some('_') => {
                self.pos += 1;
                if self.next_char() != Some(':') {
                    return Err(self.err("expected ':' after '_'"));
                }
                let mut label = String::new();
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '-')
                {
                    label.push(self.next_char().unwrap());
                }
                if label.is_empty() {
                    return Err(self.err("empty blank node label"));
                }
                Ok(Term::Blank(label))
            }
            Some('"') => {
                self.pos += 1;
                let mut lexical = String::new();
                loop {
                    match self.next_char() {
                        Some('"') => break,
                        Some('\\') => match self.next_char() {
                            Some('\\') => lexical.push('\\'),
                            Some('"') => lexical.push('"'),
                            Some('n') => lexical.push('\n'),
                            Some('r') => lexical.push('\r'),
                            Some('t') => lexical.push('\t'),
                            Some(other) => {
                                return Err(self.err(format!("unknown escape \\{other}")))
                            }
                            None => return Err(self.err("unterminated escape")),
                        },
                        Some(c) => lexical.push(c),
                        None => return Err(self.err("unterminated literal")),
                    }
                }
                if self.peek() == Some('^') {
                    self.pos += 1;
                    if self.next_char() != Some('^') {
                        return Err(self.err("expected '^^'"));
                    }
                    match self.term()? {
                        Term::Iri(dt) => Ok(Term::typed(lexical, dt)),
                        _ => Err(self.err("datatype must be an IRI")),
                    }
                } else {
                    Ok(Term::plain(lexical))
                }
            }
            Some(other) => Err(self.err(format!("unexpected character '{other}'"))),
            None => Err(self.err("unexpected end of line")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_set_serializes_to_empty_output() {
        assert_eq!(write_ntriples(&TripleSet::new()), "");
    }

    #[test]
    fn typed_literal_round_trips() {
        let mut ts = TripleSet::new();
        ts.insert(Triple::new(
            Term::iri("http://ex/s"),
            "http://ex/p",
            Term::typed("7.4", "http://www.w3.org/2001/XMLSchema#decimal"),
        ));
        let out = write_ntriples(&ts);
        assert_eq!(
            out,
            "<http://ex/s> <http://ex/p> \"7.4\"^^<http://www.w3.org/2001/XMLSchema#decimal> .\n"
        );
        let back = read_ntriples(&out).unwrap();
        assert!(back.set_equals(&ts));
    }

    #[test]
    fn escapes_round_trip() {
        let mut ts = TripleSet::new();
        ts.insert(Triple::new(
            Term::blank("b0"),
            "http://ex/p",
            Term::plain("line1\nline2 \"quoted\" \\slash\t"),
        ));
        let out = write_ntriples(&ts);
        let back = read_ntriples(&out).unwrap();
        assert!(back.set_equals(&ts));
    }

    #[test]
    fn output_is_sorted() {
        let mut ts = TripleSet::new();
        ts.insert(Triple::new(Term::iri("http://ex/z"), "http://ex/p", Term::plain("1")));
        ts.insert(Triple::new(Term::iri("http://ex/a"), "http://ex/p", Term::plain("2")));
        let out = write_ntriples(&ts);
        let lines: Vec<&str> = out.lines().collect();
        assert!(lines[0].starts_with("<http://ex/a>"));
        assert!(lines[1].starts_with("<http://ex/z>"));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let ts = read_ntriples("# comment\n\n<http://ex/s> <http://ex/p> \"v\" .\n").unwrap();
        assert_eq!(ts.len(), 1);
    }
}

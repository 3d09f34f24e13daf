//! A restricted Turtle dialect: `@prefix`, prefixed names, IRIs, blank node
//! labels, quoted literals with `^^` or `@`, the `a` keyword, and `;` / `,`
//! continuation. Anything else is a syntax error.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::lexer::Cursor;
use super::term::{write_escaped, Iri, Literal, Term, Triple};
use super::{Graph, ParseError};
use crate::vocab::ns;

pub fn parse_turtle_subset(input: &[u8]) -> Result<Graph, ParseError> {
    let text = std::str::from_utf8(input).map_err(|e| ParseError::Encoding {
        line: input[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1,
        offset: e.valid_up_to(),
    })?;
    let mut reader = Reader {
        cur: Cursor::new(text, 1),
        prefixes: BTreeMap::new(),
        graph: Graph::new(),
    };
    reader.document()?;
    Ok(reader.graph)
}

struct Reader<'a> {
    cur: Cursor<'a>,
    prefixes: BTreeMap<String, String>,
    graph: Graph,
}

impl Reader<'_> {
    fn document(&mut self) -> Result<(), ParseError> {
        loop {
            self.cur.skip_ws_and_comments();
            match self.cur.peek() {
                None => return Ok(()),
                Some('@') => self.prefix_directive()?,
                Some(_) => self.statement()?,
            }
        }
    }

    fn prefix_directive(&mut self) -> Result<(), ParseError> {
        self.cur.expect('@')?;
        let word = self.name_chars();
        if word != "prefix" {
            return Err(self.cur.error(format!("unsupported directive @{word}")));
        }
        self.cur.skip_ws_and_comments();
        let prefix = self.name_chars();
        self.cur.expect(':')?;
        self.cur.skip_ws_and_comments();
        let iri = self.cur.iri_ref()?;
        self.cur.skip_ws_and_comments();
        self.cur.expect('.')?;
        self.prefixes.insert(prefix, iri.as_str().to_string());
        Ok(())
    }

    fn statement(&mut self) -> Result<(), ParseError> {
        let subject = match self.cur.peek() {
            Some('<') => Term::Iri(self.cur.iri_ref()?),
            Some('_') => Term::Blank(self.cur.blank_node()?),
            Some('"') => return Err(self.cur.error("literal subject")),
            _ => Term::Iri(self.prefixed_name()?),
        };
        loop {
            self.cur.skip_ws_and_comments();
            let predicate = self.predicate()?;
            loop {
                self.cur.skip_ws_and_comments();
                let object = self.object()?;
                let triple = Triple::new(subject.clone(), predicate.clone(), object)
                    .map_err(|e| self.cur.error(e.to_string()))?;
                self.graph.insert(triple);
                self.cur.skip_ws_and_comments();
                if !self.cur.eat(',') {
                    break;
                }
            }
            if self.cur.eat(';') {
                self.cur.skip_ws_and_comments();
                // A dangling ';' before '.' is legal Turtle.
                if self.cur.eat('.') {
                    return Ok(());
                }
                continue;
            }
            self.cur.expect('.')?;
            return Ok(());
        }
    }

    fn predicate(&mut self) -> Result<Iri, ParseError> {
        match self.cur.peek() {
            Some('<') => self.cur.iri_ref(),
            Some('a') => {
                let (line, column) = (self.cur.line, self.cur.column);
                let word = self.name_chars();
                if word == "a" && !matches!(self.cur.peek(), Some(':')) {
                    return Ok(ns::rdf::type_());
                }
                self.finish_prefixed(word, line, column)
            }
            _ => self.prefixed_name(),
        }
    }

    fn object(&mut self) -> Result<Term, ParseError> {
        match self.cur.peek() {
            Some('<') => Ok(Term::Iri(self.cur.iri_ref()?)),
            Some('_') => Ok(Term::Blank(self.cur.blank_node()?)),
            Some('"') => {
                let lexical = self.cur.quoted_string()?;
                match self.cur.peek() {
                    Some('^') => {
                        self.cur.bump();
                        self.cur.expect('^')?;
                        let dt = match self.cur.peek() {
                            Some('<') => self.cur.iri_ref()?,
                            _ => self.prefixed_name()?,
                        };
                        if dt == ns::rdf::lang_string() {
                            return Err(self.cur.error("rdf:langString requires a language tag"));
                        }
                        Ok(Term::typed_literal(lexical, dt))
                    }
                    Some('@') => {
                        let tag = self.cur.language_tag()?;
                        Literal::lang_string(lexical, &tag)
                            .map(Term::Literal)
                            .map_err(|e| self.cur.error(e.to_string()))
                    }
                    _ => Ok(Term::string_literal(lexical)),
                }
            }
            _ => Ok(Term::Iri(self.prefixed_name()?)),
        }
    }

    fn prefixed_name(&mut self) -> Result<Iri, ParseError> {
        let (line, column) = (self.cur.line, self.cur.column);
        let prefix = self.name_chars();
        self.finish_prefixed(prefix, line, column)
    }

    fn finish_prefixed(&mut self, prefix: String, line: usize, column: usize) -> Result<Iri, ParseError> {
        if !self.cur.eat(':') {
            return Err(ParseError::Syntax {
                line,
                column,
                reason: "expected IRI, prefixed name, or literal".into(),
            });
        }
        let local = self.local_name();
        let ns = self
            .prefixes
            .get(&prefix)
            .ok_or(ParseError::UnknownPrefix { prefix: prefix.clone(), line })?;
        Iri::new(format!("{ns}{local}")).map_err(|e| ParseError::Syntax {
            line,
            column,
            reason: e.to_string(),
        })
    }

    fn name_chars(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.cur.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                s.push(c);
                self.cur.bump();
            } else {
                break;
            }
        }
        s
    }

    // Local names may contain '.', but not as the last character.
    fn local_name(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.cur.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                s.push(c);
                self.cur.bump();
            } else if c == '.' && self.dot_continues_name() {
                s.push('.');
                self.cur.bump();
            } else {
                break;
            }
        }
        s
    }

    fn dot_continues_name(&mut self) -> bool {
        self.cur.peek_second().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    }
}

/// Writes a graph in the same Turtle subset, grouped by subject in canonical
/// order. `prefixes` maps prefix label to namespace IRI.
pub fn serialize_turtle(graph: &Graph, prefixes: &[(&str, &str)]) -> Vec<u8> {
    let mut out = String::new();
    for (label, iri) in prefixes {
        let _ = writeln!(out, "@prefix {label}: <{iri}> .");
    }
    if !prefixes.is_empty() {
        out.push('\n');
    }
    let sorted = graph.sorted();
    let mut i = 0;
    while i < sorted.len() {
        let subject = sorted[i].subject();
        out.push_str(&term_text(subject, prefixes));
        let mut first = true;
        while i < sorted.len() && sorted[i].subject() == subject {
            let t = sorted[i];
            out.push_str(if first { " " } else { " ;\n    " });
            first = false;
            if *t.predicate() == ns::rdf::type_() {
                out.push('a');
            } else {
                out.push_str(&iri_text(t.predicate(), prefixes));
            }
            out.push(' ');
            out.push_str(&term_text(t.object(), prefixes));
            i += 1;
        }
        out.push_str(" .\n");
    }
    out.into_bytes()
}

fn iri_text(iri: &Iri, prefixes: &[(&str, &str)]) -> String {
    for (label, ns) in prefixes {
        if let Some(local) = iri.as_str().strip_prefix(ns) {
            if is_safe_local(local) {
                return format!("{label}:{local}");
            }
        }
    }
    iri.to_string()
}

fn is_safe_local(local: &str) -> bool {
    !local.is_empty()
        && local.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn term_text(term: &Term, prefixes: &[(&str, &str)]) -> String {
    match term {
        Term::Iri(iri) => iri_text(iri, prefixes),
        Term::Blank(_) => term.to_string(),
        Term::Literal(lit) => {
            let mut s = String::from("\"");
            let _ = write_escaped(&mut s, lit.lexical());
            s.push('"');
            if let Some(lang) = lit.language() {
                s.push('@');
                s.push_str(lang);
            } else if lit.datatype().as_str() != ns::xsd::STRING {
                s.push_str("^^");
                s.push_str(&iri_text(lit.datatype(), prefixes));
            }
            s
        }
    }
}

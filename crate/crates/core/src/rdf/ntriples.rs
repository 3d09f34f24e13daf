use super::lexer::Cursor;
use super::term::{Literal, Term, Triple};
use super::{Graph, ParseError};
use crate::vocab::ns;

/// Reads an N-Triples document. Every statement line bumps the raw count,
/// duplicates included.
pub fn parse_ntriples(input: &[u8]) -> Result<Graph, ParseError> {
    let text = std::str::from_utf8(input).map_err(|e| {
        let prefix = &input[..e.valid_up_to()];
        ParseError::Encoding {
            line: prefix.iter().filter(|&&b| b == b'\n').count() + 1,
            offset: e.valid_up_to(),
        }
    })?;
    let mut graph = Graph::new();
    for (idx, line) in text.split('\n').enumerate() {
        if let Some(triple) = parse_line(line, idx + 1)? {
            graph.insert(triple);
        }
    }
    Ok(graph)
}

fn parse_line(line: &str, line_no: usize) -> Result<Option<Triple>, ParseError> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let mut cur = Cursor::new(line, line_no);
    cur.skip_inline_ws();
    match cur.peek() {
        None | Some('#') => return Ok(None),
        _ => {}
    }
    let subject = match cur.peek() {
        Some('<') => Term::Iri(cur.iri_ref()?),
        Some('_') => Term::Blank(cur.blank_node()?),
        _ => return Err(cur.error("expected IRI or blank node subject")),
    };
    cur.skip_inline_ws();
    if cur.peek() != Some('<') {
        return Err(cur.error("expected IRI predicate"));
    }
    let predicate = cur.iri_ref()?;
    cur.skip_inline_ws();
    let object = object_term(&mut cur)?;
    cur.skip_inline_ws();
    cur.expect('.')?;
    cur.skip_inline_ws();
    match cur.peek() {
        None | Some('#') => {}
        Some(_) => return Err(cur.error("unexpected content after '.'")),
    }
    Triple::new(subject, predicate, object)
        .map(Some)
        .map_err(|e| cur.error(e.to_string()))
}

fn object_term(cur: &mut Cursor<'_>) -> Result<Term, ParseError> {
    match cur.peek() {
        Some('<') => Ok(Term::Iri(cur.iri_ref()?)),
        Some('_') => Ok(Term::Blank(cur.blank_node()?)),
        Some('"') => {
            let lexical = cur.quoted_string()?;
            match cur.peek() {
                Some('^') => {
                    cur.bump();
                    cur.expect('^')?;
                    if cur.peek() != Some('<') {
                        return Err(cur.error("expected datatype IRI"));
                    }
                    let dt = cur.iri_ref()?;
                    if dt == ns::rdf::lang_string() {
                        return Err(cur.error("rdf:langString requires a language tag"));
                    }
                    Ok(Term::typed_literal(lexical, dt))
                }
                Some('@') => {
                    let tag = cur.language_tag()?;
                    Literal::lang_string(lexical, &tag)
                        .map(Term::Literal)
                        .map_err(|e| cur.error(e.to_string()))
                }
                _ => Ok(Term::string_literal(lexical)),
            }
        }
        _ => Err(cur.error("expected object term")),
    }
}

/// One statement per line, sorted by canonical (subject, predicate, object)
/// text.
pub fn serialize_ntriples(graph: &Graph) -> Vec<u8> {
    let mut out = String::with_capacity(graph.len() * 96);
    for t in graph.sorted() {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out.into_bytes()
}

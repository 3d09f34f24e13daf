//! RDF statement model, N-Triples I/O, a Turtle-subset reader/writer, and
//! triple-pattern matching.

mod graph;
mod lexer;
mod ntriples;
mod term;
mod turtle;

pub use graph::{Graph, TriplePattern};
pub use ntriples::{parse_ntriples, serialize_ntriples};
pub use term::{BlankNode, Iri, Literal, Term, TermError, Triple};
pub use turtle::{parse_turtle_subset, serialize_turtle};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {reason}")]
    Syntax {
        line: usize,
        column: usize,
        reason: String,
    },
    #[error("invalid UTF-8 on line {line} (byte offset {offset})")]
    Encoding { line: usize, offset: usize },
    #[error("unknown prefix {prefix:?} on line {line}")]
    UnknownPrefix { prefix: String, line: usize },
}

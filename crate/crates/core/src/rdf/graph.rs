use std::collections::{BTreeMap, BTreeSet};

use super::term::{Iri, Term, Triple};

/// A set of triples plus the number of statements that went into it.
///
/// `raw_statement_count` counts every insertion, including duplicates that
/// the set swallowed; the compactness metric reads it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    triples: BTreeSet<Triple>,
    graph_iri: Option<Iri>,
    raw_statement_count: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_iri(iri: Iri) -> Self {
        Graph {
            graph_iri: Some(iri),
            ..Self::default()
        }
    }

    pub fn graph_iri(&self) -> Option<&Iri> {
        self.graph_iri.as_ref()
    }

    pub fn set_graph_iri(&mut self, iri: Option<Iri>) {
        self.graph_iri = iri;
    }

    /// Records one ingested statement. Returns `true` when it was new.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.raw_statement_count += 1;
        self.triples.insert(triple)
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        let removed = self.triples.remove(triple);
        if removed {
            self.raw_statement_count -= 1;
        }
        removed
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn raw_statement_count(&self) -> usize {
        self.raw_statement_count
    }

    /// Overrides the ingested-statement count. Clamped to at least `len()`.
    pub fn set_raw_statement_count(&mut self, count: usize) {
        self.raw_statement_count = count.max(self.triples.len());
    }

    /// Iterates in structural order (grouped by subject).
    pub fn iter(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.triples.iter()
    }

    /// Triples in canonical serialization order.
    pub fn sorted(&self) -> Vec<&Triple> {
        sort_canonical(self.triples.iter())
    }

    pub fn match_pattern(&self, pattern: &TriplePattern) -> Vec<&Triple> {
        sort_canonical(self.triples.iter().filter(|t| pattern.matches(t)))
    }

    /// Distinct subjects.
    pub fn subjects(&self) -> BTreeSet<&Term> {
        self.triples.iter().map(Triple::subject).collect()
    }

    /// Triples grouped by subject.
    pub fn by_subject(&self) -> BTreeMap<&Term, Vec<&Triple>> {
        let mut map: BTreeMap<&Term, Vec<&Triple>> = BTreeMap::new();
        for t in &self.triples {
            map.entry(t.subject()).or_default().push(t);
        }
        map
    }

    /// Objects of `(subject, predicate, ?)`.
    pub fn objects<'a>(&'a self, subject: &'a Term, predicate: &'a Iri) -> impl Iterator<Item = &'a Term> + 'a {
        self.triples
            .iter()
            .filter(move |t| t.subject() == subject && t.predicate() == predicate)
            .map(Triple::object)
    }

    /// Merges `other` in, counting its raw statements too.
    pub fn merge(&mut self, other: Graph) {
        self.raw_statement_count += other.raw_statement_count;
        self.triples.extend(other.triples);
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Triple;
    type IntoIter = std::collections::btree_set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

fn sort_canonical<'a>(triples: impl Iterator<Item = &'a Triple>) -> Vec<&'a Triple> {
    let mut keyed: Vec<_> = triples.map(|t| (t.sort_key(), t)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.into_iter().map(|(_, t)| t).collect()
}

/// A triple pattern; `None` in a position is a wildcard.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: Option<Term>,
    pub predicate: Option<Iri>,
    pub object: Option<Term>,
}

impl TriplePattern {
    pub fn any() -> Self {
        Self::default()
    }

    pub fn subject(mut self, s: Term) -> Self {
        self.subject = Some(s);
        self
    }

    pub fn predicate(mut self, p: Iri) -> Self {
        self.predicate = Some(p);
        self
    }

    pub fn object(mut self, o: Term) -> Self {
        self.object = Some(o);
        self
    }

    pub fn matches(&self, t: &Triple) -> bool {
        self.subject.as_ref().is_none_or(|s| s == t.subject())
            && self.predicate.as_ref().is_none_or(|p| p == t.predicate())
            && self.object.as_ref().is_none_or(|o| o == t.object())
    }
}

use std::collections::BTreeMap;

use super::{ActionKind, ImprovementAction};
use crate::numeric::{int, ratio, Rational};
use crate::rdf::{Graph, Iri, Term, Triple};
use crate::vocab::ns;

/// Lowercase, trim, collapse whitespace, drop `.`, `,`, `_` and `-`.
pub fn canonical_label(label: &str) -> String {
    let stripped: String = label
        .chars()
        .filter(|c| !matches!(c, '.' | ',' | '_' | '-'))
        .flat_map(char::to_lowercase)
        .collect();
    stripped.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - levenshtein / max length`, in characters. Two empty strings are
/// identical.
pub fn similarity(a: &str, b: &str) -> Rational {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return int(1);
    }
    int(1) - ratio(levenshtein(a, b) as u64, longest as u64)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = x;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Single-linkage clusters of IRI subjects by label similarity. Returns
/// clusters of two or more members, each sorted, in order of their
/// smallest member.
pub fn label_clusters(g: &Graph, label_predicate: &Iri, tau: &Rational) -> Vec<Vec<Iri>> {
    // first literal label per IRI subject
    let mut labels: BTreeMap<&Iri, &str> = BTreeMap::new();
    for t in g.sorted() {
        if t.predicate() != label_predicate {
            continue;
        }
        if let (Some(s), Some(l)) = (t.subject().as_iri(), t.object().as_literal()) {
            labels.entry(s).or_insert(l.lexical());
        }
    }
    let mut by_label: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let subjects: Vec<&Iri> = labels.keys().copied().collect();
    for (i, s) in subjects.iter().enumerate() {
        by_label.entry(canonical_label(labels[s])).or_default().push(i);
    }
    let mut uf = UnionFind((0..subjects.len()).collect());
    let distinct: Vec<(&String, &Vec<usize>)> = by_label.iter().collect();
    for (_, members) in &distinct {
        for w in members.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    for i in 0..distinct.len() {
        for j in i + 1..distinct.len() {
            if similarity(distinct[i].0, distinct[j].0) >= *tau {
                uf.union(distinct[i].1[0], distinct[j].1[0]);
            }
        }
    }
    let mut clusters: BTreeMap<usize, Vec<Iri>> = BTreeMap::new();
    for (i, s) in subjects.iter().enumerate() {
        clusters.entry(uf.find(i)).or_default().push((*s).clone());
    }
    let mut out: Vec<Vec<Iri>> = clusters
        .into_values()
        .filter(|c| c.len() > 1)
        .map(|mut c| {
            c.sort();
            c
        })
        .collect();
    out.sort();
    out
}

/// Links every member of a multi-member cluster to its smallest IRI with
/// `owl:sameAs`. Nothing is deleted.
pub fn interlink_clusters(g: &Graph, label_predicate: &Iri, tau: &Rational) -> ImprovementAction {
    let mut action = ImprovementAction::new(ActionKind::Interlink, ns::eldv::clustering_data_interlinking());
    for cluster in label_clusters(g, label_predicate, tau) {
        let canonical = Term::Iri(cluster[0].clone());
        for member in &cluster[1..] {
            let s = Term::Iri(member.clone());
            let link = Triple::new(s.clone(), ns::owl::same_as(), canonical.clone()).expect("IRI subject");
            if g.contains(&link) {
                continue;
            }
            action.additions.insert(link);
            action.additions.insert(
                Triple::new(s, ns::eldv::imputed_by(), Term::Iri(ns::eldv::clustering_data_interlinking()))
                    .expect("IRI subject"),
            );
            action.justification.push(format!("{member} sameAs {}", cluster[0]));
        }
    }
    action
}

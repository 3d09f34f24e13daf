//! Transactions over a graph and level-wise apriori mining of
//! single-consequent association rules.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::numeric::{ratio, Rational};
use crate::rdf::{Graph, Iri, Term};
use crate::vocab::ns;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    /// One transaction per subject; items pair predicates with objects.
    ObjectImputation,
    /// One transaction per object; items pair predicates with subjects.
    SubjectImputation,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Item {
    pub predicate: Iri,
    pub partner: Term,
}

impl Item {
    pub fn new(predicate: Iri, partner: Term) -> Self {
        Item { predicate, partner }
    }

    pub fn text(&self) -> String {
        format!("{} {}", self.predicate, self.partner)
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.predicate, self.partner)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    /// Canonical text of the subject (or object) the items belong to.
    pub key: String,
    pub items: BTreeSet<Item>,
}

fn is_numeric_literal(t: &Term) -> bool {
    t.as_literal()
        .is_some_and(|l| ns::xsd::is_numeric(l.datatype().as_str()))
}

/// Items of one subject, numeric literals left out.
pub fn subject_items(g: &Graph, subject: &Term) -> BTreeSet<Item> {
    g.iter()
        .filter(|t| t.subject() == subject && !is_numeric_literal(t.object()))
        .map(|t| Item::new(t.predicate().clone(), t.object().clone()))
        .collect()
}

pub fn build_transactions(g: &Graph, orientation: Orientation) -> Vec<Transaction> {
    let mut map: BTreeMap<&Term, BTreeSet<Item>> = BTreeMap::new();
    match orientation {
        Orientation::ObjectImputation => {
            for t in g {
                let items = map.entry(t.subject()).or_default();
                if !is_numeric_literal(t.object()) {
                    items.insert(Item::new(t.predicate().clone(), t.object().clone()));
                }
            }
        }
        Orientation::SubjectImputation => {
            for t in g {
                if t.subject().as_iri().is_some() && !is_numeric_literal(t.object()) {
                    map.entry(t.object())
                        .or_default()
                        .insert(Item::new(t.predicate().clone(), t.subject().clone()));
                }
            }
        }
    }
    map.into_iter()
        .map(|(k, items)| Transaction {
            key: k.to_ntriples(),
            items,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationRule {
    pub antecedent: BTreeSet<Item>,
    pub consequent: Item,
    pub support: Rational,
    pub confidence: Rational,
    pub orientation: Orientation,
}

impl AssociationRule {
    pub fn text(&self) -> String {
        let lhs: Vec<String> = self.antecedent.iter().map(Item::text).collect();
        format!("{{{}}} => {}", lhs.join(", "), self.consequent.text())
    }
}

impl fmt::Display for AssociationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (support {}, confidence {})",
            self.text(),
            self.support,
            self.confidence
        )
    }
}

/// Frequent itemsets with their absolute counts, as sorted index vectors.
pub fn frequent_itemsets(tx: &[Vec<usize>], min_count: usize) -> BTreeMap<Vec<usize>, usize> {
    let mut all = BTreeMap::new();
    let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for t in tx {
        for &i in t {
            *counts.entry(vec![i]).or_default() += 1;
        }
    }
    let mut level: Vec<Vec<usize>> = counts
        .into_iter()
        .filter(|(_, c)| *c >= min_count)
        .map(|(s, c)| {
            all.insert(s.clone(), c);
            s
        })
        .collect();
    while !level.is_empty() {
        let prev: BTreeSet<&Vec<usize>> = level.iter().collect();
        let mut candidates = BTreeSet::new();
        for (i, a) in level.iter().enumerate() {
            for b in &level[i + 1..] {
                let k = a.len();
                if a[..k - 1] != b[..k - 1] {
                    // level is sorted, so later entries cannot share the prefix
                    break;
                }
                let mut c = a.clone();
                c.push(b[k - 1]);
                // every (k)-subset must itself be frequent
                let pruned = (0..c.len()).any(|skip| {
                    let sub: Vec<usize> = c
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != skip)
                        .map(|(_, &x)| x)
                        .collect();
                    !prev.contains(&sub)
                });
                if !pruned {
                    candidates.insert(c);
                }
            }
        }
        let mut next = Vec::new();
        for c in candidates {
            let n = tx.iter().filter(|t| is_subset(&c, t)).count();
            if n >= min_count {
                all.insert(c.clone(), n);
                next.push(c);
            }
        }
        level = next;
    }
    all
}

/// Both slices sorted ascending.
fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.by_ref().any(|y| y == x))
}

/// Smallest count `c` with `c / n >= min_support`.
fn min_count(n: usize, min_support: &Rational) -> usize {
    let needed = (min_support * Rational::from_integer(n.into())).ceil().to_integer();
    needed.try_into().unwrap_or(usize::MAX).max(1)
}

pub fn sort_rules(rules: &mut [AssociationRule]) {
    rules.sort_by(|a, b| {
        b.confidence
            .cmp(&a.confidence)
            .then_with(|| b.support.cmp(&a.support))
            .then_with(|| a.text().cmp(&b.text()))
    });
}

pub fn mine_apriori(
    transactions: &[Transaction],
    min_support: &Rational,
    min_confidence: &Rational,
    orientation: Orientation,
) -> Vec<AssociationRule> {
    let n = transactions.len();
    if n == 0 {
        return Vec::new();
    }
    let universe: Vec<&Item> = transactions
        .iter()
        .flat_map(|t| t.items.iter())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let id: BTreeMap<&Item, usize> = universe.iter().enumerate().map(|(i, it)| (*it, i)).collect();
    let tx: Vec<Vec<usize>> = transactions
        .iter()
        .map(|t| t.items.iter().map(|i| id[i]).collect())
        .collect();
    let frequent = frequent_itemsets(&tx, min_count(n, min_support));
    let mut rules = Vec::new();
    for (set, &count) in frequent.iter().filter(|(s, _)| s.len() >= 2) {
        for (skip, &c) in set.iter().enumerate() {
            let ante: Vec<usize> = set
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != skip)
                .map(|(_, &x)| x)
                .collect();
            let ante_count = frequent[&ante];
            let confidence = ratio(count as u64, ante_count as u64);
            if &confidence >= min_confidence {
                rules.push(AssociationRule {
                    antecedent: ante.iter().map(|&i| universe[i].clone()).collect(),
                    consequent: universe[c].clone(),
                    support: ratio(count as u64, n as u64),
                    confidence,
                    orientation,
                });
            }
        }
    }
    sort_rules(&mut rules);
    rules
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(name: &str) -> Item {
        Item::new(Iri::new("urn:p").unwrap(), Term::iri(format!("urn:{name}")).unwrap())
    }

    fn tx(sets: &[&str]) -> Vec<Transaction> {
        sets.iter()
            .enumerate()
            .map(|(i, s)| Transaction {
                key: i.to_string(),
                items: s.chars().map(|c| item(&c.to_string())).collect(),
            })
            .collect()
    }

    fn find<'a>(rules: &'a [AssociationRule], ante: &str, cons: &str) -> Option<&'a AssociationRule> {
        rules.iter().find(|r| {
            r.consequent == item(cons) && r.antecedent == ante.chars().map(|c| item(&c.to_string())).collect()
        })
    }

    #[test]
    fn abab_example() {
        let rules = mine_apriori(&tx(&["AB", "AB", "AB", "AC"]), &ratio(1, 2), &ratio(7, 10), Orientation::ObjectImputation);
        let ab = find(&rules, "A", "B").unwrap();
        assert_eq!((ab.support.clone(), ab.confidence.clone()), (ratio(3, 4), ratio(3, 4)));
        let ba = find(&rules, "B", "A").unwrap();
        assert_eq!((ba.support.clone(), ba.confidence.clone()), (ratio(3, 4), ratio(1, 1)));
        assert_eq!(rules[0], *ba);
    }

    #[test]
    fn no_common_item_at_full_support() {
        assert!(mine_apriori(&tx(&["AB", "CD"]), &ratio(1, 1), &ratio(1, 2), Orientation::ObjectImputation).is_empty());
    }

    #[test]
    fn single_transaction() {
        let rules = mine_apriori(&tx(&["AB"]), &ratio(1, 1), &ratio(1, 1), Orientation::ObjectImputation);
        assert_eq!(rules.len(), 2);
        assert!(find(&rules, "A", "B").is_some());
        assert!(find(&rules, "B", "A").is_some());
    }

    #[test]
    fn transactions_skip_numeric_literals() {
        let g = crate::rdf::parse_ntriples(
            b"<urn:s> <urn:a> \"1\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n\
              <urn:s> <urn:b> \"2.5\"^^<http://www.w3.org/2001/XMLSchema#decimal> .\n\
              <urn:s> <urn:c> <urn:x> .\n\
              <urn:s> <urn:d> <urn:y> .\n\
              <urn:t> <urn:c> <urn:x> .\n",
        )
        .unwrap();
        let t = build_transactions(&g, Orientation::ObjectImputation);
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].items.len(), 2);
        let s = build_transactions(&g, Orientation::SubjectImputation);
        // objects urn:x and urn:y
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].items.len(), 2);
    }
}

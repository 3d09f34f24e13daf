use std::collections::BTreeSet;

use super::apriori::{build_transactions, subject_items, AssociationRule, Orientation, Transaction};
use super::{ActionKind, ImprovementAction};
use crate::assess::metrics::Index;
use crate::rdf::{Graph, Iri, Term, Triple};
use crate::vocab::{ns, ShapeRequirement};

/// An (instance, required predicate) pair with no value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Gap {
    pub subject: Term,
    pub class: Iri,
    pub predicate: Iri,
}

pub fn completeness_gaps(g: &Graph, shapes: &[ShapeRequirement]) -> Vec<Gap> {
    let index = Index::new(g);
    let mut gaps = Vec::new();
    for (s, shape) in index.shaped_instances(shapes) {
        for req in &shape.required {
            if !index.has(s, &req.predicate) {
                gaps.push(Gap {
                    subject: s.clone(),
                    class: shape.class_iri.clone(),
                    predicate: req.predicate.clone(),
                });
            }
        }
    }
    gaps
}

/// Transactions of the subjects with no completeness gap.
pub fn clean_transactions(g: &Graph, shapes: &[ShapeRequirement], orientation: Orientation) -> Vec<Transaction> {
    let gapped: BTreeSet<String> = completeness_gaps(g, shapes)
        .into_iter()
        .map(|gap| gap.subject.to_ntriples())
        .collect();
    match orientation {
        Orientation::ObjectImputation => build_transactions(g, orientation)
            .into_iter()
            .filter(|t| !gapped.contains(&t.key))
            .collect(),
        Orientation::SubjectImputation => {
            let clean: Graph = g
                .iter()
                .filter(|t| !gapped.contains(&t.subject().to_ntriples()))
                .cloned()
                .collect();
            build_transactions(&clean, orientation)
        }
    }
}

fn annotation(subject: &Term) -> Triple {
    Triple::new(
        subject.clone(),
        ns::eldv::imputed_by(),
        Term::Iri(ns::eldv::association_rule_mining()),
    )
    .expect("non-literal subject")
}

/// Fills completeness gaps from mined rules. Object-imputation rules fill a
/// gap on the instance directly. Subject-imputation rules add
/// `(s, p, o)` for an object transaction when exactly one shape declares
/// `p` and `s` is an instance of that shape missing `p`.
pub fn impute_missing(g: &Graph, shapes: &[ShapeRequirement], rules: &[AssociationRule]) -> ImprovementAction {
    let mut action = ImprovementAction::new(ActionKind::ImputeTriple, ns::eldv::association_rule_mining());
    let gaps = completeness_gaps(g, shapes);
    let mut filled: BTreeSet<(Term, Iri)> = BTreeSet::new();
    let mut unfilled = 0;
    let object_rules: Vec<&AssociationRule> = rules
        .iter()
        .filter(|r| r.orientation == Orientation::ObjectImputation)
        .collect();
    for gap in &gaps {
        if filled.contains(&(gap.subject.clone(), gap.predicate.clone())) {
            continue;
        }
        let items = subject_items(g, &gap.subject);
        let rule = object_rules
            .iter()
            .find(|r| r.consequent.predicate == gap.predicate && r.antecedent.is_subset(&items));
        match rule {
            Some(r) => {
                let t = Triple::new(gap.subject.clone(), gap.predicate.clone(), r.consequent.partner.clone())
                    .expect("non-literal subject");
                action.additions.insert(t);
                action.additions.insert(annotation(&gap.subject));
                action.justification.push(format!("{} {}: {}", gap.subject, gap.predicate, r.text()));
                filled.insert((gap.subject.clone(), gap.predicate.clone()));
            }
            None => unfilled += 1,
        }
    }

    let subject_rules: Vec<&AssociationRule> = rules
        .iter()
        .filter(|r| r.orientation == Orientation::SubjectImputation)
        .collect();
    if !subject_rules.is_empty() {
        let open: BTreeSet<(Term, Iri)> = gaps
            .iter()
            .filter(|g| !filled.contains(&(g.subject.clone(), g.predicate.clone())))
            .filter(|g| shapes.iter().filter(|s| s.required.iter().any(|r| r.predicate == g.predicate)).count() == 1)
            .map(|g| (g.subject.clone(), g.predicate.clone()))
            .collect();
        let objects: std::collections::BTreeMap<String, &Term> =
            g.iter().map(|t| (t.object().to_ntriples(), t.object())).collect();
        for tx in build_transactions(g, Orientation::SubjectImputation) {
            let Some(&object) = objects.get(&tx.key) else {
                continue;
            };
            for r in &subject_rules {
                if !r.antecedent.is_subset(&tx.items) || tx.items.contains(&r.consequent) {
                    continue;
                }
                let key = (r.consequent.partner.clone(), r.consequent.predicate.clone());
                if open.contains(&key) && !filled.contains(&key) {
                    let t = Triple::new(key.0.clone(), key.1.clone(), object.clone()).expect("non-literal subject");
                    action.additions.insert(t);
                    action.additions.insert(annotation(&key.0));
                    action.justification.push(format!("{} {}: {}", key.0, key.1, r.text()));
                    filled.insert(key);
                }
            }
        }
        unfilled = gaps.len() - filled.len();
    }
    if unfilled > 0 {
        action
            .justification
            .push(format!("{unfilled} gap(s) left open: no applicable rule"));
    }
    action
}

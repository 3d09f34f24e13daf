//! Quality improvement: rule-mining imputation, label interlinking,
//! regression gap-fill and ETL repairs, each emitting a patch and precision
//! records.

pub mod apriori;
pub mod etl;
pub mod impute;
pub mod interlink;
pub mod regress;
pub mod svr;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde_json::{json, Value};

pub use apriori::{build_transactions, mine_apriori, AssociationRule, Item, Orientation, Transaction};
pub use etl::{etl_normalize, etl_steps, EtlStep};
pub use impute::{clean_transactions, completeness_gaps, impute_missing, Gap};
pub use interlink::{canonical_label, interlink_clusters, levenshtein, similarity};
pub use regress::regress_fill;
pub use svr::{train_svr, RegressionModel, SvrError};

use crate::assess::{assess, AssessOptions, AssessmentReport};
use crate::numeric::{format_decimal, Rational};
use crate::rdf::{Graph, Iri, Triple};
use crate::vocab::QualityPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionKind {
    ImputeTriple,
    Interlink,
    RegressFill,
    UnitNormalize,
    Dedupe,
    AlignTimestamp,
    FlagOutlier,
}

impl ActionKind {
    pub fn name(self) -> &'static str {
        match self {
            ActionKind::ImputeTriple => "ImputeTriple",
            ActionKind::Interlink => "Interlink",
            ActionKind::RegressFill => "RegressFill",
            ActionKind::UnitNormalize => "UnitNormalize",
            ActionKind::Dedupe => "Dedupe",
            ActionKind::AlignTimestamp => "AlignTimestamp",
            ActionKind::FlagOutlier => "FlagOutlier",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImprovementAction {
    pub kind: ActionKind,
    pub additions: BTreeSet<Triple>,
    pub deletions: BTreeSet<Triple>,
    pub method_iri: Iri,
    pub justification: Vec<String>,
    /// Statements collapsed by deduplication.
    pub duplicates_removed: usize,
}

impl ImprovementAction {
    pub fn new(kind: ActionKind, method_iri: Iri) -> Self {
        ImprovementAction {
            kind,
            additions: BTreeSet::new(),
            deletions: BTreeSet::new(),
            method_iri,
            justification: Vec::new(),
            duplicates_removed: 0,
        }
    }

    /// Drops additions already in `g`, deletions not in `g`, and anything
    /// both added and deleted.
    pub fn prune(&mut self, g: &Graph) {
        let both: BTreeSet<Triple> = self.additions.intersection(&self.deletions).cloned().collect();
        self.additions.retain(|t| !both.contains(t) && !g.contains(t));
        self.deletions.retain(|t| !both.contains(t) && g.contains(t));
    }

    pub fn is_empty(&self) -> bool {
        self.additions.is_empty() && self.deletions.is_empty() && self.duplicates_removed == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.name(),
            "method": self.method_iri.as_str(),
            "additions": self.additions.len(),
            "deletions": self.deletions.len(),
            "duplicatesRemoved": self.duplicates_removed,
            "justification": self.justification,
        })
    }
}

/// Applies deletions, then additions. Raw statement counts move with the
/// patch; a dedupe action resets them to the distinct count.
pub fn apply_action(g: &mut Graph, action: &ImprovementAction) {
    for t in &action.deletions {
        g.remove(t);
    }
    for t in &action.additions {
        if !g.contains(t) {
            g.insert(t.clone());
        }
    }
    if action.kind == ActionKind::Dedupe {
        g.set_raw_statement_count(g.len());
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecisionRecord {
    pub metric_id: String,
    pub before: Rational,
    pub after: Rational,
    pub delta: Rational,
    pub method_iri: Iri,
}

impl PrecisionRecord {
    pub fn new(metric_id: &str, before: Rational, after: Rational, method_iri: Iri) -> Self {
        PrecisionRecord {
            metric_id: metric_id.to_string(),
            delta: &after - &before,
            before,
            after,
            method_iri,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "metricId": self.metric_id,
            "method": self.method_iri.as_str(),
            "before": format_decimal(&self.before, 12),
            "after": format_decimal(&self.after, 12),
            "delta": format_decimal(&self.delta, 12),
            "exactDelta": self.delta.to_string(),
        })
    }
}

/// An improver supplied at run time. Runs after the built-in families.
pub type ImproverFn = Arc<dyn Fn(&Graph, &AssessmentReport, &QualityPolicy) -> Vec<ImprovementAction> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    Etl,
    Interlink,
    Impute,
    Regress,
}

/// Families to run for the failing metrics, in execution order, with the
/// ETL steps they need.
pub fn route(failing: &BTreeSet<String>) -> (BTreeSet<Family>, Vec<EtlStep>) {
    let mut families = BTreeSet::new();
    let mut steps = BTreeSet::new();
    for id in failing {
        match id.as_str() {
            "completeness" => {
                families.insert(Family::Impute);
                families.insert(Family::Regress);
            }
            "consistency" => {
                families.insert(Family::Etl);
                steps.insert(EtlStep::UnitNormalize);
                steps.insert(EtlStep::AlignTimestamp);
            }
            "semanticAccuracy" => {
                families.insert(Family::Etl);
                steps.insert(EtlStep::FlagOutlier);
            }
            "compactness" => {
                families.insert(Family::Etl);
                steps.insert(EtlStep::Dedupe);
            }
            "interlinking" => {
                families.insert(Family::Interlink);
            }
            _ => {}
        }
    }
    (families, steps.into_iter().collect())
}

#[derive(Debug, Clone)]
pub struct ImproveOutcome {
    pub graph: Graph,
    pub actions: Vec<ImprovementAction>,
    pub precision: Vec<PrecisionRecord>,
}

impl ImproveOutcome {
    pub fn additions(&self) -> Graph {
        self.actions.iter().flat_map(|a| a.additions.iter().cloned()).collect()
    }

    pub fn deletions(&self) -> Graph {
        self.actions.iter().flat_map(|a| a.deletions.iter().cloned()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "actions": self.actions.iter().map(ImprovementAction::to_json).collect::<Vec<_>>(),
            "precision": self.precision.iter().map(PrecisionRecord::to_json).collect::<Vec<_>>(),
        })
    }
}

pub fn improve(g: &Graph, report: &AssessmentReport, policy: &QualityPolicy, opts: &AssessOptions) -> ImproveOutcome {
    improve_with(g, report, policy, opts, &[])
}

/// Runs the families routed from the failing metrics, in the fixed order
/// etl, interlink, impute, regress, then the extra improvers. After each
/// family the failing metrics are re-assessed, giving one precision record
/// per (metric, method); the records chain, so their deltas sum to the
/// overall change.
pub fn improve_with(
    g: &Graph,
    report: &AssessmentReport,
    policy: &QualityPolicy,
    opts: &AssessOptions,
    extra: &[ImproverFn],
) -> ImproveOutcome {
    let failing = report.failing_metrics();
    let (families, steps) = route(&failing);
    let params = &policy.improvement;
    let mut current = g.clone();
    let mut values: BTreeMap<String, Rational> = report
        .measurements
        .iter()
        .map(|m| (m.metric_id.clone(), m.value.clone()))
        .collect();
    let mut actions = Vec::new();
    let mut precision = Vec::new();

    let mut run_step = |current: &mut Graph, step: Vec<ImprovementAction>, method: Iri| {
        let changed = step.iter().any(|a| !a.is_empty());
        for a in &step {
            apply_action(current, a);
        }
        let after: BTreeMap<String, Rational> = if changed {
            assess(current, policy, opts)
                .measurements
                .into_iter()
                .map(|m| (m.metric_id, m.value))
                .collect()
        } else {
            values.clone()
        };
        for id in &failing {
            if let (Some(b), Some(a)) = (values.get(id), after.get(id)) {
                precision.push(PrecisionRecord::new(id, b.clone(), a.clone(), method.clone()));
            }
        }
        values = after;
        actions.extend(step);
    };

    for family in &families {
        let (step, method) = match family {
            Family::Etl => (
                etl_steps(&current, &policy.shapes, &opts.units, params.grid_seconds, &steps),
                crate::vocab::ns::eldv::etl(),
            ),
            Family::Interlink => (
                vec![interlink_clusters(&current, &params.label_predicate, &params.tau)],
                crate::vocab::ns::eldv::clustering_data_interlinking(),
            ),
            Family::Impute => {
                let tx = clean_transactions(&current, &policy.shapes, Orientation::ObjectImputation);
                let rules = mine_apriori(&tx, &params.min_support, &params.min_confidence, Orientation::ObjectImputation);
                log::debug!("mined {} rules from {} clean transactions", rules.len(), tx.len());
                (
                    vec![impute_missing(&current, &policy.shapes, &rules)],
                    crate::vocab::ns::eldv::association_rule_mining(),
                )
            }
            Family::Regress => (
                vec![regress_fill(&current, &policy.shapes, params.grid_seconds, &params.svr)],
                crate::vocab::ns::eldv::support_vector_regression(),
            ),
        };
        run_step(&mut current, step, method);
    }
    for improver in extra {
        let step = improver(&current, report, policy);
        let Some(method) = step.first().map(|a| a.method_iri.clone()) else {
            continue;
        };
        run_step(&mut current, step, method);
    }
    ImproveOutcome {
        graph: current,
        actions,
        precision,
    }
}

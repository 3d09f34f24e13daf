//! One check per acceptance criterion. Each returns a short detail line on
//! success and the reason on failure.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::{Duration as StdDuration, Instant};

use chrono::{DateTime, Duration, Utc};
use ldq::assess::{assess, emit_report_graph, report_ntriples, report_turtle, AssessOptions, AssessmentReport, FixtureProbe};
use ldq::facade::fixture::{gen_fixture, DefectKind, FixtureConfig};
use ldq::improve::{
    apply_action, etl_normalize, improve, mine_apriori, regress_fill, train_svr, ActionKind, Item, Orientation,
    Transaction,
};
use ldq::numeric::{int, parse_decimal, ratio, to_f64, Rational};
use ldq::pipeline::{run_pipeline, PipelineInput, RunOptions, Terminal};
use ldq::rdf::{parse_ntriples, parse_turtle_subset, serialize_ntriples, Graph, Term};
use ldq::vocab::{convert_unit, ns, Dimension, DimensionCategory, SvrHyper, UnitTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{data_req, load, oracles, shape, Loaded};

pub type Outcome = Result<String, String>;
pub type Check = fn() -> Outcome;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

pub fn run_options(fx: &Loaded, id: &str) -> RunOptions {
    let mut opts = RunOptions::new(fx.policy.reference_time.unwrap(), 42);
    opts.dataset_id = Some(id.into());
    opts.extra_vocab = fx.vocab.clone();
    opts
}

pub fn assess_options(fx: &Loaded, id: &str) -> AssessOptions {
    AssessOptions::new(id, fx.policy.reference_time.unwrap())
        .seed(42)
        .extra_vocab(fx.vocab.clone())
}

// 1
pub fn parser_round_trip() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = super::gen::random_graph(&mut rng, 2000);
        total += g.len();
        let back = parse_ntriples(&serialize_ntriples(&g)).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(back == g, "seed {seed}: graph changed");
    }
    let took = start.elapsed();
    ensure!(took < StdDuration::from_secs(10), "took {took:?}");
    Ok(format!("200 graphs, {total} triples, {took:.2?}"))
}

// 2
fn item(i: usize) -> Item {
    Item::new(super::iri("urn:p"), Term::iri(format!("urn:o{i}")).unwrap())
}

fn item_index(it: &Item) -> usize {
    it.partner.as_iri().unwrap().as_str()["urn:o".len()..].parse().unwrap()
}

pub fn apriori_case(seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let universe = rng.random_range(1..=8usize);
    let n = rng.random_range(0..=12usize);
    let sets: Vec<BTreeSet<usize>> = (0..n)
        .map(|_| (0..universe).filter(|_| rng.random_bool(0.5)).collect())
        .collect();
    let min_support = ratio(rng.random_range(1..=12), 12);
    let min_confidence = ratio(rng.random_range(1..=10), 10);
    let tx: Vec<Transaction> = sets
        .iter()
        .enumerate()
        .map(|(k, s)| Transaction {
            key: format!("t{k}"),
            items: s.iter().map(|&i| item(i)).collect(),
        })
        .collect();
    let mined: oracles::RuleTable = mine_apriori(&tx, &min_support, &min_confidence, Orientation::ObjectImputation)
        .into_iter()
        .map(|r| {
            (
                (r.antecedent.iter().map(item_index).collect(), item_index(&r.consequent)),
                (r.support, r.confidence),
            )
        })
        .collect();
    let expected = oracles::brute_force_rules(&sets, universe, &min_support, &min_confidence);
    if mined != expected {
        return Err(format!(
            "seed {seed}: mined {} rules, oracle {} (support {min_support}, confidence {min_confidence})",
            mined.len(),
            expected.len()
        ));
    }
    Ok(mined.len())
}

pub fn apriori_oracle() -> Outcome {
    let mut rules = 0;
    for seed in 0..100 {
        rules += apriori_case(seed)?;
    }
    Ok(format!("100 transaction sets, {rules} rules matched"))
}

// 3
pub fn metric_hand_counts() -> Outcome {
    let cases = super::hand_counts::all();
    let wrong: Vec<&str> = cases.iter().filter(|c| !c.holds()).map(|c| c.name).collect();
    ensure!(wrong.is_empty(), "mismatch: {}", wrong.join(", "));
    Ok(format!("{} hand counts", cases.len()))
}

// 4
pub fn defect_recovery() -> Outcome {
    let fx = load("recoverable");
    ensure!(fx.graph.subjects().len() >= 100, "only {} subjects", fx.graph.subjects().len());
    ensure!(fx.policy.improvement.min_confidence == int(1), "minConfidence is not 1");
    let opts = assess_options(&fx, "recoverable");
    let before = assess(&fx.graph, &fx.policy, &opts);
    let out = improve(&fx.graph, &before, &fx.policy, &opts);
    let after = assess(&out.graph, &fx.policy, &opts);

    let truth: BTreeSet<(String, String, String)> = fx
        .manifest
        .ground_truth(DefectKind::MissingObject)
        .iter()
        .filter(|g| g.recoverable_by.as_deref() == Some(ns::eldv::ASSOCIATION_RULE_MINING))
        .map(|g| (g.subject.clone(), g.predicate.clone().unwrap(), g.original.clone().unwrap()))
        .collect();
    let mut recovered = 0;
    let mut wrong = Vec::new();
    for a in out.actions.iter().filter(|a| a.kind == ActionKind::ImputeTriple) {
        // provenance marks aside, every addition is an imputed value
        for t in a.additions.iter().filter(|t| t.predicate().as_str() != ns::eldv::IMPUTED_BY) {
            let (Some(s), Some(o)) = (t.subject().as_iri(), t.object().as_iri()) else {
                wrong.push(format!("{t:?}"));
                continue;
            };
            let key = (s.as_str().to_string(), t.predicate().as_str().to_string(), o.as_str().to_string());
            if truth.contains(&key) {
                recovered += 1;
            } else {
                wrong.push(format!("{t:?}"));
            }
        }
    }
    ensure!(wrong.is_empty(), "{} incorrect additions, e.g. {}", wrong.len(), wrong[0]);
    ensure!(!truth.is_empty(), "no rule-recoverable removals in the manifest");
    ensure!(recovered * 100 >= truth.len() * 95, "recovered {recovered}/{}", truth.len());

    let (b, a) = (before.value("completeness").unwrap(), after.value("completeness").unwrap());
    ensure!(a > b, "completeness {b} -> {a}");
    let records: Vec<_> = out.precision.iter().filter(|p| p.metric_id == "completeness").collect();
    let sum: Rational = records.iter().map(|p| p.delta.clone()).sum();
    ensure!(sum == a - b, "deltas sum {sum}, re-assessed {}", a - b);
    // the rule-mining record alone, against a fresh assessment of its patch
    let arm = records
        .iter()
        .find(|p| p.method_iri.as_str() == ns::eldv::ASSOCIATION_RULE_MINING)
        .ok_or("no rule-mining precision record")?;
    let mut g = fx.graph.clone();
    for act in out.actions.iter().filter(|a| a.kind == ActionKind::ImputeTriple) {
        apply_action(&mut g, act);
    }
    let mid = assess(&g, &fx.policy, &opts);
    ensure!(arm.delta == mid.value("completeness").unwrap() - b, "rule-mining delta {} differs", arm.delta);
    Ok(format!(
        "{recovered}/{} recovered, 0 incorrect, completeness {} -> {}",
        truth.len(),
        ldq::numeric::format_decimal(b, 6),
        ldq::numeric::format_decimal(a, 6)
    ))
}

// 5
pub fn t0() -> DateTime<Utc> {
    "2024-05-01T00:00:00Z".parse().unwrap()
}

/// 24 hourly readings of `2 + h/2` with hour 13 left without a value;
/// returns the filled value.
pub fn fill_hour_13() -> Result<Rational, String> {
    const C: &str = "urn:e#Consumption";
    let mut text = String::new();
    for h in 0..24 {
        let s = format!("<urn:m:{h}>");
        let at = ldq::ingest::format_timestamp(&(t0() + Duration::hours(h)));
        text += &format!("{s} <{}> <{C}> .\n", ns::rdf::TYPE);
        text += &format!("{s} <urn:eldv#source> <urn:src:m1> .\n");
        text += &format!("{s} <urn:eldv#observedAt> \"{at}\"^^<{}> .\n", ns::xsd::DATE_TIME);
        if h != 13 {
            text += &format!("{s} <urn:e#energy> \"{}\"^^<{}> .\n", 2.0 + h as f64 / 2.0, ns::xsd::DECIMAL);
        }
    }
    let g = super::nt(&text);
    let shapes = [shape(C, vec![data_req("urn:e#energy", ns::xsd::DECIMAL, None)])];
    let action = regress_fill(&g, &shapes, 3600, &SvrHyper::default());
    let filled: Vec<_> = action
        .additions
        .iter()
        .filter(|t| t.predicate().as_str() == "urn:e#energy")
        .collect();
    ensure!(filled.len() == 1, "{} values filled", filled.len());
    ensure!(filled[0].subject() == &Term::iri("urn:m:13").unwrap(), "filled {:?}", filled[0].subject());
    parse_decimal(filled[0].object().as_literal().unwrap().lexical()).ok_or_else(|| "unparseable fill".into())
}

/// Largest relative gap between SVR and OLS predictions on the training
/// points of y = 2 tNorm + 1.
pub fn svr_vs_ols() -> Result<f64, String> {
    let n = 20;
    let points: Vec<(DateTime<Utc>, f64)> = (0..n)
        .map(|i| (t0() + Duration::hours(i), 2.0 * i as f64 / (n - 1) as f64 + 1.0))
        .collect();
    let model = train_svr(&points, &SvrHyper::default()).map_err(|e| e.to_string())?;
    let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (a, b) = oracles::ols(&xs, &ys);
    Ok(points
        .iter()
        .zip(&xs)
        .map(|((t, _), x)| {
            let ols = a + b * x;
            (model.predict(t) - ols).abs() / ols.abs()
        })
        .fold(0.0, f64::max))
}

pub fn regression_fill() -> Outcome {
    let v = fill_hour_13()?;
    let truth = 2.0 + 13.0 / 2.0;
    let rel = (to_f64(&v) - truth).abs() / truth;
    ensure!(rel < 0.05, "filled {v}, truth {truth}, rel {rel}");
    let worst = svr_vs_ols()?;
    ensure!(worst < 0.02, "SVR off OLS by {worst}");
    Ok(format!("fill rel err {rel:.2e}, SVR vs OLS max rel {worst:.2e}"))
}

// 6
pub fn etl_exactness() -> Outcome {
    let units = UnitTable::builtin();
    let j = convert_unit(&int(1), units.lookup("kWh").unwrap(), Dimension::Energy).map_err(|e| e.to_string())?;
    ensure!(j == int(3_600_000), "1 kWh = {j} J");
    let k = convert_unit(&int(0), units.lookup("°C").unwrap(), Dimension::Temperature).map_err(|e| e.to_string())?;
    ensure!(k == ratio(27315, 100), "0 °C = {k} K");
    let fx = load("defects");
    let grid = fx.policy.improvement.grid_seconds;
    let once = normalized(&fx.graph, &fx);
    let twice = normalized(&once, &fx);
    ensure!(serialize_ntriples(&once) == serialize_ntriples(&twice), "second pass changed the graph");
    ensure!(once.raw_statement_count() == twice.raw_statement_count(), "raw counts differ");
    let changed: usize = etl_normalize(&fx.graph, &fx.policy.shapes, &units, grid)
        .iter()
        .map(|a| a.additions.len() + a.deletions.len())
        .sum();
    ensure!(changed > 0, "first pass changed nothing");
    Ok(format!("first pass touched {changed} triples, second none"))
}

pub fn normalized(g: &Graph, fx: &Loaded) -> Graph {
    let mut out = g.clone();
    for a in etl_normalize(g, &fx.policy.shapes, &UnitTable::builtin(), fx.policy.improvement.grid_seconds) {
        apply_action(&mut out, &a);
    }
    out
}

// 7
pub fn dereferenceability() -> Outcome {
    let fx = load("clean");
    let probe = FixtureProbe::from_pairs([
        ("http://ex.org/ok1", 200, 5),
        ("http://ex.org/ok2", 204, 5),
        ("http://ex.org/gone", 404, 5),
        ("http://ex.org/down", 503, 5),
    ]);
    let g = super::nt(
        "<http://ex.org/ok1> <urn:p> <http://ex.org/gone> .\n\
         <http://ex.org/ok2> <urn:p> <http://ex.org/down> .\n\
         <urn:local> <urn:p> <http://ex.org/ok1> .\n",
    );
    let report = assess(&g, &fx.policy, &assess_options(&fx, "probe").probe(Arc::new(probe)));
    let v = report.value("availability").ok_or("availability not measured")?;
    ensure!(*v == ratio(1, 2), "availability {v}");
    Ok("availability = 1/2 from the fixture probe".into())
}

// 8
pub fn check_report_shape(report: &AssessmentReport) -> Result<usize, String> {
    let g = parse_ntriples(&report_ntriples(report)).map_err(|e| e.to_string())?;
    ensure!(g == emit_report_graph(report), "N-Triples re-parse differs");
    let ttl = parse_turtle_subset(&report_turtle(report)).map_err(|e| e.to_string())?;
    ensure!(ttl == g, "Turtle re-parse differs");
    let categories: BTreeSet<String> = [
        DimensionCategory::Accessibility,
        DimensionCategory::Intrinsic,
        DimensionCategory::RdfLevel,
        DimensionCategory::TaskDependent,
    ]
    .iter()
    .map(|c| c.iri().as_str().to_string())
    .collect();
    let nodes = g.by_subject();
    ensure!(nodes.len() == report.measurements.len(), "{} nodes for {} measurements", nodes.len(), report.measurements.len());
    for (node, triples) in &nodes {
        let mut by_pred: BTreeMap<&str, Vec<&Term>> = BTreeMap::new();
        for t in triples {
            by_pred.entry(t.predicate().as_str()).or_default().push(t.object());
        }
        for p in [ns::dqv::IS_MEASUREMENT_OF, ns::dqv::VALUE, ns::dqv::IN_DIMENSION, ns::dqv::COMPUTED_ON] {
            ensure!(by_pred.get(p).map_or(0, Vec::len) == 1, "{node:?} has not exactly one {p}");
        }
        let value = by_pred[ns::dqv::VALUE][0]
            .as_literal()
            .and_then(|l| parse_decimal(l.lexical()))
            .ok_or_else(|| format!("{node:?} value is not a decimal"))?;
        ensure!(value >= int(0) && value <= int(1), "{node:?} value {value}");
        let dim = by_pred[ns::dqv::IN_DIMENSION][0].as_iri().map(|i| i.as_str().to_string());
        ensure!(dim.is_some_and(|d| categories.contains(&d)), "{node:?} dimension outside the four");
    }
    Ok(nodes.len())
}

pub fn report_shape() -> Outcome {
    let mut reports = 0;
    let mut nodes = 0;
    for name in ["clean", "recoverable", "defects"] {
        let fx = load(name);
        let run = run_pipeline(PipelineInput::Graph(&fx.graph), &fx.policy, &run_options(&fx, name))
            .map_err(|e| e.to_string())?;
        for (report, _) in &run.history {
            nodes += check_report_shape(report).map_err(|e| format!("{name} round {}: {e}", report.round))?;
            reports += 1;
        }
    }
    Ok(format!("{reports} reports, {nodes} measurement nodes"))
}

// 9
pub fn pipeline_contract() -> Outcome {
    let clean = load("clean");
    let run = run_pipeline(PipelineInput::Graph(&clean.graph), &clean.policy, &run_options(&clean, "clean"))
        .map_err(|e| e.to_string())?;
    ensure!(run.terminal == Terminal::Passed && run.history.len() == 1, "clean: {:?} after {}", run.terminal, run.history.len());

    let rec = load("recoverable");
    let run = run_pipeline(PipelineInput::Graph(&rec.graph), &rec.policy, &run_options(&rec, "recoverable"))
        .map_err(|e| e.to_string())?;
    ensure!(run.terminal == Terminal::Passed && run.round <= 2, "recoverable: {:?} at round {}", run.terminal, run.round);
    let recovered_in = run.round;

    // fixpoint: a passed dataset yields an empty patch
    let again = run_pipeline(PipelineInput::Graph(&run.graph), &rec.policy, &run_options(&rec, "fixpoint"))
        .map_err(|e| e.to_string())?;
    ensure!(again.terminal == Terminal::Passed && again.round == 0, "fixpoint: {:?}", again.terminal);
    ensure!(again.actions.iter().all(|a| a.is_empty()), "fixpoint produced a patch");
    ensure!(again.graph == run.graph, "fixpoint changed the graph");

    let g = super::unrecoverable_graph();
    let run = run_pipeline(PipelineInput::Graph(&g), &clean.policy, &run_options(&clean, "stuck")).map_err(|e| e.to_string())?;
    ensure!(
        run.terminal == Terminal::NoImprovement && run.round < clean.policy.max_rounds,
        "unrecoverable: {:?} at round {}",
        run.terminal,
        run.round
    );
    Ok(format!(
        "clean Passed in 1 assessment, recoverable Passed at round {recovered_in}, unrecoverable NoImprovement at round {}",
        run.round
    ))
}

// 10
pub fn cli_service_parity() -> Outcome {
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?;
    rt.block_on(super::parity::assess_both("clean"))
        .and_then(|()| rt.block_on(super::parity::assess_both("defects")))?;
    Ok("clean and defects: N-Triples identical, JSON equal".into())
}

// 11
pub fn end_to_end_budget() -> Outcome {
    let cfg: FixtureConfig = serde_json::from_slice(&super::read_fixture("configs", "large.json")).map_err(|e| e.to_string())?;
    let fixture = gen_fixture(&cfg).map_err(|e| e.to_string())?;
    let g = parse_ntriples(&fixture.dataset_ntriples()).map_err(|e| e.to_string())?;
    ensure!(g.len() >= 10_000, "only {} triples", g.len());
    let policy = fixture.policy();
    let mut opts = RunOptions::new(policy.reference_time.unwrap(), 42);
    opts.extra_vocab = ldq::ingest::mapping_vocab(&fixture.mapping_rules());
    let start = Instant::now();
    let run = run_pipeline(PipelineInput::Graph(&g), &policy, &opts).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure!(took < StdDuration::from_secs(60), "took {took:?}");
    Ok(format!("{} triples, {:?} after {} round(s), {took:.2?}", g.len(), run.terminal, run.round))
}

pub fn all() -> Vec<(&'static str, Check)> {
    vec![
        ("parser round-trip", parser_round_trip),
        ("apriori oracle equivalence", apriori_oracle),
        ("metric hand counts", metric_hand_counts),
        ("injected-defect recovery", defect_recovery),
        ("regression fill", regression_fill),
        ("unit and ETL exactness", etl_exactness),
        ("dereferenceability", dereferenceability),
        ("DQV report shape", report_shape),
        ("pipeline contract", pipeline_contract),
        ("CLI/service parity", cli_service_parity),
        ("end-to-end budget", end_to_end_budget),
    ]
}

//! The dqv/eldv vocabulary, the unit table, and the two policy files.

pub mod datatypes;
pub mod ns;
mod policy;
mod units;

pub use policy::{
    load_policy, DimensionCategory, ImprovementParams, MetricDefinition, ParamValue, PolicyError,
    PredicateRequirement, ProbeEntry, QualityPolicy, ShapeRequirement, SvrHyper,
};
pub use units::{convert_unit, from_canonical, Dimension, UnitEntry, UnitError, UnitTable};

use crate::rdf::{parse_turtle_subset, Graph};

/// Turtle source of the built-in vocabulary.
pub const ELDV_TURTLE: &str = include_str!("../../vocab/eldv.ttl");

/// The eldv extension vocabulary as a graph.
pub fn builtin_vocab() -> Graph {
    parse_turtle_subset(ELDV_TURTLE.as_bytes()).expect("built-in vocabulary parses")
}

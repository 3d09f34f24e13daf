//! Quality engine for energy-domain linked data.
//!
//! Raw energy records are mapped to RDF ([`ingest`]), measured along four
//! dimension sets ([`assess`]), and repaired by threshold-triggered
//! improvement methods ([`improve`]) inside a bounded assess/improve loop
//! ([`pipeline`]). Reports are DQV graphs with an `eldv` extension
//! ([`vocab`]).

pub mod assess;
pub mod facade;
pub mod improve;
pub mod ingest;
pub mod numeric;
pub mod pipeline;
pub mod rdf;
pub mod vocab;

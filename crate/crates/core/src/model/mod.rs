//! Belief networks, influence diagrams, CNF theories and evidence, with
//! their text formats.

mod cnf;
mod evidence;
mod network;
mod uai;

pub use cnf::{parse_cnf, write_cnf, Clause, CnfTheory};
pub use evidence::Evidence;
pub use network::{BeliefNetwork, InfluenceDiagram, Variable, NORMALIZATION_TOLERANCE};
pub use uai::{
    parse_bayes, parse_evidence, parse_influence_diagram, parse_network, write_bayes, write_evidence,
    write_influence_diagram, write_model, Model, NetworkKind, ParseOptions,
};

/// A parsed model together with any non-fatal diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub model: T,
    pub warnings: Vec<String>,
}

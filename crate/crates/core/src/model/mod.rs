//! Reaction networks with rational propensities: the data model, the text
//! DSL, and the canonical JSON form.

mod constraint;
mod json;
mod network;
mod parser;

pub use constraint::{CmpOp, LinearCondition, StateConstraint};
pub use json::{network_from_json, network_to_json};
pub(crate) use network::shift_state;
pub use network::{Propensity, Reaction, ReactionNetwork};
pub use parser::{parse_expression, parse_network, parse_polynomial, parse_template, NetworkTemplate};

/// A lattice point `x ∈ ℕⁿ`.
pub type State = Vec<u32>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}, column {col}: negative stoichiometric coefficient")]
    NegativeStoichiometry { line: usize, col: usize },
    #[error("reaction {}: net change is zero{}", reaction + 1, at_line(*line))]
    ZeroNetChange { reaction: usize, line: Option<usize> },
    #[error("reaction {}: rate constant must be positive{}", reaction + 1, at_line(*line))]
    NonPositiveRate { reaction: usize, line: Option<usize> },
    #[error("network has no reactions")]
    EmptyNetwork,
    #[error("line {line}, column {col}: unknown identifier `{name}`")]
    UnknownIdentifier { line: usize, col: usize, name: String },
    #[error("common denominator is not positive at state {state:?}")]
    NonPositiveDenominator { state: State },
    #[error("reaction {}: negative propensity at state {state:?}", reaction + 1)]
    NegativePropensity { reaction: usize, state: State },
    #[error("reaction {}: fires from {state:?} out of the state space", reaction + 1)]
    LeavesStateSpace { reaction: usize, state: State },
    #[error("invalid network: {0}")]
    Invalid(String),
}

fn at_line(line: Option<usize>) -> String {
    line.map(|l| format!(" (line {l})")).unwrap_or_default()
}

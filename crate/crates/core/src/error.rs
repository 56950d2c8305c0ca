use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid plant:\n{}", render_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

fn render_violations(v: &[Violation]) -> String {
    v.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtlError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("atom `{name}` at offset {pos} is not declared")]
    UndeclaredAtom { name: String, pos: usize },
}

#[derive(Debug, Error)]
pub enum ConstraintError {
    #[error(transparent)]
    Ltl(#[from] LtlError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("labeling entry ({q},{sigma},{o:?}) is not a valid extended event")]
    UnknownEvent { q: String, sigma: String, o: String },
    #[error("labeling uses atom `{0}` which is not declared")]
    UndeclaredAtom(String),
    #[error("invalid template parameters: {0}")]
    Template(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagnoserError {
    #[error("`{0}` is not an output symbol of the plant")]
    UnknownSymbol(String),
    #[error("observation is infeasible under the sensor constraint at step {step}")]
    InfeasibleObservation { step: usize },
}

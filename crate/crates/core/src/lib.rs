//! Diagnosability analysis of discrete-event systems observed through
//! unreliable sensors whose behavior is restricted by an LTL constraint.
//!
//! The pipeline is: plant ([`model`]) and sensor constraint ([`constraint`],
//! usually produced by [`templates`]) → Büchi automaton ([`ltl`]) → augmented,
//! constrained and verification systems ([`synthesis`]) → verdict
//! ([`checker`]). [`diagnoser`] runs the online observer and [`oracle`] holds
//! brute-force cross-checks.

pub mod checker;
pub mod constraint;
pub mod diagnoser;
pub mod dot;
pub mod error;
pub mod graph;
pub mod lasso;
pub mod ltl;
pub mod model;
pub mod oracle;
pub mod synthesis;
pub mod templates;

pub use checker::{check, Verdict};
pub use constraint::SensorConstraint;
pub use error::{ConstraintError, DiagnoserError, LtlError, ModelError};
pub use lasso::Lasso;
pub use model::{ExtendedEvent, Output, PlantModel, PlantSpec};

//! The augmented plant G̃, the observation-constrained system T = G̃ × NBA and
//! the verification system V (the twin plant of T).
//!
//! Every construction keeps only the part reachable from its initial states,
//! explored breadth-first with successors in lexicographic order, so state
//! numbering and therefore all derived output is reproducible.

mod augment;
mod constrain;
mod verifier;

pub use augment::{augment, AugmentedSystem, Mode};
pub use constrain::{constrain, ConstrainedSystem, TState};
pub use verifier::{build_verifier, project_pair, PairEvent, VerificationSystem};

//! Online diagnosis: track the set of feasible T-states consistent with the
//! observations so far and raise an alarm once every one of them is faulty.

use std::collections::BTreeSet;

use crate::error::DiagnoserError;
use crate::model::{Output, PlantModel};
use crate::synthesis::ConstrainedSystem;

pub type Belief = BTreeSet<usize>;

#[derive(Debug, Clone)]
pub struct Diagnoser<'a> {
    model: &'a PlantModel,
    t: &'a ConstrainedSystem,
}

impl<'a> Diagnoser<'a> {
    /// `t` must have been built from `model`.
    pub fn new(model: &'a PlantModel, t: &'a ConstrainedSystem) -> Self {
        Self { model, t }
    }

    // silent closure, staying inside the feasible part
    fn closure(&self, mut frontier: Vec<usize>) -> Belief {
        let mut seen: Belief = frontier.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            for &(e, y) in self.t.edges_from(x) {
                if e.output.is_silent() && self.t.is_feasible(y) && seen.insert(y) {
                    frontier.push(y);
                }
            }
        }
        seen
    }

    /// Belief before any observation. Empty when no φ-compatible run exists.
    pub fn init(&self) -> Belief {
        let start = self.t.initial().iter().copied().filter(|&x| self.t.is_feasible(x)).collect();
        self.closure(start)
    }

    /// Update on output symbol index `symbol`; `step` (1-based) is only used
    /// in the error.
    pub fn step(&self, belief: &Belief, symbol: usize, step: usize) -> Result<Belief, DiagnoserError> {
        let next: Vec<usize> = belief
            .iter()
            .flat_map(|&x| self.t.edges_from(x))
            .filter(|(e, y)| e.output == Output::Symbol(symbol) && self.t.is_feasible(*y))
            .map(|&(_, y)| y)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let out = self.closure(next);
        if out.is_empty() {
            return Err(DiagnoserError::InfeasibleObservation { step });
        }
        Ok(out)
    }

    pub fn step_symbol(&self, belief: &Belief, symbol: &str, step: usize) -> Result<Belief, DiagnoserError> {
        let o = self
            .model
            .output_index(symbol)
            .ok_or_else(|| DiagnoserError::UnknownSymbol(symbol.to_string()))?;
        self.step(belief, o, step)
    }

    /// Certain that a fault has occurred.
    pub fn is_alarm(&self, belief: &Belief) -> bool {
        !belief.is_empty() && belief.iter().all(|&x| self.t.is_faulty(x))
    }

    /// Beliefs after each symbol, starting with the initial belief.
    pub fn replay<S: AsRef<str>>(&self, symbols: &[S]) -> Result<Vec<Belief>, DiagnoserError> {
        let mut out = vec![self.init()];
        for (i, s) in symbols.iter().enumerate() {
            let b = self.step_symbol(out.last().unwrap(), s.as_ref(), i + 1)?;
            out.push(b);
        }
        Ok(out)
    }

    pub fn names(&self, belief: &Belief) -> Vec<String> {
        belief.iter().map(|&x| self.t.name(x).to_string()).collect()
    }
}

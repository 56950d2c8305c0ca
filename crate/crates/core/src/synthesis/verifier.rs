use std::collections::{HashMap, VecDeque};

use super::constrain::ConstrainedSystem;
use crate::model::ExtendedEvent;

/// An event of V. `None` on one side means that copy of T does not move;
/// both sides are never `None` together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairEvent {
    pub first: Option<ExtendedEvent>,
    pub second: Option<ExtendedEvent>,
}

/// V: pairs of T-states that share an observation history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationSystem {
    states: Vec<(usize, usize)>,
    initial: Vec<usize>,
    edges: Vec<Vec<(PairEvent, usize)>>,
    accepting: Vec<bool>,
    names: Vec<String>,
}

impl VerificationSystem {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn state(&self, i: usize) -> (usize, usize) {
        self.states[i]
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn edges_from(&self, i: usize) -> &[(PairEvent, usize)] {
        &self.edges[i]
    }

    /// First component accepting and faulty, second feasible and normal.
    pub fn is_accepting(&self, i: usize) -> bool {
        self.accepting[i]
    }

    pub fn num_accepting(&self) -> usize {
        self.accepting.iter().filter(|&&a| a).count()
    }

    /// Name such as `((4F,B),(7N,B))`.
    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        self.edges.iter().map(|out| out.iter().map(|&(_, j)| j).collect()).collect()
    }
}

/// Twin-plant construction over T. Moves with equal non-silent outputs are
/// taken jointly; silent moves are taken by one copy while the other stays.
pub fn build_verifier(t: &ConstrainedSystem) -> VerificationSystem {
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut states = Vec::new();
    let mut queue = VecDeque::new();
    for &a in t.initial() {
        for &b in t.initial() {
            ids.insert((a, b), states.len());
            states.push((a, b));
            queue.push_back((a, b));
        }
    }
    let initial = (0..states.len()).collect();
    let mut edges = Vec::new();
    while let Some((q1, q2)) = queue.pop_front() {
        let mut moves = Vec::new();
        for &(e1, r1) in t.edges_from(q1) {
            if e1.output.is_silent() {
                moves.push((PairEvent { first: Some(e1), second: None }, (r1, q2)));
                continue;
            }
            for &(e2, r2) in t.edges_from(q2) {
                if e2.output == e1.output {
                    moves.push((PairEvent { first: Some(e1), second: Some(e2) }, (r1, r2)));
                }
            }
        }
        for &(e2, r2) in t.edges_from(q2) {
            if e2.output.is_silent() {
                moves.push((PairEvent { first: None, second: Some(e2) }, (q1, r2)));
            }
        }
        moves.sort();
        let mut out = Vec::with_capacity(moves.len());
        for (ev, key) in moves {
            let id = *ids.entry(key).or_insert_with(|| {
                states.push(key);
                queue.push_back(key);
                states.len() - 1
            });
            out.push((ev, id));
        }
        edges.push(out);
    }
    let accepting = states
        .iter()
        .map(|&(a, b)| {
            t.is_accepting(a) && t.is_faulty(a) && t.is_feasible(b) && !t.is_faulty(b)
        })
        .collect();
    let names = states.iter().map(|&(a, b)| format!("({},{})", t.name(a), t.name(b))).collect();
    VerificationSystem { states, initial, edges, accepting, names }
}

/// `(θ₁(s), θ₂(s))`: the moves of each copy with the idle steps dropped.
pub fn project_pair(word: &[PairEvent]) -> (Vec<ExtendedEvent>, Vec<ExtendedEvent>) {
    (
        word.iter().filter_map(|p| p.first).collect(),
        word.iter().filter_map(|p| p.second).collect(),
    )
}

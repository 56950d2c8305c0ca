use std::collections::{HashMap, VecDeque};

use super::augment::AugmentedSystem;
use crate::constraint::Labeling;
use crate::graph;
use crate::ltl::BuchiAutomaton;
use crate::model::ExtendedEvent;

/// A state of T: an augmented-plant state paired with an NBA state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TState {
    pub aug: usize,
    pub nba: usize,
}

/// T = G̃ × NBA synchronized on `label(σ_e)`, with accepting, faulty and
/// feasible states precomputed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstrainedSystem {
    states: Vec<TState>,
    initial: Vec<usize>,
    edges: Vec<Vec<(ExtendedEvent, usize)>>,
    accepting: Vec<bool>,
    faulty: Vec<bool>,
    feasible: Vec<bool>,
    names: Vec<String>,
}

impl ConstrainedSystem {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn state(&self, i: usize) -> TState {
        self.states[i]
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn edges_from(&self, i: usize) -> &[(ExtendedEvent, usize)] {
        &self.edges[i]
    }

    pub fn is_accepting(&self, i: usize) -> bool {
        self.accepting[i]
    }

    pub fn is_faulty(&self, i: usize) -> bool {
        self.faulty[i]
    }

    /// Whether some accepting run leaves this state.
    pub fn is_feasible(&self, i: usize) -> bool {
        self.feasible[i]
    }

    pub fn feasible_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states()).filter(|&i| self.feasible[i])
    }

    /// Name such as `(4F,s1)`.
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

/// Product of G̃ with `nba`: `(q̃, x) -σ_e-> (q̃', x')` iff `q̃ -σ_e-> q̃'` and
/// `x' ∈ ξ(x, label(σ_e))`.
pub fn constrain(aug: &AugmentedSystem, nba: &BuchiAutomaton, labeling: &Labeling) -> ConstrainedSystem {
    let mut ids: HashMap<TState, usize> = HashMap::new();
    let mut states = Vec::new();
    let mut queue = VecDeque::new();
    for &x in nba.initial() {
        let s = TState { aug: aug.initial(), nba: x };
        ids.insert(s, states.len());
        states.push(s);
        queue.push_back(s);
    }
    let initial = (0..states.len()).collect();
    let mut edges = Vec::new();
    while let Some(s) = queue.pop_front() {
        let mut out = Vec::new();
        for &(e, a2) in aug.edges_from(s.aug) {
            for x2 in nba.successors(s.nba, labeling.get(&e)) {
                let key = TState { aug: a2, nba: x2 };
                let id = *ids.entry(key).or_insert_with(|| {
                    states.push(key);
                    queue.push_back(key);
                    states.len() - 1
                });
                out.push((e, id));
            }
        }
        edges.push(out);
    }
    let accepting: Vec<bool> = states.iter().map(|s| nba.is_accepting(s.nba)).collect();
    let faulty = states.iter().map(|s| aug.is_faulty(s.aug)).collect();
    let names = states
        .iter()
        .map(|s| format!("({},{})", aug.name(s.aug), nba.state_name(s.nba)))
        .collect();
    let mut t = ConstrainedSystem {
        states,
        initial,
        edges,
        accepting,
        faulty,
        feasible: Vec::new(),
        names,
    };
    t.feasible = feasible(&t.adjacency(), &t.accepting);
    t
}

/// States that reach an accepting state lying on a cycle (self-loops count).
fn feasible(adj: &[Vec<usize>], accepting: &[bool]) -> Vec<bool> {
    let seeds = graph::tarjan_scc(adj)
        .into_iter()
        .filter(|c| graph::is_nontrivial(adj, c))
        .flatten()
        .filter(|&v| accepting[v]);
    graph::reachable(&graph::reverse(adj), seeds)
}

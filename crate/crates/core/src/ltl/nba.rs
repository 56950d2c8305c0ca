use std::collections::BTreeSet;
use std::fmt;

use super::Letter;
use crate::graph;
use crate::lasso::Lasso;

/// Boolean edge guard over atomic propositions. A letter takes an edge iff the
/// guard evaluates to true with exactly the letter's atoms set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Guard {
    True,
    False,
    Lit { atom: String, positive: bool },
    Not(Box<Guard>),
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

impl Guard {
    pub fn pos(atom: &str) -> Self {
        Guard::Lit { atom: atom.to_string(), positive: true }
    }

    pub fn neg(atom: &str) -> Self {
        Guard::Lit { atom: atom.to_string(), positive: false }
    }

    pub fn eval(&self, letter: &Letter) -> bool {
        match self {
            Guard::True => true,
            Guard::False => false,
            Guard::Lit { atom, positive } => letter.contains(atom) == *positive,
            Guard::Not(g) => !g.eval(letter),
            Guard::And(gs) => gs.iter().all(|g| g.eval(letter)),
            Guard::Or(gs) => gs.iter().any(|g| g.eval(letter)),
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<String>) {
        match self {
            Guard::True | Guard::False => {}
            Guard::Lit { atom, .. } => {
                out.insert(atom.clone());
            }
            Guard::Not(g) => g.collect(out),
            Guard::And(gs) | Guard::Or(gs) => gs.iter().for_each(|g| g.collect(out)),
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, gs: &[Guard], op: &str, empty: &str| {
            if gs.is_empty() {
                return f.write_str(empty);
            }
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                match g {
                    Guard::And(_) | Guard::Or(_) => write!(f, "({g})")?,
                    _ => write!(f, "{g}")?,
                }
            }
            Ok(())
        };
        match self {
            Guard::True => f.write_str("true"),
            Guard::False => f.write_str("false"),
            Guard::Lit { atom, positive: true } => f.write_str(atom),
            Guard::Lit { atom, positive: false } => write!(f, "!{atom}"),
            Guard::Not(g) => write!(f, "!({g})"),
            Guard::And(gs) => join(f, gs, "&", "true"),
            Guard::Or(gs) => join(f, gs, "|", "false"),
        }
    }
}

/// Non-deterministic Büchi automaton with guarded edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuchiAutomaton {
    atoms: BTreeSet<String>,
    names: Vec<String>,
    initial: BTreeSet<usize>,
    accepting: BTreeSet<usize>,
    edges: Vec<Vec<(Guard, usize)>>,
}

impl BuchiAutomaton {
    /// Build an automaton from named states; `edges` are `(from, guard, to)`
    /// by state name.
    ///
    /// # Panics
    ///
    /// If an edge, initial or accepting entry names an unknown state.
    pub fn new(
        atoms: BTreeSet<String>,
        names: Vec<String>,
        initial: &[&str],
        accepting: &[&str],
        edges: Vec<(&str, Guard, &str)>,
    ) -> Self {
        let idx = |n: &str| {
            names
                .iter()
                .position(|x| x == n)
                .unwrap_or_else(|| panic!("unknown NBA state `{n}`"))
        };
        let mut adj = vec![Vec::new(); names.len()];
        for (from, guard, to) in edges {
            adj[idx(from)].push((guard, idx(to)));
        }
        Self {
            initial: initial.iter().map(|n| idx(n)).collect(),
            accepting: accepting.iter().map(|n| idx(n)).collect(),
            atoms,
            names,
            edges: adj,
        }
    }

    pub(crate) fn from_parts(
        atoms: BTreeSet<String>,
        names: Vec<String>,
        initial: BTreeSet<usize>,
        accepting: BTreeSet<usize>,
        edges: Vec<Vec<(Guard, usize)>>,
    ) -> Self {
        Self { atoms, names, initial, accepting, edges }
    }

    pub fn atoms(&self) -> &BTreeSet<String> {
        &self.atoms
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn initial(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn is_accepting(&self, x: usize) -> bool {
        self.accepting.contains(&x)
    }

    pub fn edges_from(&self, x: usize) -> &[(Guard, usize)] {
        &self.edges[x]
    }

    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// ξ(x, letter), sorted and without duplicates.
    pub fn successors(&self, x: usize, letter: &Letter) -> Vec<usize> {
        let set: BTreeSet<usize> = self.edges[x]
            .iter()
            .filter(|(g, _)| g.eval(letter))
            .map(|&(_, y)| y)
            .collect();
        set.into_iter().collect()
    }
}

/// Whether some run of `nba` over `prefix · cycle^ω` visits accepting states
/// infinitely often: the lasso is read as a single-cycle automaton and the
/// product is searched for a reachable accepting state on a cycle.
///
/// # Panics
///
/// If the cycle is empty.
pub fn nba_accepts_lasso(nba: &BuchiAutomaton, word: &Lasso<Letter>) -> bool {
    assert!(!word.cycle.is_empty(), "lasso cycle must be non-empty");
    let n = word.len();
    let id = |x: usize, i: usize| x * n + i;
    let mut adj = vec![Vec::new(); nba.num_states() * n];
    for x in 0..nba.num_states() {
        for i in 0..n {
            let j = word.successor(i);
            adj[id(x, i)] = nba.successors(x, word.at(i)).into_iter().map(|y| id(y, j)).collect();
        }
    }
    let seen = graph::reachable(&adj, nba.initial().iter().map(|&x| id(x, 0)));
    graph::tarjan_scc(&adj).iter().any(|comp| {
        graph::is_nontrivial(&adj, comp)
            && comp.iter().any(|&p| seen[p] && nba.is_accepting(p / n))
    })
}

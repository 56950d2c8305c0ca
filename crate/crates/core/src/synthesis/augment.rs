use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::model::{ExtendedEvent, PlantModel};

/// Fault label: `N` until a fault event has occurred, `F` forever after.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    N,
    F,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::N => "N",
            Mode::F => "F",
        })
    }
}

/// G̃: the plant with states tagged by their fault label. State 0 is `(q₀, N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedSystem {
    states: Vec<(usize, Mode)>,
    edges: Vec<Vec<(ExtendedEvent, usize)>>,
    names: Vec<String>,
}

impl AugmentedSystem {
    pub fn initial(&self) -> usize {
        0
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn state(&self, i: usize) -> (usize, Mode) {
        self.states[i]
    }

    pub fn is_faulty(&self, i: usize) -> bool {
        self.states[i].1 == Mode::F
    }

    pub fn edges_from(&self, i: usize) -> &[(ExtendedEvent, usize)] {
        &self.edges[i]
    }

    /// Name such as `4F`.
    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn find(&self, q: usize, mode: Mode) -> Option<usize> {
        self.states.iter().position(|&s| s == (q, mode))
    }
}

pub fn augment(model: &PlantModel) -> AugmentedSystem {
    let start = (model.initial(), Mode::N);
    let mut ids = HashMap::from([(start, 0)]);
    let mut states = vec![start];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([start]);
    while let Some((q, mode)) = queue.pop_front() {
        let mut out = Vec::new();
        for (e, q2) in model.successors_unchecked(q) {
            let mode2 = if mode == Mode::F || model.is_fault_event(e.event) {
                Mode::F
            } else {
                Mode::N
            };
            let key = (q2, mode2);
            let id = *ids.entry(key).or_insert_with(|| {
                states.push(key);
                queue.push_back(key);
                states.len() - 1
            });
            out.push((e, id));
        }
        edges.push(out);
    }
    let names = states.iter().map(|&(q, m)| format!("{}{m}", model.state_name(q))).collect();
    AugmentedSystem { states, edges, names }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{example_g1_spec, PlantSpec, TransitionSpec};

    #[test]
    fn g1_has_eight_augmented_states() {
        let m = PlantModel::from_spec(&example_g1_spec(), false).unwrap();
        let g = augment(&m);
        let mut names: Vec<&str> = (0..g.num_states()).map(|i| g.name(i)).collect();
        names.sort();
        assert_eq!(names, ["1N", "2F", "3F", "4F", "5N", "6N", "7N", "8N"]);
        // 1-f->2, 1-u->5, 2-a->3, 3-b->4 twice, 4-c->2, 5-a->6, 6-b->7 twice, 7-c->8, 8-a->7
        assert_eq!(g.num_edges(), 11);
        for i in 0..g.num_states() {
            for &(_, j) in g.edges_from(i) {
                assert!(!(g.is_faulty(i) && !g.is_faulty(j)), "F must be absorbing");
            }
        }
    }

    #[test]
    fn fault_free_plant_is_all_normal() {
        let spec = PlantSpec {
            states: vec!["a".into(), "b".into()],
            events: vec!["x".into()],
            outputs: vec!["o".into()],
            initial: "a".into(),
            fault_events: vec![],
            transitions: vec![
                TransitionSpec::new("a", "x", "b", &["o"]),
                TransitionSpec::new("b", "x", "a", &["", "o"]),
            ],
        };
        let m = PlantModel::from_spec(&spec, false).unwrap();
        let g = augment(&m);
        assert_eq!(g.num_states(), 2);
        assert!((0..2).all(|i| !g.is_faulty(i)));
        assert_eq!(g.num_edges(), m.extended_events().count());
    }

    #[test]
    fn initial_fault_makes_successors_faulty() {
        let spec = PlantSpec {
            states: vec!["0".into(), "1".into(), "2".into()],
            events: vec!["f".into(), "g".into(), "x".into()],
            outputs: vec![],
            initial: "0".into(),
            fault_events: vec!["f".into(), "g".into()],
            transitions: vec![
                TransitionSpec::new("0", "f", "1", &[""]),
                TransitionSpec::new("0", "g", "2", &[""]),
                TransitionSpec::new("1", "x", "1", &[""]),
                TransitionSpec::new("2", "x", "0", &[""]),
            ],
        };
        let m = PlantModel::from_spec(&spec, false).unwrap();
        let g = augment(&m);
        for &(_, j) in g.edges_from(g.initial()) {
            assert!(g.is_faulty(j));
        }
        // 0N, 1F, 2F, 0F
        assert_eq!(g.num_states(), 4);
        assert!(g.num_states() <= 2 * m.states().len());
    }
}

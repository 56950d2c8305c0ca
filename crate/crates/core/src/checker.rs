//! The diagnosability decision on the verification system, witness
//! extraction, JSON rendering and a plain-text report.
//!
//! The plant is not diagnosable iff some reachable strongly connected
//! component of V contains both an accepting state and an internal edge on
//! which the faulty copy moves. Inside one component a closed walk through
//! any state and any edge exists, so this is the same as asking for a single
//! cycle with both features.

use serde::{Deserialize, Serialize};

use crate::constraint::SensorConstraint;
use crate::graph;
use crate::lasso::Lasso;
use crate::ltl::{ltl_to_nba, BuchiAutomaton};
use crate::model::{project_lasso, Axis, ExtendedEvent, PlantModel};
use crate::synthesis::{
    augment, build_verifier, constrain, AugmentedSystem, ConstrainedSystem, PairEvent,
    VerificationSystem,
};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub augmented_states: usize,
    pub augmented_edges: usize,
    pub nba_states: usize,
    pub constrained_states: usize,
    pub constrained_edges: usize,
    pub feasible_states: usize,
    pub verifier_states: usize,
    pub verifier_edges: usize,
    pub verifier_accepting: usize,
}

/// One move of V, taken from the state named `state`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessStep {
    pub state: String,
    pub event: PairEvent,
}

/// A lasso in V. The cycle starts (and ends) at an accepting state and
/// contains at least one move of the faulty copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub prefix: Vec<WitnessStep>,
    pub cycle: Vec<WitnessStep>,
}

impl Witness {
    pub fn events(&self) -> Lasso<PairEvent> {
        Lasso::new(
            self.prefix.iter().map(|s| s.event).collect(),
            self.cycle.iter().map(|s| s.event).collect(),
        )
    }

    /// The faulty, constraint-compatible infinite string.
    pub fn theta1(&self) -> Lasso<ExtendedEvent> {
        self.events().filter_map(|p| p.first)
    }

    /// The normal string it cannot be told apart from. Its cycle may be empty
    /// when the normal copy only idles around the loop.
    pub fn theta2(&self) -> Lasso<ExtendedEvent> {
        self.events().filter_map(|p| p.second)
    }

    /// Shared observation, as output indices.
    pub fn observation(&self) -> Lasso<usize> {
        project_lasso(&self.theta1(), Axis::Output)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub diagnosable: bool,
    pub witness: Option<Witness>,
    pub stats: Stats,
}

/// Every intermediate system of one check, kept for export and inspection.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub nba: BuchiAutomaton,
    pub augmented: AugmentedSystem,
    pub constrained: ConstrainedSystem,
    pub verifier: VerificationSystem,
    pub verdict: Verdict,
}

/// Decide diagnosability of `model` under `constraint`.
pub fn check(model: &PlantModel, constraint: &SensorConstraint) -> Verdict {
    analyze(model, constraint).verdict
}

pub fn analyze(model: &PlantModel, constraint: &SensorConstraint) -> Analysis {
    analyze_with_nba(model, constraint, ltl_to_nba(&constraint.formula))
}

/// Like [`analyze`] with a caller-supplied automaton for the formula.
pub fn analyze_with_nba(
    model: &PlantModel,
    constraint: &SensorConstraint,
    nba: BuchiAutomaton,
) -> Analysis {
    let augmented = augment(model);
    let constrained = constrain(&augmented, &nba, &constraint.labeling);
    let verifier = build_verifier(&constrained);
    let stats = Stats {
        augmented_states: augmented.num_states(),
        augmented_edges: augmented.num_edges(),
        nba_states: nba.num_states(),
        constrained_states: constrained.num_states(),
        constrained_edges: constrained.num_edges(),
        feasible_states: constrained.feasible_states().count(),
        verifier_states: verifier.num_states(),
        verifier_edges: verifier.num_edges(),
        verifier_accepting: verifier.num_accepting(),
    };
    let witness = find_witness(&verifier);
    let verdict = Verdict { diagnosable: witness.is_none(), witness, stats };
    Analysis { nba, augmented, constrained, verifier, verdict }
}

fn steps(v: &VerificationSystem, path: &[usize]) -> Vec<WitnessStep> {
    path.windows(2)
        .map(|w| {
            let event = v.edges_from(w[0]).iter().find(|&&(_, j)| j == w[1]).unwrap().0;
            WitnessStep { state: v.name(w[0]).to_string(), event }
        })
        .collect()
}

/// Search V for a violating cycle; `None` means diagnosable.
pub fn find_witness(v: &VerificationSystem) -> Option<Witness> {
    let adj = v.adjacency();
    let mut comp_of = vec![usize::MAX; v.num_states()];
    let comps = graph::tarjan_scc(&adj);
    for (c, comp) in comps.iter().enumerate() {
        for &s in comp {
            comp_of[s] = c;
        }
    }
    let internal_fault_move = |c: usize| {
        comps[c].iter().any(|&u| {
            v.edges_from(u).iter().any(|&(ev, w)| comp_of[w] == c && ev.first.is_some())
        })
    };
    let qualifies: Vec<bool> = (0..comps.len())
        .map(|c| {
            graph::is_nontrivial(&adj, &comps[c])
                && comps[c].iter().any(|&s| v.is_accepting(s))
                && internal_fault_move(c)
        })
        .collect();

    let (dist, parent) = graph::bfs(&adj, v.initial(), |_| true);
    let target = (0..v.num_states())
        .filter(|&s| v.is_accepting(s) && qualifies[comp_of[s]] && dist[s] != usize::MAX)
        .min_by_key(|&s| (dist[s], s))?;
    let c = comp_of[target];
    let inside = |x: usize| comp_of[x] == c;

    let (d_from, p_from) = graph::bfs(&adj, &[target], inside);
    let (u, k) = comps[c]
        .iter()
        .flat_map(|&u| {
            v.edges_from(u)
                .iter()
                .enumerate()
                .filter(|&(_, &(ev, w))| inside(w) && ev.first.is_some())
                .map(move |(k, _)| (u, k))
        })
        .min_by_key(|&(u, k)| (d_from[u], u, k))
        .unwrap();
    let (edge, w) = v.edges_from(u)[k];

    let mut cycle = steps(v, &graph::path_to(&p_from, u));
    cycle.push(WitnessStep { state: v.name(u).to_string(), event: edge });
    let (_, p_back) = graph::bfs(&adj, &[w], inside);
    cycle.extend(steps(v, &graph::path_to(&p_back, target)));

    Some(Witness { prefix: steps(v, &graph::path_to(&parent, target)), cycle })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventJson {
    pub q: String,
    pub sigma: String,
    pub o: String,
}

impl EventJson {
    pub fn new(model: &PlantModel, e: &ExtendedEvent) -> Self {
        Self {
            q: model.state_name(e.state).to_string(),
            sigma: model.event_name(e.event).to_string(),
            o: model.output_spelling(e.output).to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub state: String,
    pub first: Option<EventJson>,
    pub second: Option<EventJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionsJson {
    pub theta1: Lasso<EventJson>,
    pub theta2: Lasso<EventJson>,
    pub observation: Lasso<String>,
}

/// Serialized verdict. Extended events are `{q, sigma, o}` with `o = ""` for
/// the silent output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub diagnosable: bool,
    pub witness: Option<Lasso<StepJson>>,
    pub projections: Option<ProjectionsJson>,
    pub stats: Stats,
}

impl Verdict {
    pub fn to_json(&self, model: &PlantModel) -> VerdictJson {
        let ev = |e: &ExtendedEvent| EventJson::new(model, e);
        let step = |s: &WitnessStep| StepJson {
            state: s.state.clone(),
            first: s.event.first.as_ref().map(ev),
            second: s.event.second.as_ref().map(ev),
        };
        VerdictJson {
            diagnosable: self.diagnosable,
            witness: self.witness.as_ref().map(|w| {
                Lasso::new(w.prefix.iter().map(step).collect(), w.cycle.iter().map(step).collect())
            }),
            projections: self.witness.as_ref().map(|w| ProjectionsJson {
                theta1: w.theta1().map(ev),
                theta2: w.theta2().map(ev),
                observation: w.observation().map(|&o| model.outputs()[o].clone()),
            }),
            stats: self.stats.clone(),
        }
    }
}

fn render_run(model: &PlantModel, s: &[ExtendedEvent], empty: &str) -> String {
    if s.is_empty() {
        return empty.to_string();
    }
    s.iter().map(|e| model.format_event(e)).collect::<Vec<_>>().join(" ")
}

fn render_symbols(model: &PlantModel, s: &[usize]) -> String {
    s.iter().map(|&o| model.outputs()[o].as_str()).collect::<Vec<_>>().join(" ")
}

/// Human-readable report of a verdict.
pub fn explain(verdict: &Verdict, model: &PlantModel) -> String {
    let mut out = String::new();
    match &verdict.witness {
        None => out.push_str("verdict: diagnosable\n"),
        Some(w) => {
            out.push_str("verdict: NOT diagnosable\n\n");
            let t1 = w.theta1();
            let t2 = w.theta2();
            out.push_str("faulty run:\n");
            out.push_str(&format!("  prefix: {}\n", render_run(model, &t1.prefix, "from initial state")));
            out.push_str(&format!("  cycle:  {}\n", render_run(model, &t1.cycle, "(none)")));
            out.push_str("indistinguishable normal run:\n");
            out.push_str(&format!("  prefix: {}\n", render_run(model, &t2.prefix, "from initial state")));
            out.push_str(&format!("  cycle:  {}\n", render_run(model, &t2.cycle, "(idle)")));
            let obs = w.observation();
            let head = render_symbols(model, &obs.prefix);
            let body = render_symbols(model, &obs.cycle);
            out.push_str(&format!(
                "shared observation: {}{}\n",
                if head.is_empty() { String::new() } else { format!("{head} ") },
                if body.is_empty() { "(nothing further)".to_string() } else { format!("({body})^ω") }
            ));
            let lost: Vec<String> = t1
                .cycle
                .iter()
                .filter(|e| e.output.is_silent())
                .map(|e| model.format_event(e))
                .collect();
            if !lost.is_empty() {
                out.push_str(&format!("silent in the faulty cycle: {}\n", lost.join(" ")));
            }
            out.push_str("verifier cycle:\n");
            for s in &w.cycle {
                let side = |e: &Option<ExtendedEvent>| {
                    e.as_ref().map_or("ε".to_string(), |e| model.format_event(e))
                };
                out.push_str(&format!(
                    "  {} --({}, {})-->\n",
                    s.state,
                    side(&s.event.first),
                    side(&s.event.second)
                ));
            }
        }
    }
    let s = &verdict.stats;
    out.push_str(&format!(
        "\nstats: G~ {}/{}  NBA {}  T {}/{} ({} feasible)  V {}/{} ({} accepting)  [states/edges]\n",
        s.augmented_states,
        s.augmented_edges,
        s.nba_states,
        s.constrained_states,
        s.constrained_edges,
        s.feasible_states,
        s.verifier_states,
        s.verifier_edges,
        s.verifier_accepting
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{example_g1_spec, example_g3_spec, project};
    use crate::templates::{
        build_intermittent_permanent, build_output_fairness, IntermittentPermanent, OutputFairness,
        TransitionRef,
    };

    fn g1_per() -> (PlantModel, SensorConstraint) {
        let m = PlantModel::from_spec(&example_g1_spec(), false).unwrap();
        let t = TransitionRef::new;
        let p = IntermittentPermanent {
            t_uo: vec![t("1", "f"), t("1", "u")],
            t_o: vec![t("2", "a"), t("4", "c"), t("5", "a"), t("7", "c"), t("8", "a")],
            t_int: vec![],
            t_per: vec![t("3", "b"), t("6", "b")],
            per_event: true,
        };
        let out = build_intermittent_permanent(&m, &p).unwrap();
        (out.model, out.constraint)
    }

    fn check_witness_shape(v: &VerificationSystem, w: &Witness) {
        let start = v.find(&w.cycle[0].state).unwrap();
        assert!(v.is_accepting(start));
        assert!(w.cycle.iter().any(|s| s.event.first.is_some()));
        // the walk is connected and closes
        let all: Vec<&WitnessStep> = w.prefix.iter().chain(&w.cycle).collect();
        let first = v.find(&all[0].state).unwrap();
        assert!(v.initial().contains(&first));
        for (i, s) in all.iter().enumerate() {
            let from = v.find(&s.state).unwrap();
            let next = all.get(i + 1).map_or(start, |n| v.find(&n.state).unwrap());
            assert!(v.edges_from(from).contains(&(s.event, next)));
        }
    }

    #[test]
    fn g1_permanent_failure_not_diagnosable() {
        let (m, c) = g1_per();
        let a = analyze(&m, &c);
        assert!(!a.verdict.diagnosable);
        let w = a.verdict.witness.as_ref().unwrap();
        check_witness_shape(&a.verifier, w);
        assert!(m.is_faulty(&w.theta1().unroll(1)));
        assert!(c.is_compatible(&w.theta1()));
        let obs1 = project(&w.theta1().unroll(3), Axis::Output);
        let obs2 = project(&w.theta2().unroll(3), Axis::Output);
        assert_eq!(obs1, obs2);
    }

    #[test]
    fn g1_trivial_constraint_not_diagnosable() {
        let m = PlantModel::from_spec(&example_g1_spec(), false).unwrap();
        assert!(!check(&m, &SensorConstraint::trivial()).diagnosable);
    }

    #[test]
    fn g3_fairness_makes_it_diagnosable() {
        let m = PlantModel::from_spec(&example_g3_spec(), false).unwrap();
        let fair = OutputFairness { fair: vec![TransitionRef::new("2", "a")] };
        let out = build_output_fairness(&m, &fair).unwrap();
        assert!(check(&out.model, &out.constraint).diagnosable);
        let v = check(&m, &SensorConstraint::trivial());
        assert!(!v.diagnosable);
        let obs = v.witness.unwrap().observation();
        let o1 = m.output_index("o1").unwrap();
        let o2 = m.output_index("o2").unwrap();
        let word = obs.unroll(3);
        assert_eq!(word[0], o1);
        assert_eq!(&word[1..], [o1, o2].repeat(3).as_slice());
    }

    #[test]
    fn fault_free_plant_is_diagnosable() {
        let mut spec = example_g1_spec();
        spec.fault_events.clear();
        let m = PlantModel::from_spec(&spec, false).unwrap();
        let v = check(&m, &SensorConstraint::trivial());
        assert!(v.diagnosable);
        assert!(v.witness.is_none());
        assert_eq!(v.stats.verifier_accepting, 0);
    }

    #[test]
    fn deterministic() {
        let (m, c) = g1_per();
        assert_eq!(check(&m, &c), check(&m, &c));
    }

    #[test]
    fn json_round_trip() {
        let (m, c) = g1_per();
        let j = check(&m, &c).to_json(&m);
        let text = serde_json::to_string(&j).unwrap();
        let back: VerdictJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, j);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["diagnosable"], false);
        assert!(value["witness"]["cycle"][0]["first"]["q"].is_string());
    }

    #[test]
    fn report_text() {
        let (m, c) = g1_per();
        let r = explain(&check(&m, &c), &m);
        assert!(r.contains("NOT diagnosable"));
        assert!(r.contains("faulty run"));
        assert!(r.contains("indistinguishable normal run"));
        assert!(r.contains("shared observation"));
        let mut spec = example_g1_spec();
        spec.fault_events.clear();
        let m = PlantModel::from_spec(&spec, false).unwrap();
        let r = explain(&check(&m, &SensorConstraint::trivial()), &m);
        assert!(r.starts_with("verdict: diagnosable"));
        assert!(!r.contains("faulty run"));
    }

    #[test]
    fn empty_prefix_renders_initial_state() {
        // the normal copy never leaves the initial state before the loop
        let spec = crate::model::PlantSpec {
            states: vec!["0".into(), "1".into()],
            events: vec!["f".into(), "x".into()],
            outputs: vec!["o".into()],
            initial: "0".into(),
            fault_events: vec!["f".into()],
            transitions: vec![
                crate::model::TransitionSpec::new("0", "f", "1", &[""]),
                crate::model::TransitionSpec::new("0", "x", "0", &["o"]),
                crate::model::TransitionSpec::new("1", "x", "1", &["o"]),
            ],
        };
        let m = PlantModel::from_spec(&spec, false).unwrap();
        let v = check(&m, &SensorConstraint::trivial());
        assert!(!v.diagnosable);
        assert!(v.witness.as_ref().unwrap().theta2().prefix.is_empty());
        let text = explain(&v, &m);
        assert!(text.contains("normal run:\n  prefix: from initial state"), "{text}");
    }
}

//! Plant models: deterministic partial automata with fault events and a
//! transition-based, non-deterministic observation mapping.
//!
//! Identifiers are opaque strings. Internally every table is sorted
//! lexicographically and referred to by index, so the derived orderings on
//! [`ExtendedEvent`] and friends coincide with lexicographic order on names.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::lasso::Lasso;

/// Output spellings that may not be declared as observation symbols. The empty
/// string encodes the silent output in JSON, `~` is its DOT rendering and
/// `eps` is used for it in generated atom names.
pub const RESERVED_OUTPUTS: [&str; 4] = ["", "ε", "eps", "~"];

/// A sensor reading: silent, or an index into [`PlantModel::outputs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Output {
    Silent,
    Symbol(usize),
}

impl Output {
    pub fn is_silent(self) -> bool {
        matches!(self, Output::Silent)
    }

    pub fn symbol(self) -> Option<usize> {
        match self {
            Output::Silent => None,
            Output::Symbol(o) => Some(o),
        }
    }
}

/// An internal transition `(q, σ)` bundled with one concrete reading `o`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtendedEvent {
    pub state: usize,
    pub event: usize,
    pub output: Output,
}

impl ExtendedEvent {
    pub fn new(state: usize, event: usize, output: Output) -> Self {
        Self { state, event, output }
    }
}

pub type ExtendedString = Vec<ExtendedEvent>;

/// JSON form of a plant. `""` in an `obs` list denotes the silent output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSpec {
    pub states: Vec<String>,
    pub events: Vec<String>,
    pub outputs: Vec<String>,
    pub initial: String,
    pub fault_events: Vec<String>,
    pub transitions: Vec<TransitionSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSpec {
    pub from: String,
    pub event: String,
    pub to: String,
    pub obs: Vec<String>,
}

impl TransitionSpec {
    pub fn new(from: &str, event: &str, to: &str, obs: &[&str]) -> Self {
        Self {
            from: from.to_string(),
            event: event.to_string(),
            to: to.to_string(),
            obs: obs.iter().map(|o| o.to_string()).collect(),
        }
    }
}

/// A broken plant invariant, as reported by [`validate_plant`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    DuplicateState(String),
    DuplicateEvent(String),
    DuplicateOutput(String),
    ReservedOutput(String),
    UnknownInitial(String),
    UnknownFaultEvent(String),
    UnknownState { transition: usize, state: String },
    UnknownEvent { transition: usize, event: String },
    UnknownOutput { transition: usize, output: String },
    Nondeterministic { state: String, event: String },
    EmptyObservation { state: String, event: String },
    NotLive { state: String },
}

impl Violation {
    pub fn is_liveness(&self) -> bool {
        matches!(self, Violation::NotLive { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateState(s) => write!(f, "state `{s}` declared twice"),
            Violation::DuplicateEvent(e) => write!(f, "event `{e}` declared twice"),
            Violation::DuplicateOutput(o) => write!(f, "output `{o}` declared twice"),
            Violation::ReservedOutput(o) => {
                write!(f, "output `{o}` collides with the reserved silent-output spelling")
            }
            Violation::UnknownInitial(s) => write!(f, "initial state `{s}` is not declared"),
            Violation::UnknownFaultEvent(e) => write!(f, "fault event `{e}` is not declared"),
            Violation::UnknownState { transition, state } => {
                write!(f, "transition #{transition}: unknown state `{state}`")
            }
            Violation::UnknownEvent { transition, event } => {
                write!(f, "transition #{transition}: unknown event `{event}`")
            }
            Violation::UnknownOutput { transition, output } => {
                write!(f, "transition #{transition}: unknown output `{output}`")
            }
            Violation::Nondeterministic { state, event } => {
                write!(f, "transition ({state},{event}) defined more than once")
            }
            Violation::EmptyObservation { state, event } => {
                write!(f, "transition ({state},{event}) has an empty observation set")
            }
            Violation::NotLive { state } => {
                write!(f, "state `{state}` has no outgoing transition")
            }
        }
    }
}

/// Check every plant invariant; an empty result means the spec is a valid plant.
pub fn validate_plant(spec: &PlantSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let states = collect_unique(&spec.states, &mut out, Violation::DuplicateState);
    let events = collect_unique(&spec.events, &mut out, Violation::DuplicateEvent);
    let outputs = collect_unique(&spec.outputs, &mut out, Violation::DuplicateOutput);
    for o in &outputs {
        if RESERVED_OUTPUTS.contains(o) {
            out.push(Violation::ReservedOutput(o.to_string()));
        }
    }
    if !states.contains(spec.initial.as_str()) {
        out.push(Violation::UnknownInitial(spec.initial.clone()));
    }
    for e in &spec.fault_events {
        if !events.contains(e.as_str()) {
            out.push(Violation::UnknownFaultEvent(e.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    let mut live = BTreeSet::new();
    for (i, t) in spec.transitions.iter().enumerate() {
        for s in [&t.from, &t.to] {
            if !states.contains(s.as_str()) {
                out.push(Violation::UnknownState { transition: i, state: s.clone() });
            }
        }
        if !events.contains(t.event.as_str()) {
            out.push(Violation::UnknownEvent { transition: i, event: t.event.clone() });
        }
        for o in &t.obs {
            if !o.is_empty() && !outputs.contains(o.as_str()) {
                out.push(Violation::UnknownOutput { transition: i, output: o.clone() });
            }
        }
        if !seen.insert((t.from.as_str(), t.event.as_str())) {
            out.push(Violation::Nondeterministic { state: t.from.clone(), event: t.event.clone() });
        }
        if t.obs.is_empty() {
            out.push(Violation::EmptyObservation { state: t.from.clone(), event: t.event.clone() });
        }
        live.insert(t.from.as_str());
    }
    for s in &states {
        if !live.contains(s) {
            out.push(Violation::NotLive { state: s.to_string() });
        }
    }
    out
}

fn collect_unique<'a>(
    names: &'a [String],
    out: &mut Vec<Violation>,
    dup: fn(String) -> Violation,
) -> BTreeSet<&'a str> {
    let mut set = BTreeSet::new();
    for n in names {
        if !set.insert(n.as_str()) {
            out.push(dup(n.clone()));
        }
    }
    set
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub target: usize,
    pub observations: BTreeSet<Output>,
}

/// Which component of an extended string to project onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    State,
    Event,
    /// Observable record: silent outputs are dropped.
    Output,
}

/// A validated plant. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantModel {
    states: Vec<String>,
    events: Vec<String>,
    outputs: Vec<String>,
    initial: usize,
    fault_events: BTreeSet<usize>,
    transitions: BTreeMap<(usize, usize), Transition>,
}

impl PlantModel {
    /// Build a plant, rejecting any invariant violation. With `allow_non_live`
    /// liveness violations are tolerated (callers may report them as warnings).
    pub fn from_spec(spec: &PlantSpec, allow_non_live: bool) -> Result<Self, ModelError> {
        let violations: Vec<_> = validate_plant(spec)
            .into_iter()
            .filter(|v| !(allow_non_live && v.is_liveness()))
            .collect();
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        let sorted = |v: &[String]| {
            let mut v = v.to_vec();
            v.sort();
            v
        };
        let states = sorted(&spec.states);
        let events = sorted(&spec.events);
        let outputs = sorted(&spec.outputs);
        let find = |v: &[String], n: &str| v.binary_search_by(|x| x.as_str().cmp(n)).unwrap();
        let mut transitions = BTreeMap::new();
        for t in &spec.transitions {
            let observations = t
                .obs
                .iter()
                .map(|o| {
                    if o.is_empty() {
                        Output::Silent
                    } else {
                        Output::Symbol(find(&outputs, o))
                    }
                })
                .collect();
            transitions.insert(
                (find(&states, &t.from), find(&events, &t.event)),
                Transition { target: find(&states, &t.to), observations },
            );
        }
        Ok(Self {
            initial: find(&states, &spec.initial),
            fault_events: spec.fault_events.iter().map(|e| find(&events, e)).collect(),
            states,
            events,
            outputs,
            transitions,
        })
    }

    pub fn from_json(text: &str, allow_non_live: bool) -> Result<Self, ModelError> {
        let spec: PlantSpec = serde_json::from_str(text)?;
        Self::from_spec(&spec, allow_non_live)
    }

    pub fn to_spec(&self) -> PlantSpec {
        PlantSpec {
            states: self.states.clone(),
            events: self.events.clone(),
            outputs: self.outputs.clone(),
            initial: self.states[self.initial].clone(),
            fault_events: self.fault_events.iter().map(|&e| self.events[e].clone()).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|(&(q, e), t)| TransitionSpec {
                    from: self.states[q].clone(),
                    event: self.events[e].clone(),
                    to: self.states[t.target].clone(),
                    obs: t
                        .observations
                        .iter()
                        .map(|&o| self.output_spelling(o).to_string())
                        .collect(),
                })
                .collect(),
        }
    }

    /// Copy of this plant whose observation sets are replaced on the given
    /// transitions. Symbols (`None` = silent) not yet declared are added to the
    /// output alphabet, so output indices of the result may differ from `self`.
    pub fn with_observations(
        &self,
        overlay: &BTreeMap<(usize, usize), BTreeSet<Option<String>>>,
    ) -> Result<Self, ModelError> {
        let mut spec = self.to_spec();
        let mut outputs: BTreeSet<String> = spec.outputs.iter().cloned().collect();
        for t in spec.transitions.iter_mut() {
            let key = (self.state_index(&t.from).unwrap(), self.event_index(&t.event).unwrap());
            if let Some(obs) = overlay.get(&key) {
                t.obs = obs.iter().map(|o| o.clone().unwrap_or_default()).collect();
                outputs.extend(obs.iter().flatten().cloned());
            }
        }
        spec.outputs = outputs.into_iter().collect();
        Self::from_spec(&spec, true)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn events(&self) -> &[String] {
        &self.events
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn fault_events(&self) -> &BTreeSet<usize> {
        &self.fault_events
    }

    pub fn is_fault_event(&self, event: usize) -> bool {
        self.fault_events.contains(&event)
    }

    pub fn transitions(&self) -> &BTreeMap<(usize, usize), Transition> {
        &self.transitions
    }

    pub fn transition(&self, state: usize, event: usize) -> Option<&Transition> {
        self.transitions.get(&(state, event))
    }

    /// δ(q, σ)
    pub fn delta(&self, state: usize, event: usize) -> Option<usize> {
        self.transition(state, event).map(|t| t.target)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.binary_search_by(|s| s.as_str().cmp(name)).ok()
    }

    pub fn event_index(&self, name: &str) -> Option<usize> {
        self.events.binary_search_by(|s| s.as_str().cmp(name)).ok()
    }

    pub fn output_index(&self, name: &str) -> Option<usize> {
        self.outputs.binary_search_by(|s| s.as_str().cmp(name)).ok()
    }

    /// Resolve a JSON output spelling (`""` is silent).
    pub fn parse_output(&self, name: &str) -> Option<Output> {
        if name.is_empty() {
            Some(Output::Silent)
        } else {
            self.output_index(name).map(Output::Symbol)
        }
    }

    /// Build an extended event from names; `None` if any name is unknown.
    pub fn extended_event(&self, state: &str, event: &str, output: &str) -> Option<ExtendedEvent> {
        Some(ExtendedEvent::new(
            self.state_index(state)?,
            self.event_index(event)?,
            self.parse_output(output)?,
        ))
    }

    pub fn state_name(&self, state: usize) -> &str {
        &self.states[state]
    }

    pub fn event_name(&self, event: usize) -> &str {
        &self.events[event]
    }

    /// Human-readable output name; the silent output renders as `ε`.
    pub fn output_name(&self, output: Output) -> &str {
        match output {
            Output::Silent => "ε",
            Output::Symbol(o) => &self.outputs[o],
        }
    }

    /// JSON spelling of an output; the silent output is `""`.
    pub fn output_spelling(&self, output: Output) -> &str {
        match output {
            Output::Silent => "",
            Output::Symbol(o) => &self.outputs[o],
        }
    }

    pub fn format_event(&self, e: &ExtendedEvent) -> String {
        format!(
            "({},{},{})",
            self.state_name(e.state),
            self.event_name(e.event),
            self.output_name(e.output)
        )
    }

    pub fn format_string(&self, s: &[ExtendedEvent]) -> String {
        s.iter().map(|e| self.format_event(e)).collect()
    }

    /// True iff δ(q,σ) is defined and `o ∈ 𝒪(q,σ)`.
    pub fn is_valid_event(&self, e: &ExtendedEvent) -> bool {
        self.transition(e.state, e.event)
            .is_some_and(|t| t.observations.contains(&e.output))
    }

    /// Every valid extended event leaving `state`, paired with its successor.
    pub fn extended_successors(
        &self,
        state: usize,
    ) -> Result<Vec<(ExtendedEvent, usize)>, ModelError> {
        if state >= self.states.len() {
            return Err(ModelError::UnknownState(state.to_string()));
        }
        Ok(self.successors_unchecked(state).collect())
    }

    pub(crate) fn successors_unchecked(
        &self,
        state: usize,
    ) -> impl Iterator<Item = (ExtendedEvent, usize)> + '_ {
        self.transitions
            .range((state, 0)..(state + 1, 0))
            .flat_map(move |(&(q, e), t)| {
                t.observations
                    .iter()
                    .map(move |&o| (ExtendedEvent::new(q, e, o), t.target))
            })
    }

    /// Every valid extended event of the plant, in lexicographic order.
    pub fn extended_events(&self) -> impl Iterator<Item = ExtendedEvent> + '_ {
        self.transitions.iter().flat_map(|(&(q, e), t)| {
            t.observations.iter().map(move |&o| ExtendedEvent::new(q, e, o))
        })
    }

    /// Follow `s` from `start`; returns the reached state if `s` is generated.
    pub fn run_from(&self, start: usize, s: &[ExtendedEvent]) -> Option<usize> {
        let mut q = start;
        for e in s {
            if e.state != q || !self.is_valid_event(e) {
                return None;
            }
            q = self.delta(e.state, e.event)?;
        }
        Some(q)
    }

    /// Whether the finite extended string is generated from the initial state.
    pub fn generates(&self, s: &[ExtendedEvent]) -> bool {
        self.run_from(self.initial, s).is_some()
    }

    /// Whether `prefix · cycle^ω` is generated: the prefix runs from the
    /// initial state and the non-empty cycle returns to where it started.
    pub fn generates_lasso(&self, lasso: &Lasso<ExtendedEvent>) -> bool {
        if lasso.cycle.is_empty() {
            return false;
        }
        let Some(q) = self.run_from(self.initial, &lasso.prefix) else {
            return false;
        };
        self.run_from(q, &lasso.cycle) == Some(q)
    }

    /// Whether some extended event of `s` carries a fault event.
    pub fn is_faulty(&self, s: &[ExtendedEvent]) -> bool {
        s.iter().any(|e| self.is_fault_event(e.event))
    }
}

/// Θ_Q, Θ_Σ or Θ_Δ of an extended string, as indices into the plant's tables.
/// The output projection drops silent readings.
pub fn project(s: &[ExtendedEvent], axis: Axis) -> Vec<usize> {
    s.iter().filter_map(|e| project_event(e, axis)).collect()
}

/// Output projection keeping silent readings (debugging aid).
pub fn project_outputs_raw(s: &[ExtendedEvent]) -> Vec<Output> {
    s.iter().map(|e| e.output).collect()
}

pub fn project_lasso(lasso: &Lasso<ExtendedEvent>, axis: Axis) -> Lasso<usize> {
    lasso.filter_map(|e| project_event(e, axis))
}

fn project_event(e: &ExtendedEvent, axis: Axis) -> Option<usize> {
    match axis {
        Axis::State => Some(e.state),
        Axis::Event => Some(e.event),
        Axis::Output => e.output.symbol(),
    }
}

/// The running example with eight states (fault branch 1-2-3-4, normal branch 1-5-…-8).
pub fn example_g1_spec() -> PlantSpec {
    let t = TransitionSpec::new;
    PlantSpec {
        states: (1..=8).map(|i| i.to_string()).collect(),
        events: ["a", "b", "c", "f", "u"].map(String::from).to_vec(),
        outputs: ["a", "b", "c", "f", "u"].map(String::from).to_vec(),
        initial: "1".into(),
        fault_events: vec!["f".into()],
        transitions: vec![
            t("1", "f", "2", &[""]),
            t("1", "u", "5", &[""]),
            t("2", "a", "3", &["a"]),
            t("3", "b", "4", &["b", ""]),
            t("4", "c", "2", &["c"]),
            t("5", "a", "6", &["a"]),
            t("6", "b", "7", &["b", ""]),
            t("7", "c", "8", &["c"]),
            t("8", "a", "7", &["a"]),
        ],
    }
}

/// The channel-loss example: same shape as G₁ with every a/b/c reading lossy.
pub fn example_g2_spec() -> PlantSpec {
    let t = TransitionSpec::new;
    PlantSpec {
        states: (1..=8).map(|i| i.to_string()).collect(),
        events: ["a", "b", "c", "f", "u"].map(String::from).to_vec(),
        outputs: ["a", "b", "c"].map(String::from).to_vec(),
        initial: "1".into(),
        fault_events: vec!["f".into()],
        transitions: vec![
            t("1", "f", "2", &[""]),
            t("1", "u", "5", &[""]),
            t("2", "a", "3", &["a", ""]),
            t("3", "b", "4", &["b", ""]),
            t("4", "c", "2", &["c", ""]),
            t("5", "a", "6", &["a", ""]),
            t("6", "b", "7", &["b", ""]),
            t("7", "c", "8", &["c", ""]),
            t("8", "a", "7", &["a", ""]),
        ],
    }
}

/// The output-fairness example over outputs {o1, o2}.
pub fn example_g3_spec() -> PlantSpec {
    let t = TransitionSpec::new;
    PlantSpec {
        states: (1..=5).map(|i| i.to_string()).collect(),
        events: ["a", "b", "f", "u"].map(String::from).to_vec(),
        outputs: ["o1", "o2"].map(String::from).to_vec(),
        initial: "1".into(),
        fault_events: vec!["f".into()],
        transitions: vec![
            t("1", "f", "2", &["o1"]),
            t("1", "u", "4", &["o1"]),
            t("2", "a", "3", &["o1", "o2"]),
            t("3", "b", "2", &["o2"]),
            t("4", "a", "5", &["o1"]),
            t("5", "b", "4", &["o2"]),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> PlantModel {
        PlantModel::from_spec(&example_g1_spec(), false).unwrap()
    }

    fn ev(m: &PlantModel, q: &str, e: &str, o: &str) -> ExtendedEvent {
        m.extended_event(q, e, o).unwrap()
    }

    #[test]
    fn g1_is_valid() {
        assert!(validate_plant(&example_g1_spec()).is_empty());
        assert!(validate_plant(&example_g2_spec()).is_empty());
        assert!(validate_plant(&example_g3_spec()).is_empty());
    }

    #[test]
    fn removing_only_transition_breaks_liveness() {
        let mut spec = example_g1_spec();
        spec.transitions.retain(|t| t.from != "4");
        assert_eq!(validate_plant(&spec), vec![Violation::NotLive { state: "4".into() }]);
        assert!(PlantModel::from_spec(&spec, false).is_err());
        let m = PlantModel::from_spec(&spec, true).unwrap();
        assert!(m.extended_successors(m.state_index("4").unwrap()).unwrap().is_empty());
    }

    #[test]
    fn empty_observation_set_is_reported() {
        let mut spec = example_g1_spec();
        spec.transitions.iter_mut().find(|t| t.from == "3").unwrap().obs.clear();
        assert_eq!(
            validate_plant(&spec),
            vec![Violation::EmptyObservation { state: "3".into(), event: "b".into() }]
        );
    }

    #[test]
    fn reserved_output_spellings_rejected() {
        for bad in ["eps", "~", "ε"] {
            let mut spec = example_g1_spec();
            spec.outputs.push(bad.into());
            assert_eq!(validate_plant(&spec), vec![Violation::ReservedOutput(bad.into())]);
        }
    }

    #[test]
    fn nondeterminism_and_unknown_names() {
        let mut spec = example_g1_spec();
        spec.transitions.push(TransitionSpec::new("3", "b", "2", &["b"]));
        spec.transitions.push(TransitionSpec::new("3", "z", "9", &["q"]));
        spec.fault_events.push("g".into());
        let v = validate_plant(&spec);
        assert!(v.contains(&Violation::Nondeterministic { state: "3".into(), event: "b".into() }));
        assert!(v.contains(&Violation::UnknownState { transition: 10, state: "9".into() }));
        assert!(v.contains(&Violation::UnknownEvent { transition: 10, event: "z".into() }));
        assert!(v.contains(&Violation::UnknownOutput { transition: 10, output: "q".into() }));
        assert!(v.contains(&Violation::UnknownFaultEvent("g".into())));
    }

    #[test]
    fn successors_of_state_3_and_2() {
        let m = g1();
        let s3 = m.state_index("3").unwrap();
        let s4 = m.state_index("4").unwrap();
        let got: BTreeSet<_> = m.extended_successors(s3).unwrap().into_iter().collect();
        let want: BTreeSet<_> =
            [(ev(&m, "3", "b", "b"), s4), (ev(&m, "3", "b", ""), s4)].into_iter().collect();
        assert_eq!(got, want);
        let s2 = m.state_index("2").unwrap();
        assert_eq!(m.extended_successors(s2).unwrap(), vec![(ev(&m, "2", "a", "a"), s3)]);
        assert!(matches!(m.extended_successors(99), Err(ModelError::UnknownState(_))));
    }

    #[test]
    fn output_projection_drops_silent() {
        let m = g1();
        let lost = [ev(&m, "1", "f", ""), ev(&m, "2", "a", "a"), ev(&m, "3", "b", "")];
        let seen = [ev(&m, "1", "f", ""), ev(&m, "2", "a", "a"), ev(&m, "3", "b", "b")];
        let a = m.output_index("a").unwrap();
        let b = m.output_index("b").unwrap();
        assert_eq!(project(&lost, Axis::Output), vec![a]);
        assert_eq!(project(&seen, Axis::Output), vec![a, b]);
        assert!(project(&[], Axis::State).is_empty());
        assert_eq!(project_outputs_raw(&lost).len(), 3);
    }

    #[test]
    fn faultiness() {
        let m = g1();
        assert!(m.is_faulty(&[ev(&m, "1", "f", ""), ev(&m, "2", "a", "a")]));
        assert!(!m.is_faulty(&[ev(&m, "1", "u", ""), ev(&m, "5", "a", "a")]));
        assert!(!m.is_faulty(&[]));
    }

    #[test]
    fn generation_checks() {
        let m = g1();
        let s = [ev(&m, "1", "f", ""), ev(&m, "2", "a", "a"), ev(&m, "3", "b", "")];
        assert!(m.generates(&s));
        assert!(!m.generates(&s[1..]));
        assert!(!m.generates(&[ev(&m, "1", "f", "a")]));
        let lasso = Lasso::new(
            vec![ev(&m, "1", "f", "")],
            vec![ev(&m, "2", "a", "a"), ev(&m, "3", "b", ""), ev(&m, "4", "c", "c")],
        );
        assert!(m.generates_lasso(&lasso));
        let broken = Lasso::new(vec![], lasso.cycle.clone());
        assert!(!m.generates_lasso(&broken));
    }

    #[test]
    fn overlay_adds_outputs() {
        let m = g1();
        let key = (m.state_index("1").unwrap(), m.event_index("u").unwrap());
        let overlay = [(key, [Some("z".to_string()), None].into_iter().collect())].into();
        let m2 = m.with_observations(&overlay).unwrap();
        assert!(m2.output_index("z").is_some());
        assert_eq!(m2.transition(key.0, key.1).unwrap().observations.len(), 2);
    }

    #[test]
    fn spec_round_trip() {
        let m = g1();
        let back = PlantModel::from_spec(&m.to_spec(), false).unwrap();
        assert_eq!(m, back);
    }
}

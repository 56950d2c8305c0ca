//! Brute-force reference procedures for small instances.
//!
//! Nothing here uses the synthesis or checker modules: T and V are rebuilt by
//! plain fixpoint iteration and the cycle condition is tested with repeated
//! reachability searches instead of strongly connected components. Everything
//! is slow on purpose.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraint::{Labeling, SensorConstraint};
use crate::lasso::Lasso;
use crate::ltl::{ltl_to_nba, BuchiAutomaton};
use crate::model::{project_lasso, Axis, ExtendedEvent, Output, PlantModel, PlantSpec, TransitionSpec};
use crate::templates::{DwellTime, IntermittentPermanent, KLoss, OutputFairness, ScenarioSpec, TransitionRef};

/// Default edge-visit budget for [`brute_check`].
pub const DEFAULT_BUDGET: u64 = 20_000_000;

/// Cap on the number of strings [`enumerate_compatible`] keeps per step.
pub const MAX_STRINGS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BruteVerdict {
    Diagnosable,
    NotDiagnosable,
    /// The search ran out of budget before reaching a decision.
    BoundExceeded,
}

impl BruteVerdict {
    pub fn diagnosable(self) -> Option<bool> {
        match self {
            BruteVerdict::Diagnosable => Some(true),
            BruteVerdict::NotDiagnosable => Some(false),
            BruteVerdict::BoundExceeded => None,
        }
    }
}

fn plant_moves(model: &PlantModel, q: usize) -> Vec<(ExtendedEvent, usize)> {
    let mut out = Vec::new();
    for (&(p, e), tr) in model.transitions() {
        if p != q {
            continue;
        }
        for &o in &tr.observations {
            out.push((ExtendedEvent { state: q, event: e, output: o }, tr.target));
        }
    }
    out
}

fn forward(succ: &[Vec<usize>], from: usize) -> Vec<bool> {
    let mut seen = vec![false; succ.len()];
    let mut stack = vec![from];
    while let Some(x) = stack.pop() {
        for &y in &succ[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// (plant state, fault seen, NBA state)
pub type ProductKey = (usize, bool, usize);

/// T rebuilt from scratch.
#[derive(Debug, Clone)]
pub struct NaiveProduct {
    pub states: Vec<ProductKey>,
    pub initial: Vec<usize>,
    pub edges: Vec<Vec<(ExtendedEvent, usize)>>,
    pub accepting: Vec<bool>,
    pub feasible: Vec<bool>,
}

impl NaiveProduct {
    pub fn new(model: &PlantModel, constraint: &SensorConstraint) -> Self {
        Self::with_nba(model, &constraint.labeling, &ltl_to_nba(&constraint.formula))
    }

    pub fn with_nba(model: &PlantModel, labeling: &Labeling, nba: &BuchiAutomaton) -> Self {
        let init: BTreeSet<ProductKey> = nba.initial().iter().map(|&x| (model.initial(), false, x)).collect();
        let mut all = init.clone();
        loop {
            let mut next = all.clone();
            for &(q, f, x) in &all {
                for (e, r) in plant_moves(model, q) {
                    for y in nba.successors(x, labeling.get(&e)) {
                        next.insert((r, f || model.is_fault_event(e.event), y));
                    }
                }
            }
            if next.len() == all.len() {
                break;
            }
            all = next;
        }
        let states: Vec<ProductKey> = all.into_iter().collect();
        let index: BTreeMap<ProductKey, usize> = states.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let edges: Vec<Vec<(ExtendedEvent, usize)>> = states
            .iter()
            .map(|&(q, f, x)| {
                let mut out = Vec::new();
                for (e, r) in plant_moves(model, q) {
                    for y in nba.successors(x, labeling.get(&e)) {
                        out.push((e, index[&(r, f || model.is_fault_event(e.event), y)]));
                    }
                }
                out
            })
            .collect();
        let accepting: Vec<bool> = states.iter().map(|&(_, _, x)| nba.is_accepting(x)).collect();
        let succ: Vec<Vec<usize>> = edges.iter().map(|v| v.iter().map(|&(_, j)| j).collect()).collect();
        let reach: Vec<Vec<bool>> = (0..states.len()).map(|i| forward(&succ, i)).collect();
        let good: Vec<usize> = (0..states.len()).filter(|&a| accepting[a] && reach[a][a]).collect();
        let feasible = (0..states.len()).map(|i| good.iter().any(|&a| a == i || reach[i][a])).collect();
        Self { initial: init.iter().map(|k| index[k]).collect(), states, edges, accepting, feasible }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn is_faulty(&self, i: usize) -> bool {
        self.states[i].1
    }

    /// States reached by a finite extended string, restricted to feasible
    /// ones after every step.
    pub fn feasible_run(&self, s: &[ExtendedEvent]) -> BTreeSet<usize> {
        let mut cur: BTreeSet<usize> = self.initial.iter().copied().filter(|&i| self.feasible[i]).collect();
        for e in s {
            cur = cur
                .iter()
                .flat_map(|&i| &self.edges[i])
                .filter(|&&(ev, j)| ev == *e && self.feasible[j])
                .map(|&(_, j)| j)
                .collect();
        }
        cur
    }
}

// Is there a closed walk through an accepting vertex that uses a flagged
// edge? Such a walk exists iff some accepting `a` reaches the source of a
// flagged edge whose target reaches `a` back. `budget` bounds the number of
// edge visits. Parallel edges are merged, keeping the flag if any has it.
fn closed_walk_search(succ: &[BTreeMap<usize, bool>], accepting: &[bool], budget: u64) -> BruteVerdict {
    let n = succ.len();
    let plain: Vec<Vec<usize>> = succ.iter().map(|m| m.keys().copied().collect()).collect();
    let mut pred = vec![Vec::new(); n];
    for (x, out) in plain.iter().enumerate() {
        for &y in out {
            pred[y].push(x);
        }
    }
    let mut steps = 0u64;
    let mut reach = |adj: &[Vec<usize>], from: usize| -> Option<Vec<bool>> {
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(x) = stack.pop() {
            steps += adj[x].len() as u64;
            if steps > budget {
                return None;
            }
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        Some(seen)
    };
    // accepting vertices mutually reachable with one already tried have the
    // same forward and backward sets
    let mut done = vec![false; n];
    for a in (0..n).filter(|&a| accepting[a]) {
        if done[a] {
            continue;
        }
        let Some(fwd) = reach(&plain, a) else { return BruteVerdict::BoundExceeded };
        let Some(bwd) = reach(&pred, a) else { return BruteVerdict::BoundExceeded };
        for x in 0..n {
            done[x] |= fwd[x] && bwd[x];
        }
        let hit = (0..n).filter(|&u| fwd[u]).any(|u| succ[u].iter().any(|(&w, &flag)| flag && bwd[w]));
        if hit {
            return BruteVerdict::NotDiagnosable;
        }
    }
    BruteVerdict::Diagnosable
}

type PairKey = (usize, usize);

fn pair_closure(
    init: Vec<PairKey>,
    mut moves: impl FnMut(PairKey) -> Vec<(bool, PairKey)>,
) -> (Vec<PairKey>, Vec<BTreeMap<usize, bool>>) {
    let mut all: BTreeSet<PairKey> = init.into_iter().collect();
    loop {
        let mut next = all.clone();
        for &k in &all {
            next.extend(moves(k).into_iter().map(|(_, t)| t));
        }
        if next.len() == all.len() {
            break;
        }
        all = next;
    }
    let states: Vec<PairKey> = all.into_iter().collect();
    let index: BTreeMap<PairKey, usize> = states.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let succ = states
        .iter()
        .map(|&k| {
            let mut m: BTreeMap<usize, bool> = BTreeMap::new();
            for (flag, t) in moves(k) {
                *m.entry(index[&t]).or_default() |= flag;
            }
            m
        })
        .collect();
    (states, succ)
}

// joint moves on equal symbols, silent moves one side at a time; the flag
// marks moves of the first copy
fn twin_moves(
    a: &[(ExtendedEvent, usize)],
    b: &[(ExtendedEvent, usize)],
    (x, y): PairKey,
) -> Vec<(bool, PairKey)> {
    let mut out = Vec::new();
    for &(e1, r1) in a {
        if e1.output == Output::Silent {
            out.push((true, (r1, y)));
        } else {
            for &(e2, r2) in b {
                if e2.output == e1.output {
                    out.push((true, (r1, r2)));
                }
            }
        }
    }
    for &(e2, r2) in b {
        if e2.output == Output::Silent {
            out.push((false, (x, r2)));
        }
    }
    out
}

/// Decide diagnosability by rebuilding V naively and searching it for a
/// violating closed walk. `budget` bounds the number of edge visits.
pub fn brute_check(model: &PlantModel, constraint: &SensorConstraint, budget: u64) -> BruteVerdict {
    brute_check_product(&NaiveProduct::new(model, constraint), budget)
}

pub fn brute_check_product(t: &NaiveProduct, budget: u64) -> BruteVerdict {
    let init = t.initial.iter().flat_map(|&a| t.initial.iter().map(move |&b| (a, b))).collect();
    let (states, succ) = pair_closure(init, |(x, y)| twin_moves(&t.edges[x], &t.edges[y], (x, y)));
    let accepting: Vec<bool> = states
        .iter()
        .map(|&(x, y)| t.accepting[x] && t.is_faulty(x) && t.feasible[y] && !t.is_faulty(y))
        .collect();
    closed_walk_search(&succ, &accepting, budget)
}

/// Classic twin-plant test for the unconstrained case. No automaton is
/// involved: states are plant states tagged with a fault bit.
pub fn twin_plant_check(model: &PlantModel, budget: u64) -> BruteVerdict {
    // encode (q, fault) as 2q + fault
    let n = model.states().len();
    let moves: Vec<Vec<(ExtendedEvent, usize)>> = (0..2 * n)
        .map(|s| {
            plant_moves(model, s / 2)
                .into_iter()
                .map(|(e, r)| (e, 2 * r + usize::from(s % 2 == 1 || model.is_fault_event(e.event))))
                .collect()
        })
        .collect();
    let q0 = 2 * model.initial();
    let (states, succ) = pair_closure(vec![(q0, q0)], |(x, y)| twin_moves(&moves[x], &moves[y], (x, y)));
    let accepting: Vec<bool> = states.iter().map(|&(x, y)| x % 2 == 1 && y % 2 == 0).collect();
    closed_walk_search(&succ, &accepting, budget)
}

/// Finite extended strings with a given observation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Enumeration {
    pub strings: BTreeSet<Vec<ExtendedEvent>>,
    /// Some silent continuation or some string was cut off by a budget.
    pub partial: bool,
}

impl Enumeration {
    /// Every string contains a fault (and there is at least one string).
    pub fn all_faulty(&self, model: &PlantModel) -> bool {
        !self.strings.is_empty() && self.strings.iter().all(|s| model.is_faulty(s))
    }
}

/// All constraint-feasible finite strings whose visible output is
/// `observation` (output indices), with at most `2·|T|` silent steps in a row.
pub fn enumerate_compatible(model: &PlantModel, constraint: &SensorConstraint, observation: &[usize]) -> Enumeration {
    enumerate_in(&NaiveProduct::new(model, constraint), observation)
}

pub fn enumerate_in(t: &NaiveProduct, observation: &[usize]) -> Enumeration {
    enumerate_capped(t, observation, MAX_STRINGS)
}

/// [`enumerate_in`] with a caller-chosen cap on the strings kept per step.
pub fn enumerate_capped(t: &NaiveProduct, observation: &[usize], cap: usize) -> Enumeration {
    let budget = 2 * t.len();
    let mut partial = false;
    let mut frontier: BTreeSet<(usize, Vec<ExtendedEvent>)> =
        t.initial.iter().filter(|&&i| t.feasible[i]).map(|&i| (i, Vec::new())).collect();
    let silent_closure = |start: BTreeSet<(usize, Vec<ExtendedEvent>)>, partial: &mut bool| {
        let mut all = start.clone();
        let mut layer = start;
        for _ in 0..budget {
            let mut next = BTreeSet::new();
            for (i, s) in &layer {
                for &(e, j) in &t.edges[*i] {
                    if e.output.is_silent() && t.feasible[j] {
                        let mut s2 = s.clone();
                        s2.push(e);
                        next.insert((j, s2));
                    }
                }
                if all.len() + next.len() > cap {
                    break;
                }
            }
            if next.is_empty() {
                return all;
            }
            all.extend(next.iter().cloned());
            if all.len() > cap {
                *partial = true;
                return all;
            }
            layer = next;
        }
        if layer.iter().any(|(i, _)| t.edges[*i].iter().any(|&(e, j)| e.output.is_silent() && t.feasible[j])) {
            *partial = true;
        }
        all
    };
    frontier = silent_closure(frontier, &mut partial);
    for &sym in observation {
        let mut next = BTreeSet::new();
        for (i, s) in &frontier {
            for &(e, j) in &t.edges[*i] {
                if e.output == Output::Symbol(sym) && t.feasible[j] {
                    let mut s2 = s.clone();
                    s2.push(e);
                    next.insert((j, s2));
                }
            }
            if next.len() > cap {
                partial = true;
                break;
            }
        }
        frontier = silent_closure(next, &mut partial);
    }
    Enumeration { strings: frontier.into_iter().map(|(_, s)| s).collect(), partial }
}

// BFS inside feasible states to the first vertex satisfying `goal`, returning
// the events along the way. `goal` is tested on successors, so the start
// vertex itself only counts when it is reached again.
fn search(
    t: &NaiveProduct,
    from: usize,
    goal: impl Fn(usize) -> bool,
) -> Option<(usize, Vec<ExtendedEvent>)> {
    let mut prev: BTreeMap<usize, (usize, ExtendedEvent)> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = BTreeSet::from([from]);
    while let Some(x) = queue.pop_front() {
        for &(e, y) in &t.edges[x] {
            if !t.feasible[y] {
                continue;
            }
            if goal(y) {
                let mut path = vec![e];
                let mut at = x;
                while at != from {
                    let (p, ev) = prev[&at];
                    path.push(ev);
                    at = p;
                }
                path.reverse();
                return Some((y, path));
            }
            if seen.insert(y) {
                prev.insert(y, (x, e));
                queue.push_back(y);
            }
        }
    }
    None
}

/// A random faulty lasso whose every position stays feasible and whose cycle
/// passes an accepting state, so it satisfies the constraint. `None` when no
/// fault is reachable.
pub fn sample_faulty_lasso<R: Rng>(t: &NaiveProduct, rng: &mut R, walk: usize) -> Option<Lasso<ExtendedEvent>> {
    // feasible states from which a feasible faulty state is reachable
    let mut live = (0..t.len()).map(|i| t.feasible[i] && t.is_faulty(i)).collect::<Vec<_>>();
    loop {
        let grown: Vec<bool> = (0..t.len())
            .map(|i| live[i] || (t.feasible[i] && t.edges[i].iter().any(|&(_, j)| live[j])))
            .collect();
        if grown == live {
            break;
        }
        live = grown;
    }
    let starts: Vec<usize> = t.initial.iter().copied().filter(|&i| live[i]).collect();
    let mut cur = *starts.choose(rng)?;
    let mut prefix = Vec::new();
    for _ in 0..walk {
        let options: Vec<&(ExtendedEvent, usize)> = t.edges[cur].iter().filter(|(_, j)| live[*j]).collect();
        let &&(e, j) = options.choose(rng)?;
        prefix.push(e);
        cur = j;
    }
    if !t.is_faulty(cur) {
        let (j, path) = search(t, cur, |y| t.is_faulty(y))?;
        prefix.extend(path);
        cur = j;
    }
    let on_cycle = |a: usize| t.accepting[a] && search(t, a, |y| y == a).is_some();
    if !on_cycle(cur) {
        let (j, path) = search(t, cur, on_cycle)?;
        prefix.extend(path);
        cur = j;
    }
    let (_, cycle) = search(t, cur, |y| y == cur)?;
    Some(Lasso::new(prefix, cycle))
}

/// Distinct observations of normal feasible strings of length at most
/// `depth`, each with the shortest string producing it first.
pub fn normal_observations(t: &NaiveProduct, depth: usize) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    let mut layer: BTreeSet<(usize, Vec<usize>)> = t
        .initial
        .iter()
        .filter(|&&i| t.feasible[i] && !t.is_faulty(i))
        .map(|&i| (i, Vec::new()))
        .collect();
    for _ in 0..=depth {
        let mut next = BTreeSet::new();
        for (i, obs) in &layer {
            out.insert(obs.clone());
            for &(e, j) in &t.edges[*i] {
                if t.feasible[j] && !t.is_faulty(j) {
                    let mut o = obs.clone();
                    if let Output::Symbol(s) = e.output {
                        o.push(s);
                    }
                    next.insert((j, o));
                }
            }
        }
        layer = next;
    }
    out
}

fn same_infinite_word(a: &Lasso<usize>, b: &Lasso<usize>) -> bool {
    match (a.cycle.is_empty(), b.cycle.is_empty()) {
        (true, true) => a.prefix == b.prefix,
        (false, false) => {
            let n = a.prefix.len().max(b.prefix.len()) + a.cycle.len() * b.cycle.len();
            (0..n).all(|i| a.at(i) == b.at(i))
        }
        _ => false,
    }
}

/// Re-check a counterexample: θ₁ is a faulty constraint-compatible infinite
/// string, θ₂ is normal and every prefix of it can still be extended to a
/// compatible string, and both produce the same observation.
pub fn validate_witness(
    model: &PlantModel,
    constraint: &SensorConstraint,
    theta1: &Lasso<ExtendedEvent>,
    theta2: &Lasso<ExtendedEvent>,
) -> Result<(), String> {
    if !model.generates_lasso(theta1) {
        return Err("θ1 is not generated by the plant".into());
    }
    if !model.is_faulty(&theta1.prefix) && !model.is_faulty(&theta1.cycle) {
        return Err("θ1 contains no fault".into());
    }
    if !constraint.is_compatible(theta1) {
        return Err("θ1 violates the constraint".into());
    }
    let t = NaiveProduct::new(model, constraint);
    let reps = if theta2.cycle.is_empty() { 0 } else { t.len() + 1 };
    let s2 = theta2.unroll(reps);
    if model.is_faulty(&s2) {
        return Err("θ2 contains a fault".into());
    }
    if !model.generates(&s2) {
        return Err("θ2 is not generated by the plant".into());
    }
    if t.feasible_run(&s2).is_empty() {
        return Err("θ2 leaves the constraint-feasible part".into());
    }
    let (o1, o2) = (project_lasso(theta1, Axis::Output), project_lasso(theta2, Axis::Output));
    if !same_infinite_word(&o1, &o2) {
        return Err("θ1 and θ2 are observed differently".into());
    }
    Ok(())
}

/// A random live deterministic plant with up to `max_states` states, event
/// `f` as the only fault and outputs drawn from `o1`, `o2` and silence.
/// The plant and scenario used for sweep instance `seed`: at most 5 states,
/// 4 events and 2 outputs, with a random template constraint.
pub fn random_instance_spec(seed: u64) -> (PlantSpec, ScenarioSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plant = random_plant(&mut rng, 5, 4, 2);
    let model = PlantModel::from_spec(&plant, false).expect("generated plants are live");
    let scenario = random_scenario(&mut rng, &model);
    (plant, scenario)
}

pub fn random_plant<R: Rng>(rng: &mut R, max_states: usize, max_events: usize, max_outputs: usize) -> PlantSpec {
    let n = rng.gen_range(2..=max_states.max(2));
    let events: Vec<String> = ["f", "a", "b", "c", "d", "e"][..rng.gen_range(2..=max_events.clamp(2, 6))]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let outputs: Vec<String> = (1..=rng.gen_range(1..=max_outputs.max(1))).map(|i| format!("o{i}")).collect();
    let states: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut transitions = Vec::new();
    for q in &states {
        let mut evs: Vec<&String> = events.iter().filter(|_| rng.gen_bool(0.45)).collect();
        if evs.is_empty() {
            evs.push(events.choose(rng).unwrap());
        }
        for e in evs {
            let to = states.choose(rng).unwrap();
            let mut obs: Vec<&str> = outputs.iter().map(String::as_str).filter(|_| rng.gen_bool(0.4)).collect();
            if rng.gen_bool(0.4) || obs.is_empty() {
                obs.push("");
            }
            transitions.push(TransitionSpec::new(q, e, to, &obs));
        }
    }
    PlantSpec {
        states,
        events,
        outputs,
        initial: "0".into(),
        fault_events: vec!["f".into()],
        transitions,
    }
}

/// A random template scenario over the plant's events and transitions.
pub fn random_scenario<R: Rng>(rng: &mut R, model: &PlantModel) -> ScenarioSpec {
    let events: Vec<String> = model.events().to_vec();
    let trans: Vec<TransitionRef> = model
        .transitions()
        .keys()
        .map(|&(q, e)| TransitionRef::new(model.state_name(q), model.event_name(e)))
        .collect();
    match rng.gen_range(0..4) {
        0 => {
            let mut p = IntermittentPermanent {
                t_uo: vec![],
                t_o: vec![],
                t_int: vec![],
                t_per: vec![],
                per_event: rng.gen_bool(0.5),
            };
            for t in trans {
                match (t.sigma == "f", rng.gen_range(0..4)) {
                    (true, _) | (_, 0) => p.t_uo.push(t),
                    (_, 1) => p.t_o.push(t),
                    (_, 2) => p.t_int.push(t),
                    _ => p.t_per.push(t),
                }
            }
            // one conjunct per sensor; past three the automaton explodes
            if !p.per_event && p.t_per.len() > 3 {
                p.t_o.extend(p.t_per.drain(3..));
            }
            ScenarioSpec::IntermittentPermanent(p)
        }
        1 => {
            let k = rng.gen_range(1..=2);
            let mut p = KLoss { unobservable: vec![], channels: vec![vec![]; k], bounds: vec![] };
            for e in events {
                if e == "f" || rng.gen_bool(0.25) {
                    p.unobservable.push(e);
                } else {
                    p.channels[rng.gen_range(0..k)].push(e);
                }
            }
            p.bounds = (0..k).map(|_| [None, Some(0), Some(1), Some(2)].choose(rng).copied().unwrap()).collect();
            // two channels both at bound 2 make V too large to build
            if p.bounds.len() == 2 && p.bounds.iter().all(|b| *b == Some(2)) {
                p.bounds[1] = Some(1);
            }
            ScenarioSpec::KLoss(p)
        }
        2 => {
            let mut p = DwellTime {
                observable: vec![],
                unobservable: vec![],
                unreliable: vec![],
                k_n: rng.gen_range(1..=2),
                k_f: rng.gen_range(1..=2),
            };
            for e in events {
                if e == "f" {
                    p.unobservable.push(e);
                    continue;
                }
                match rng.gen_range(0..3) {
                    0 => p.observable.push(e),
                    1 if p.unreliable.is_empty() => p.unreliable.push(e),
                    1 => p.observable.push(e),
                    _ => p.unobservable.push(e),
                }
            }
            ScenarioSpec::DwellTime(p)
        }
        _ => {
            let mut fair: Vec<TransitionRef> = trans
                .into_iter()
                .filter(|t| {
                    let (q, e) = (model.state_index(&t.q).unwrap(), model.event_index(&t.sigma).unwrap());
                    model.transition(q, e).unwrap().observations.len() > 1
                })
                .collect();
            fair.shuffle(rng);
            fair.truncate(1);
            ScenarioSpec::OutputFairness(OutputFairness { fair })
        }
    }
}

//! Sensor-constraint templates for the standard unreliable-sensor scenarios:
//! intermittent and permanent failures, bounded consecutive losses per
//! channel, minimum dwell-time of sensor modes, output fairness, and
//! conjunctions of these over disjoint sensors.
//!
//! Atom names are part of the file format: `m0_q3_b`/`m1_q3_b` for a
//! transition-scoped sensor, `m0_ev_b` for an event-scoped one, `m0_ch2` for a
//! channel and `m_o1_q2_a` for an output of a fair transition (`eps` stands for
//! the silent output).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::constraint::{Labeling, SensorConstraint};
use crate::error::ConstraintError;
use crate::ltl::{is_identifier, Formula};
use crate::model::{Output, PlantModel};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionRef {
    pub q: String,
    pub sigma: String,
}

impl TransitionRef {
    pub fn new(q: &str, sigma: &str) -> Self {
        Self { q: q.to_string(), sigma: sigma.to_string() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntermittentPermanent {
    #[serde(default)]
    pub t_uo: Vec<TransitionRef>,
    #[serde(default)]
    pub t_o: Vec<TransitionRef>,
    #[serde(default)]
    pub t_int: Vec<TransitionRef>,
    #[serde(default)]
    pub t_per: Vec<TransitionRef>,
    /// Share one sensor (one atom pair) among all transitions of an event.
    #[serde(default)]
    pub per_event: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KLoss {
    #[serde(default)]
    pub unobservable: Vec<String>,
    pub channels: Vec<Vec<String>>,
    /// Maximum consecutive losses per channel; `null` means unbounded.
    pub bounds: Vec<Option<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DwellTime {
    #[serde(default)]
    pub observable: Vec<String>,
    #[serde(default)]
    pub unobservable: Vec<String>,
    #[serde(default)]
    pub unreliable: Vec<String>,
    pub k_n: i64,
    pub k_f: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputFairness {
    pub fair: Vec<TransitionRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mixed {
    pub specs: Vec<ScenarioSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "template", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioSpec {
    IntermittentPermanent(IntermittentPermanent),
    KLoss(KLoss),
    DwellTime(DwellTime),
    OutputFairness(OutputFairness),
    Mixed(Mixed),
}

/// A template applied to a plant: the plant with the template's observation
/// sets, and the constraint labeled against it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub model: PlantModel,
    pub constraint: SensorConstraint,
}

type Key = (usize, usize);

#[derive(Debug, Clone)]
enum Rule {
    /// `normal` on any non-silent reading, `failed` on the silent one.
    Mode { normal: String, failed: String },
    PerOutput(BTreeMap<Option<String>, String>),
}

#[derive(Debug, Clone)]
struct Part {
    overlay: BTreeMap<Key, BTreeSet<Option<String>>>,
    scope: BTreeSet<Key>,
    rules: BTreeMap<Key, Rule>,
    atoms: BTreeSet<String>,
    formula: Formula,
}

fn err(msg: impl Into<String>) -> ConstraintError {
    ConstraintError::Template(msg.into())
}

fn transition(model: &PlantModel, t: &TransitionRef) -> Result<Key, ConstraintError> {
    let q = model.state_index(&t.q);
    let e = model.event_index(&t.sigma);
    match (q, e) {
        (Some(q), Some(e)) if model.transition(q, e).is_some() => Ok((q, e)),
        _ => Err(err(format!("transition ({},{}) is not defined", t.q, t.sigma))),
    }
}

fn event(model: &PlantModel, name: &str) -> Result<usize, ConstraintError> {
    model.event_index(name).ok_or_else(|| err(format!("unknown event `{name}`")))
}

fn transitions_of(model: &PlantModel, ev: usize) -> impl Iterator<Item = Key> + '_ {
    model.transitions().keys().copied().filter(move |&(_, e)| e == ev)
}

fn atom(name: String) -> Result<String, ConstraintError> {
    if is_identifier(&name) {
        Ok(name)
    } else {
        Err(err(format!("generated atom `{name}` is not a legal identifier; rename the state or event")))
    }
}

/// Check that `groups` are pairwise disjoint and cover `universe`.
fn check_partition<T: Ord + Clone>(
    universe: &BTreeSet<T>,
    groups: &[(&str, &[T])],
    show: impl Fn(&T) -> String,
) -> Result<(), ConstraintError> {
    let mut seen: BTreeMap<T, &str> = BTreeMap::new();
    for (name, items) in groups {
        for it in items.iter() {
            if let Some(prev) = seen.insert(it.clone(), name) {
                return Err(err(format!("{} is listed in both {prev} and {name}", show(it))));
            }
        }
    }
    if let Some(missing) = universe.iter().find(|t| !seen.contains_key(*t)) {
        return Err(err(format!("{} is not assigned to any group", show(missing))));
    }
    Ok(())
}

fn silent_or(sym: Option<&str>) -> BTreeSet<Option<String>> {
    let mut s = BTreeSet::from([None]);
    if let Some(sym) = sym {
        s.insert(Some(sym.to_string()));
    }
    s
}

fn only(sym: &str) -> BTreeSet<Option<String>> {
    BTreeSet::from([Some(sym.to_string())])
}

fn ip_part(model: &PlantModel, p: &IntermittentPermanent) -> Result<Part, ConstraintError> {
    let resolve = |ts: &[TransitionRef]| ts.iter().map(|t| transition(model, t)).collect::<Result<Vec<_>, _>>();
    let (uo, o, int, per) = (resolve(&p.t_uo)?, resolve(&p.t_o)?, resolve(&p.t_int)?, resolve(&p.t_per)?);
    let universe: BTreeSet<Key> = model.transitions().keys().copied().collect();
    check_partition(
        &universe,
        &[("t_uo", &uo), ("t_o", &o), ("t_int", &int), ("t_per", &per)],
        |&(q, e)| format!("transition ({},{})", model.state_name(q), model.event_name(e)),
    )?;
    let mut part = Part {
        overlay: BTreeMap::new(),
        scope: int.iter().chain(&per).copied().collect(),
        rules: BTreeMap::new(),
        atoms: BTreeSet::new(),
        formula: Formula::True,
    };
    for &k in &uo {
        part.overlay.insert(k, silent_or(None));
    }
    for &k in &o {
        part.overlay.insert(k, only(model.event_name(k.1)));
    }
    for &k in int.iter().chain(&per) {
        part.overlay.insert(k, silent_or(Some(model.event_name(k.1))));
    }
    let mut per = per;
    per.sort();
    let mut clauses = BTreeMap::new();
    for &(q, e) in &per {
        let scope = if p.per_event {
            format!("ev_{}", model.event_name(e))
        } else {
            format!("q{}_{}", model.state_name(q), model.event_name(e))
        };
        let (m0, m1) = (atom(format!("m0_{scope}"))?, atom(format!("m1_{scope}"))?);
        part.atoms.insert(m0.clone());
        part.atoms.insert(m1.clone());
        part.rules.insert((q, e), Rule::Mode { normal: m0.clone(), failed: m1.clone() });
        let key = if p.per_event { (e, 0) } else { (q, e) };
        clauses.entry(key).or_insert_with(|| {
            Formula::always(Formula::implies(
                Formula::atom(m1),
                Formula::always(Formula::not(Formula::atom(m0))),
            ))
        });
    }
    part.formula = Formula::conjunction(clauses.into_values());
    Ok(part)
}

/// Φ(0) = m1, Φ(k) = m1 ∧ X(¬m0 U Φ(k−1)): k+1 consecutive losses.
fn loss_run(m0: &str, m1: &str, k: u64) -> Formula {
    let mut f = Formula::atom(m1);
    for _ in 0..k {
        f = Formula::and(
            Formula::atom(m1),
            Formula::next(Formula::until(Formula::not(Formula::atom(m0)), f)),
        );
    }
    f
}

fn k_loss_part(model: &PlantModel, p: &KLoss) -> Result<Part, ConstraintError> {
    if p.bounds.len() != p.channels.len() {
        return Err(err(format!(
            "{} bounds given for {} channels",
            p.bounds.len(),
            p.channels.len()
        )));
    }
    if let Some(b) = p.bounds.iter().flatten().find(|&&b| b < 0) {
        return Err(err(format!("loss bound {b} is negative")));
    }
    let uo = p.unobservable.iter().map(|e| event(model, e)).collect::<Result<Vec<_>, _>>()?;
    let channels = p
        .channels
        .iter()
        .map(|ch| ch.iter().map(|e| event(model, e)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let names: Vec<String> = (1..=channels.len()).map(|j| format!("channel {j}")).collect();
    let mut groups: Vec<(&str, &[usize])> = vec![("unobservable", &uo)];
    groups.extend(names.iter().map(String::as_str).zip(channels.iter().map(Vec::as_slice)));
    let universe: BTreeSet<usize> = (0..model.events().len()).collect();
    check_partition(&universe, &groups, |&e| format!("event `{}`", model.event_name(e)))?;

    let mut part = Part {
        overlay: BTreeMap::new(),
        scope: BTreeSet::new(),
        rules: BTreeMap::new(),
        atoms: BTreeSet::new(),
        formula: Formula::True,
    };
    for &e in &uo {
        for k in transitions_of(model, e) {
            part.overlay.insert(k, silent_or(None));
        }
    }
    let mut clauses = Vec::new();
    for (j, (ch, bound)) in channels.iter().zip(&p.bounds).enumerate() {
        let (m0, m1) = (format!("m0_ch{}", j + 1), format!("m1_ch{}", j + 1));
        part.atoms.insert(m0.clone());
        part.atoms.insert(m1.clone());
        for &e in ch {
            for k in transitions_of(model, e) {
                part.overlay.insert(k, silent_or(Some(model.event_name(e))));
                part.scope.insert(k);
                part.rules.insert(k, Rule::Mode { normal: m0.clone(), failed: m1.clone() });
            }
        }
        if let Some(b) = bound {
            clauses.push(Formula::always(Formula::not(loss_run(&m0, &m1, *b as u64))));
        }
    }
    part.formula = Formula::conjunction(clauses);
    Ok(part)
}

/// Φ(1) = a ∧ X(¬a U b), Φ(k) = a ∧ X((¬a ∧ ¬b) U Φ(k−1)): `k` uses in the mode
/// marked by `a` before a switch to `b`.
fn mode_run(a: &str, b: &str, k: u64) -> Formula {
    let mut f = Formula::and(
        Formula::atom(a),
        Formula::next(Formula::until(Formula::not(Formula::atom(a)), Formula::atom(b))),
    );
    for _ in 1..k {
        let neither = Formula::and(Formula::not(Formula::atom(a)), Formula::not(Formula::atom(b)));
        f = Formula::and(Formula::atom(a), Formula::next(Formula::until(neither, f)));
    }
    f
}

/// A switch into mode `a` (from a use in mode `b`) followed by exactly `k` uses in `a`.
fn dwell_violation(a: &str, b: &str, k: u64) -> Formula {
    Formula::and(
        Formula::atom(b),
        Formula::next(Formula::until(Formula::not(Formula::atom(a)), mode_run(a, b, k))),
    )
}

fn dwell_part(model: &PlantModel, p: &DwellTime) -> Result<Part, ConstraintError> {
    if p.k_n < 1 || p.k_f < 1 {
        return Err(err(format!("dwell times must be at least 1 (got k_n={}, k_f={})", p.k_n, p.k_f)));
    }
    let resolve = |v: &[String]| v.iter().map(|e| event(model, e)).collect::<Result<Vec<_>, _>>();
    let (o, uo, ur) = (resolve(&p.observable)?, resolve(&p.unobservable)?, resolve(&p.unreliable)?);
    let universe: BTreeSet<usize> = (0..model.events().len()).collect();
    check_partition(
        &universe,
        &[("observable", &o), ("unobservable", &uo), ("unreliable", &ur)],
        |&e| format!("event `{}`", model.event_name(e)),
    )?;
    let mut part = Part {
        overlay: BTreeMap::new(),
        scope: BTreeSet::new(),
        rules: BTreeMap::new(),
        atoms: BTreeSet::new(),
        formula: Formula::True,
    };
    for &e in &o {
        for k in transitions_of(model, e) {
            part.overlay.insert(k, only(model.event_name(e)));
        }
    }
    for &e in &uo {
        for k in transitions_of(model, e) {
            part.overlay.insert(k, silent_or(None));
        }
    }
    let mut ur = ur;
    ur.sort();
    let mut pairs = Vec::new();
    for &e in &ur {
        let name = model.event_name(e);
        let (m0, m1) = (atom(format!("m0_ev_{name}"))?, atom(format!("m1_ev_{name}"))?);
        part.atoms.insert(m0.clone());
        part.atoms.insert(m1.clone());
        for k in transitions_of(model, e) {
            part.overlay.insert(k, silent_or(Some(name)));
            part.scope.insert(k);
            part.rules.insert(k, Rule::Mode { normal: m0.clone(), failed: m1.clone() });
        }
        pairs.push((m0, m1));
    }
    let mut clauses = Vec::new();
    for (m0, m1) in &pairs {
        for k in 1..p.k_n as u64 {
            clauses.push(Formula::always(Formula::not(dwell_violation(m0, m1, k))));
        }
    }
    for (m0, m1) in &pairs {
        for k in 1..p.k_f as u64 {
            clauses.push(Formula::always(Formula::not(dwell_violation(m1, m0, k))));
        }
    }
    part.formula = Formula::conjunction(clauses);
    Ok(part)
}

fn fairness_part(model: &PlantModel, p: &OutputFairness) -> Result<Part, ConstraintError> {
    let mut fair = p.fair.iter().map(|t| transition(model, t)).collect::<Result<Vec<_>, _>>()?;
    fair.sort();
    fair.dedup();
    let mut part = Part {
        overlay: BTreeMap::new(),
        scope: fair.iter().copied().collect(),
        rules: BTreeMap::new(),
        atoms: BTreeSet::new(),
        formula: Formula::True,
    };
    let mut clauses = Vec::new();
    for &(q, e) in &fair {
        let mut map = BTreeMap::new();
        for &o in &model.transition(q, e).unwrap().observations {
            let (key, spelled) = match o {
                Output::Silent => (None, "eps".to_string()),
                Output::Symbol(_) => {
                    let s = model.output_name(o).to_string();
                    (Some(s.clone()), s)
                }
            };
            let a = atom(format!("m_{spelled}_q{}_{}", model.state_name(q), model.event_name(e)))?;
            part.atoms.insert(a.clone());
            map.insert(key, a);
        }
        let any = Formula::disjunction(map.values().map(|a| Formula::atom(a.as_str())));
        let each = Formula::conjunction(
            map.values().map(|a| Formula::always(Formula::eventually(Formula::atom(a.as_str())))),
        );
        clauses.push(Formula::implies(Formula::always(Formula::eventually(any)), each));
        part.rules.insert((q, e), Rule::PerOutput(map));
    }
    part.formula = Formula::conjunction(clauses);
    Ok(part)
}

fn part_of(model: &PlantModel, spec: &ScenarioSpec) -> Result<Part, ConstraintError> {
    match spec {
        ScenarioSpec::IntermittentPermanent(p) => ip_part(model, p),
        ScenarioSpec::KLoss(p) => k_loss_part(model, p),
        ScenarioSpec::DwellTime(p) => dwell_part(model, p),
        ScenarioSpec::OutputFairness(p) => fairness_part(model, p),
        ScenarioSpec::Mixed(_) => Err(err("mixed scenarios cannot be nested")),
    }
}

/// Merge parts over pairwise disjoint scopes and label the resulting plant.
///
/// Observation sets: a transition inside some part's scope takes that part's
/// overlay (or keeps the plant's set if the part has none). Outside every
/// scope the parts must agree on the overlay, if they give one.
fn assemble(model: &PlantModel, parts: &[Part]) -> Result<ScenarioOutput, ConstraintError> {
    let show = |&(q, e): &Key| format!("({},{})", model.state_name(q), model.event_name(e));
    let mut owner: BTreeMap<Key, usize> = BTreeMap::new();
    let mut atom_owner: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, p) in parts.iter().enumerate() {
        for k in &p.scope {
            if owner.insert(*k, i).is_some() {
                return Err(err(format!("sensor scopes overlap at transition {}", show(k))));
            }
        }
        for a in &p.atoms {
            if atom_owner.insert(a, i).is_some() {
                return Err(err(format!("atom `{a}` is generated by two sub-scenarios")));
            }
        }
    }
    let mut overlay = BTreeMap::new();
    for &k in model.transitions().keys() {
        if let Some(&i) = owner.get(&k) {
            if let Some(o) = parts[i].overlay.get(&k) {
                overlay.insert(k, o.clone());
            }
            continue;
        }
        let mut proposals = parts.iter().filter_map(|p| p.overlay.get(&k));
        if let Some(first) = proposals.next() {
            if proposals.any(|o| o != first) {
                return Err(err(format!(
                    "sub-scenarios disagree on the observations of transition {}",
                    show(&k)
                )));
            }
            overlay.insert(k, first.clone());
        }
    }
    let model = model.with_observations(&overlay)?;
    let mut labeling = Labeling::new();
    for e in model.extended_events() {
        let Some(&i) = owner.get(&(e.state, e.event)) else { continue };
        let Some(rule) = parts[i].rules.get(&(e.state, e.event)) else { continue };
        let atom = match rule {
            Rule::Mode { normal, failed } => Some(if e.output.is_silent() { failed } else { normal }),
            Rule::PerOutput(map) => {
                let key = e.output.symbol().map(|_| model.output_name(e.output).to_string());
                map.get(&key)
            }
        };
        if let Some(a) = atom {
            labeling.insert(e, a.clone());
        }
    }
    let atoms = parts.iter().flat_map(|p| p.atoms.iter().cloned()).collect();
    let formula = Formula::conjunction(parts.iter().map(|p| p.formula.clone()));
    Ok(ScenarioOutput { model, constraint: SensorConstraint { atoms, labeling, formula } })
}

pub fn build(model: &PlantModel, spec: &ScenarioSpec) -> Result<ScenarioOutput, ConstraintError> {
    match spec {
        ScenarioSpec::Mixed(m) => build_mixed(model, &m.specs),
        other => assemble(model, &[part_of(model, other)?]),
    }
}

pub fn build_intermittent_permanent(
    model: &PlantModel,
    p: &IntermittentPermanent,
) -> Result<ScenarioOutput, ConstraintError> {
    assemble(model, &[ip_part(model, p)?])
}

pub fn build_k_loss(model: &PlantModel, p: &KLoss) -> Result<ScenarioOutput, ConstraintError> {
    assemble(model, &[k_loss_part(model, p)?])
}

pub fn build_dwell_time(model: &PlantModel, p: &DwellTime) -> Result<ScenarioOutput, ConstraintError> {
    assemble(model, &[dwell_part(model, p)?])
}

pub fn build_output_fairness(
    model: &PlantModel,
    p: &OutputFairness,
) -> Result<ScenarioOutput, ConstraintError> {
    assemble(model, &[fairness_part(model, p)?])
}

pub fn build_mixed(model: &PlantModel, specs: &[ScenarioSpec]) -> Result<ScenarioOutput, ConstraintError> {
    let parts = specs.iter().map(|s| part_of(model, s)).collect::<Result<Vec<_>, _>>()?;
    assemble(model, &parts)
}

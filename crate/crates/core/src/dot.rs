//! Graphviz output for the intermediate systems and for automata.
//!
//! Accepting states get a double border. Edge labels are `σ/o`, or
//! `(σ1/o1, σ2/o2)` on V; the silent output is written `~` and an idle copy `-`.

use std::fmt::Write;

use crate::ltl::BuchiAutomaton;
use crate::model::{ExtendedEvent, Output, PlantModel};
use crate::synthesis::{AugmentedSystem, ConstrainedSystem, PairEvent, VerificationSystem};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn label(model: &PlantModel, e: &ExtendedEvent) -> String {
    let o = match e.output {
        Output::Silent => "~",
        Output::Symbol(_) => model.output_name(e.output),
    };
    format!("{}/{}", model.event_name(e.event), o)
}

fn pair_label(model: &PlantModel, p: &PairEvent) -> String {
    let side = |e: &Option<ExtendedEvent>| e.as_ref().map_or("-".to_string(), |e| label(model, e));
    format!("({}, {})", side(&p.first), side(&p.second))
}

struct Graph {
    out: String,
}

impl Graph {
    fn new(name: &str) -> Self {
        let mut out = String::new();
        writeln!(out, "digraph {} {{", quote(name)).unwrap();
        out.push_str("  rankdir=LR;\n  node [shape=circle];\n  __start [shape=point];\n");
        Self { out }
    }

    fn node(&mut self, id: usize, name: &str, accepting: bool, extra: &str) {
        let mut attrs = format!("label={}", quote(name));
        if accepting {
            attrs.push_str(", peripheries=2");
        }
        if !extra.is_empty() {
            attrs.push_str(", ");
            attrs.push_str(extra);
        }
        writeln!(self.out, "  n{id} [{attrs}];").unwrap();
    }

    fn start(&mut self, id: usize) {
        writeln!(self.out, "  __start -> n{id};").unwrap();
    }

    fn edge(&mut self, from: usize, to: usize, text: &str) {
        writeln!(self.out, "  n{from} -> n{to} [label={}];", quote(text)).unwrap();
    }

    fn finish(mut self) -> String {
        self.out.push_str("}\n");
        self.out
    }
}

pub fn augmented_dot(aug: &AugmentedSystem, model: &PlantModel) -> String {
    let mut g = Graph::new("augmented");
    for i in 0..aug.num_states() {
        g.node(i, aug.name(i), false, if aug.is_faulty(i) { "style=filled, fillcolor=lightgray" } else { "" });
    }
    g.start(aug.initial());
    for i in 0..aug.num_states() {
        for (e, j) in aug.edges_from(i) {
            g.edge(i, *j, &label(model, e));
        }
    }
    g.finish()
}

/// Infeasible states are dashed.
pub fn constrained_dot(t: &ConstrainedSystem, model: &PlantModel) -> String {
    let mut g = Graph::new("constrained");
    for i in 0..t.num_states() {
        g.node(i, t.name(i), t.is_accepting(i), if t.is_feasible(i) { "" } else { "style=dashed" });
    }
    for &i in t.initial() {
        g.start(i);
    }
    for i in 0..t.num_states() {
        for (e, j) in t.edges_from(i) {
            g.edge(i, *j, &label(model, e));
        }
    }
    g.finish()
}

pub fn verifier_dot(v: &VerificationSystem, model: &PlantModel) -> String {
    let mut g = Graph::new("verifier");
    for i in 0..v.num_states() {
        g.node(i, v.name(i), v.is_accepting(i), "shape=box");
    }
    for &i in v.initial() {
        g.start(i);
    }
    for i in 0..v.num_states() {
        for (p, j) in v.edges_from(i) {
            g.edge(i, *j, &pair_label(model, p));
        }
    }
    g.finish()
}

pub fn nba_dot(nba: &BuchiAutomaton) -> String {
    let mut g = Graph::new("nba");
    for x in 0..nba.num_states() {
        g.node(x, nba.state_name(x), nba.is_accepting(x), "");
    }
    for &x in nba.initial() {
        g.start(x);
    }
    for x in 0..nba.num_states() {
        for (guard, y) in nba.edges_from(x) {
            g.edge(x, *y, &guard.to_string());
        }
    }
    g.finish()
}

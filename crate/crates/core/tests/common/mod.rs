#![allow(dead_code)]

use std::collections::BTreeSet;

use phidiag::constraint::SensorConstraint;
use phidiag::ltl::{BuchiAutomaton, Formula, Guard, Letter};
use phidiag::model::{example_g1_spec, example_g2_spec, example_g3_spec, PlantModel};
use phidiag::oracle::random_instance_spec;
use phidiag::templates::{
    build, IntermittentPermanent, KLoss, OutputFairness, ScenarioSpec, TransitionRef,
};
use phidiag::Lasso;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn load(spec: phidiag::PlantSpec) -> PlantModel {
    PlantModel::from_spec(&spec, false).unwrap()
}

pub fn g1() -> PlantModel {
    load(example_g1_spec())
}

pub fn per_scenario() -> ScenarioSpec {
    let t = TransitionRef::new;
    ScenarioSpec::IntermittentPermanent(IntermittentPermanent {
        t_uo: vec![t("1", "f"), t("1", "u")],
        t_o: vec![t("2", "a"), t("4", "c"), t("5", "a"), t("7", "c"), t("8", "a")],
        t_int: vec![],
        t_per: vec![t("3", "b"), t("6", "b")],
        per_event: true,
    })
}

pub fn g1_per() -> (PlantModel, SensorConstraint) {
    let out = build(&g1(), &per_scenario()).unwrap();
    (out.model, out.constraint)
}

pub fn kloss_scenario() -> ScenarioSpec {
    ScenarioSpec::KLoss(KLoss {
        unobservable: vec!["f".into(), "u".into()],
        channels: vec![vec!["a".into(), "c".into()], vec!["b".into()]],
        bounds: vec![Some(0), Some(1)],
    })
}

pub fn g2_kloss() -> (PlantModel, SensorConstraint) {
    let out = build(&load(example_g2_spec()), &kloss_scenario()).unwrap();
    (out.model, out.constraint)
}

pub fn g3() -> PlantModel {
    load(example_g3_spec())
}

pub fn g3_fair() -> (PlantModel, SensorConstraint) {
    let fair = OutputFairness { fair: vec![TransitionRef::new("2", "a")] };
    let out = build(&g3(), &ScenarioSpec::OutputFairness(fair)).unwrap();
    (out.model, out.constraint)
}

fn atoms(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// The permanent-failure automaton as drawn for φ_per on sensor b.
pub fn fig3_nba() -> BuchiAutomaton {
    BuchiAutomaton::new(
        atoms(&["m0_ev_b", "m1_ev_b"]),
        vec!["A".into(), "B".into()],
        &["A"],
        &["A", "B"],
        vec![
            ("A", Guard::neg("m1_ev_b"), "A"),
            ("A", Guard::And(vec![Guard::neg("m0_ev_b"), Guard::pos("m1_ev_b")]), "B"),
            ("B", Guard::neg("m0_ev_b"), "B"),
        ],
    )
}

/// The K-loss automaton for K = (0, 1) as drawn.
pub fn fig6b_nba() -> BuchiAutomaton {
    let n = |a: &str| Guard::neg(a);
    BuchiAutomaton::new(
        atoms(&["m0_ch1", "m1_ch1", "m0_ch2", "m1_ch2"]),
        vec!["A".into(), "B".into()],
        &["A"],
        &["A", "B"],
        vec![
            ("A", Guard::And(vec![n("m1_ch1"), n("m1_ch2")]), "A"),
            ("A", Guard::And(vec![n("m1_ch1"), Guard::pos("m1_ch2")]), "B"),
            ("B", Guard::And(vec![n("m1_ch1"), n("m1_ch2"), n("m0_ch2")]), "B"),
            ("B", Guard::And(vec![n("m1_ch1"), n("m1_ch2"), Guard::pos("m0_ch2")]), "A"),
        ],
    )
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random plant (≤ 5 states, ≤ 4 events, ≤ 2 outputs) with a random
/// template constraint. The model returned is the one the template rewrote.
pub fn random_instance(seed: u64) -> (PlantModel, SensorConstraint) {
    let (plant, sc) = random_instance_spec(seed);
    let out = build(&load(plant), &sc).unwrap();
    (out.model, out.constraint)
}

pub fn random_formula<R: Rng>(r: &mut R, depth: usize, atoms: &[&str]) -> Formula {
    if depth == 0 || r.gen_bool(0.2) {
        return match r.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(atoms[r.gen_range(0..atoms.len())]),
        };
    }
    let sub = |r: &mut R| random_formula(r, depth - 1, atoms);
    match r.gen_range(0..8) {
        0 => Formula::not(sub(r)),
        1 => Formula::and(sub(r), sub(r)),
        2 => Formula::or(sub(r), sub(r)),
        3 => Formula::implies(sub(r), sub(r)),
        4 => Formula::next(sub(r)),
        5 => Formula::until(sub(r), sub(r)),
        6 => Formula::eventually(sub(r)),
        _ => Formula::always(sub(r)),
    }
}

pub fn random_letter<R: Rng>(r: &mut R, atoms: &[&str]) -> Letter {
    atoms.iter().filter(|_| r.gen_bool(0.5)).map(|s| s.to_string()).collect()
}

pub fn random_word<R: Rng>(r: &mut R, atoms: &[&str], max_u: usize, max_v: usize) -> Lasso<Letter> {
    let u = r.gen_range(0..=max_u);
    let v = r.gen_range(1..=max_v.max(1));
    Lasso::new(
        (0..u).map(|_| random_letter(r, atoms)).collect(),
        (0..v).map(|_| random_letter(r, atoms)).collect(),
    )
}

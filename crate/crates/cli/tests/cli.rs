use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::{Command, Output};

use phidiag::checker::VerdictJson;
use phidiag::constraint::ConstraintFile;
use phidiag::ltl::{eval_lasso, parse_ltl_any, Letter};
use phidiag::oracle::enumerate_compatible;
use phidiag::{Lasso, PlantModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phidiag"))
        .args(args)
        .env("PHIDIAG_COLOR", "0")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn g1_permanent_failure_is_not_diagnosable() {
    let o = run(&["check", &data("g1.json"), &data("per.json"), "--oracle"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("verdict: NOT diagnosable"));
    assert!(out.contains("verifier cycle:"));
    assert!(out.contains("shared observation:"));
    assert!(stderr(&o).contains("oracle: agrees"));
}

#[test]
fn raw_and_template_constraints_agree() {
    let a = run(&["check", &data("g1.json"), &data("per.json"), "--json"]);
    let b = run(&["check", &data("g1.json"), &data("per_raw.json"), "--json"]);
    assert_eq!(a.status.code(), Some(1));
    assert_eq!(b.status.code(), Some(1));
    let va: VerdictJson = serde_json::from_slice(&a.stdout).unwrap();
    let vb: VerdictJson = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(va.stats, vb.stats);
}

#[test]
fn g2_k_loss_is_diagnosable() {
    let o = run(&["check", &data("g2.json"), &data("kloss.json"), "--oracle"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("verdict: diagnosable"));
}

#[test]
fn undeclared_atom_is_an_input_error() {
    let o = run(&["check", &data("g1.json"), &data("broken.json")]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("`m2`") && err.contains("offset 11"), "{err}");
    assert!(err.contains("             ^"), "{err}");
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"states\": [\"1\"],\n").unwrap();
    let o = run(&["check", bad.to_str().unwrap(), &data("per.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn json_output_round_trips() {
    let o = run(&["check", &data("g3.json"), &data("true.json"), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let value: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let parsed: VerdictJson = serde_json::from_value(value.clone()).unwrap();
    assert_eq!(serde_json::to_value(&parsed).unwrap(), value);
    assert!(!parsed.diagnosable);
    let obs = parsed.projections.unwrap().observation;
    assert_eq!(obs.prefix, ["o1"]);
    assert_eq!(obs.cycle.len(), 2);
    assert_ne!(obs.cycle[0], obs.cycle[1]);
}

#[test]
fn dot_dir_gets_every_system() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["check", &data("g1.json"), &data("per.json"), "--dot-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    for f in ["augmented.dot", "nba.dot", "constrained.dot", "verifier.dot"] {
        let text = std::fs::read_to_string(dir.path().join(f)).unwrap();
        assert!(text.starts_with("digraph"), "{f}");
    }
}

#[test]
fn glob_checks_every_match() {
    let o = run(&["check", &data("g*.json"), &data("true.json"), "--glob"]);
    let out = stdout(&o);
    assert_eq!(out.matches("== ").count(), 3, "{out}");
    assert_eq!(o.status.code(), Some(1));
}

// Minimal reader for the DOT this tool writes: states, initial and accepting
// sets, and guarded edges.
struct Nba {
    initial: Vec<usize>,
    accepting: BTreeSet<usize>,
    edges: Vec<(usize, phidiag::ltl::Formula, usize)>,
    n: usize,
}

fn read_dot(dot: &str) -> Nba {
    let id = |s: &str| s.trim().trim_start_matches('n').parse::<usize>().unwrap();
    let mut nba = Nba { initial: vec![], accepting: BTreeSet::new(), edges: vec![], n: 0 };
    for line in dot.lines().map(str::trim) {
        if let Some(rest) = line.strip_prefix("__start -> ") {
            nba.initial.push(id(rest.trim_end_matches(';')));
        } else if line.contains(" -> ") {
            let (ends, label) = line.split_once(" [label=\"").unwrap();
            let (a, b) = ends.split_once(" -> ").unwrap();
            let guard = parse_ltl_any(label.trim_end_matches("\"];")).unwrap();
            nba.edges.push((id(a), guard, id(b)));
        } else if line.starts_with('n') && line.contains("[label=") {
            let x = id(line.split_once(' ').unwrap().0);
            nba.n = nba.n.max(x + 1);
            if line.contains("peripheries=2") {
                nba.accepting.insert(x);
            }
        }
    }
    nba
}

// Lasso acceptance on the finite graph of (state, position) pairs.
fn accepts(nba: &Nba, w: &Lasso<Letter>) -> bool {
    let len = w.len();
    let holds = |g: &phidiag::ltl::Formula, i: usize| eval_lasso(&Lasso::new(vec![], vec![w.at(i).clone()]), g);
    let succ = |(x, i): (usize, usize)| -> Vec<(usize, usize)> {
        nba.edges.iter().filter(|(a, g, _)| *a == x && holds(g, i)).map(|(_, _, b)| (*b, w.successor(i))).collect()
    };
    let reach = |from: Vec<(usize, usize)>| {
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut stack = from;
        while let Some(v) = stack.pop() {
            for s in succ(v) {
                if seen.insert(s) {
                    stack.push(s);
                }
            }
        }
        seen
    };
    let start: Vec<_> = nba.initial.iter().map(|&x| (x, 0)).collect();
    let mut reachable = reach(start.clone());
    reachable.extend(start);
    (0..nba.n)
        .flat_map(|x| (0..len).map(move |i| (x, i)))
        .filter(|(x, _)| nba.accepting.contains(x))
        .any(|v| reachable.contains(&v) && reach(vec![v]).contains(&v))
}

fn random_lasso(r: &mut ChaCha8Rng, atoms: &[&str]) -> Lasso<Letter> {
    let letter = |r: &mut ChaCha8Rng| atoms.iter().filter(|_| r.gen_bool(0.5)).map(|s| s.to_string()).collect();
    let u = r.gen_range(0..5);
    let v = r.gen_range(1..5);
    Lasso::new((0..u).map(|_| letter(r)).collect(), (0..v).map(|_| letter(r)).collect())
}

#[test]
fn translate_permanent_failure_matches_hand_drawn_automaton() {
    let o = run(&["translate", "G(m1 -> G !m0)", "--ap", "m0,m1"]);
    assert_eq!(o.status.code(), Some(0));
    let got = read_dot(&stdout(&o));
    let g = |s: &str| parse_ltl_any(s).unwrap();
    // A (initial) loops on !m1, moves to B on !m0 & m1; B loops on !m0
    let drawn = Nba {
        initial: vec![0],
        accepting: BTreeSet::from([0, 1]),
        edges: vec![(0, g("!m1"), 0), (0, g("!m0 & m1"), 1), (1, g("!m0"), 1)],
        n: 2,
    };
    let mut r = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..300 {
        let w = random_lasso(&mut r, &["m0", "m1"]);
        assert_eq!(accepts(&got, &w), accepts(&drawn, &w), "{w:?}");
    }
}

#[test]
fn translate_true_is_one_node() {
    let o = run(&["translate", "true"]);
    assert_eq!(o.status.code(), Some(0));
    let nba = read_dot(&stdout(&o));
    assert_eq!(nba.n, 1);
    assert_eq!(nba.edges.len(), 1);
}

#[test]
fn translate_fg_agrees_with_evaluation() {
    let o = run(&["translate", "F G p"]);
    let nba = read_dot(&stdout(&o));
    let f = parse_ltl_any("F G p").unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let w = random_lasso(&mut r, &["p"]);
        assert_eq!(accepts(&nba, &w), eval_lasso(&w, &f), "{w:?}");
    }
}

#[test]
fn translate_syntax_error() {
    let o = run(&["translate", "F G (p"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("offset 6"));
}

// alarm column of a replay table, step 0 first
fn alarms(out: &str) -> Vec<bool> {
    out.lines().skip(1).map(|l| l.split_whitespace().last() == Some("1")).collect()
}

#[test]
fn replay_g3_fair_alarm_matches_enumeration() {
    let stream = data("g3_faulty.txt");
    let o = run(&["replay", &data("g3.json"), &data("fair.json"), &stream]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let got = alarms(&stdout(&o));

    let base = PlantModel::from_json(&std::fs::read_to_string(data("g3.json")).unwrap(), false).unwrap();
    let file = ConstraintFile::parse(&std::fs::read_to_string(data("fair.json")).unwrap()).unwrap();
    let (m, c) = file.resolve(&base).unwrap();
    let symbols: Vec<usize> = std::fs::read_to_string(&stream)
        .unwrap()
        .split_whitespace()
        .map(|s| m.output_index(s).unwrap())
        .collect();
    let want: Vec<bool> =
        (0..=symbols.len()).map(|k| enumerate_compatible(&m, &c, &symbols[..k]).all_faulty(&m)).collect();
    assert_eq!(got, want);
    assert!(want.contains(&true));
}

#[test]
fn replay_normal_stream_never_alarms() {
    let o = run(&["replay", &data("g3.json"), &data("fair.json"), &data("g3_normal.txt")]);
    assert_eq!(o.status.code(), Some(0));
    let a = alarms(&stdout(&o));
    assert_eq!(a.len(), 8);
    assert!(a.iter().all(|x| !x));
}

#[test]
fn replay_empty_stream() {
    let o = run(&["replay", &data("g3.json"), &data("fair.json"), &data("empty.txt")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(alarms(&stdout(&o)), [false]);
}

#[test]
fn replay_unknown_symbol() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("z.txt");
    std::fs::write(&s, "o1 z").unwrap();
    let o = run(&["replay", &data("g3.json"), &data("fair.json"), s.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`z`"));
}

#[test]
fn replay_infeasible_observation_names_the_step() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.txt");
    std::fs::write(&s, "o1 o1 o1").unwrap();
    let o = run(&["replay", &data("g3.json"), &data("fair.json"), s.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("at step 3"), "{}", stderr(&o));
}

#[test]
fn export_artifacts() {
    let o = run(&["export", &data("g2.json"), &data("kloss.json"), "--what", "plant"]);
    assert_eq!(o.status.code(), Some(0));
    let m = PlantModel::from_json(&stdout(&o), false).unwrap();
    // the template makes f and u silent
    let f = m.event_index("f").unwrap();
    assert!(m.transitions().iter().filter(|((_, e), _)| *e == f).all(|(_, t)| t.observations.len() == 1));

    let o = run(&["export", &data("g2.json"), &data("kloss.json"), "--what", "constraint"]);
    let raw: BTreeMap<String, serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(raw.contains_key("ltl") && raw.contains_key("labeling"));

    let dir = tempfile::tempdir().unwrap();
    let o = run(&["export", &data("g2.json"), &data("kloss.json"), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 6);
}

#[test]
fn sweep_is_reproducible() {
    let a = run(&["sweep", "--seed", "3", "--count", "8"]);
    let b = run(&["sweep", "--seed", "3", "--count", "8"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn color_switch() {
    let plain = run(&["check", &data("g2.json"), &data("kloss.json")]);
    assert!(!stdout(&plain).contains('\x1b'));
    let o = Command::new(env!("CARGO_BIN_EXE_phidiag"))
        .args(["check", &data("g2.json"), &data("kloss.json")])
        .env("PHIDIAG_COLOR", "1")
        .output()
        .unwrap();
    assert!(stdout(&o).starts_with("\x1b[32m"));
}

//! Tableau translation (Gerth, Peled, Vardi, Wolper) into a generalized Büchi
//! automaton, followed by counter-based degeneralization.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::{BuchiAutomaton, Formula, Guard};
use crate::graph::{is_nontrivial, reachable, reverse, tarjan_scc};

/// Negation normal form with `R` (release) as the dual of `U`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Nnf {
    True,
    False,
    Lit(String, bool),
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
    Next(Box<Nnf>),
    Until(Box<Nnf>, Box<Nnf>),
    Release(Box<Nnf>, Box<Nnf>),
}

fn nnf(f: &Formula, neg: bool) -> Nnf {
    let b = |f: &Formula, neg| Box::new(nnf(f, neg));
    match (f, neg) {
        (Formula::True, false) | (Formula::False, true) => Nnf::True,
        (Formula::True, true) | (Formula::False, false) => Nnf::False,
        (Formula::Atom(a), _) => Nnf::Lit(a.clone(), !neg),
        (Formula::Not(g), _) => nnf(g, !neg),
        (Formula::And(x, y), false) | (Formula::Or(x, y), true) => Nnf::And(b(x, neg), b(y, neg)),
        (Formula::Or(x, y), false) | (Formula::And(x, y), true) => Nnf::Or(b(x, neg), b(y, neg)),
        (Formula::Implies(x, y), false) => Nnf::Or(b(x, true), b(y, false)),
        (Formula::Implies(x, y), true) => Nnf::And(b(x, false), b(y, true)),
        (Formula::Next(g), _) => Nnf::Next(b(g, neg)),
        (Formula::Until(x, y), false) => Nnf::Until(b(x, false), b(y, false)),
        (Formula::Until(x, y), true) => Nnf::Release(b(x, true), b(y, true)),
        (Formula::Eventually(g), false) => Nnf::Until(Box::new(Nnf::True), b(g, false)),
        (Formula::Eventually(g), true) => Nnf::Release(Box::new(Nnf::False), b(g, true)),
        (Formula::Always(g), false) => Nnf::Release(Box::new(Nnf::False), b(g, false)),
        (Formula::Always(g), true) => Nnf::Until(Box::new(Nnf::True), b(g, true)),
    }
}

fn untils(f: &Nnf, out: &mut Vec<(Nnf, Nnf)>) {
    match f {
        Nnf::True | Nnf::False | Nnf::Lit(..) => {}
        Nnf::Next(g) => untils(g, out),
        Nnf::And(a, b) | Nnf::Or(a, b) | Nnf::Release(a, b) => {
            untils(a, out);
            untils(b, out);
        }
        Nnf::Until(a, b) => {
            let pair = (f.clone(), (**b).clone());
            if !out.contains(&pair) {
                out.push(pair);
            }
            untils(a, out);
            untils(b, out);
        }
    }
}

const INIT: usize = usize::MAX;

// A node under construction. `class` identifies the set of obligations whose
// expansion produced it (`INIT` for the formula itself).
#[derive(Clone)]
struct Pending {
    class: usize,
    new: BTreeSet<Nnf>,
    old: BTreeSet<Nnf>,
    next: BTreeSet<Nnf>,
}

struct Node {
    // classes whose expansion reached this node; n -> m iff next_class(n) is here
    from: BTreeSet<usize>,
    old: BTreeSet<Nnf>,
    next_class: usize,
}

impl Pending {
    fn with_new(&self, extra: &[&Nnf]) -> Self {
        let mut p = self.clone();
        for f in extra {
            if !p.old.contains(*f) {
                p.new.insert((*f).clone());
            }
        }
        p
    }
}

fn literals(old: &BTreeSet<Nnf>) -> Vec<Nnf> {
    old.iter().filter(|f| matches!(f, Nnf::Lit(..))).cloned().collect()
}

fn acceptance(old: &BTreeSet<Nnf>, sets: &[(Nnf, Nnf)]) -> Vec<bool> {
    sets.iter().map(|(u, b)| !old.contains(u) || *b == Nnf::True || old.contains(b)).collect()
}

// Depth-first tableau expansion with an explicit stack. The expansion of a
// `next` set does not depend on which node it came from, so each distinct set
// is expanded once. Completed nodes with the same literals, obligations and
// acceptance membership are merged; they have the same guard, successors and
// acceptance.
fn expand(root: Nnf, sets: &[(Nnf, Nnf)]) -> Vec<Node> {
    let mut done: Vec<Node> = Vec::new();
    let mut index: HashMap<(Vec<Nnf>, usize, Vec<bool>), usize> = HashMap::new();
    let mut classes: HashMap<BTreeSet<Nnf>, usize> = HashMap::new();
    let mut stack = vec![Pending {
        class: INIT,
        new: BTreeSet::from([root]),
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    }];
    while let Some(mut node) = stack.pop() {
        let Some(eta) = node.new.pop_first() else {
            let fresh = classes.len();
            let next_class = *classes.entry(node.next.clone()).or_insert_with(|| {
                stack.push(Pending {
                    class: fresh,
                    new: node.next.clone(),
                    old: BTreeSet::new(),
                    next: BTreeSet::new(),
                });
                fresh
            });
            let key = (literals(&node.old), next_class, acceptance(&node.old, sets));
            let id = *index.entry(key).or_insert_with(|| {
                done.push(Node { from: BTreeSet::new(), old: node.old, next_class });
                done.len() - 1
            });
            done[id].from.insert(node.class);
            continue;
        };
        match &eta {
            Nnf::False => {}
            Nnf::True => stack.push(node),
            Nnf::Lit(a, pos) => {
                if !node.old.contains(&Nnf::Lit(a.clone(), !pos)) {
                    node.old.insert(eta);
                    stack.push(node);
                }
            }
            Nnf::And(a, b) => {
                let mut n = node.with_new(&[a, b]);
                n.old.insert(eta.clone());
                stack.push(n);
            }
            Nnf::Or(a, b) => {
                let mut n1 = node.with_new(&[a]);
                let mut n2 = node.with_new(&[b]);
                n1.old.insert(eta.clone());
                n2.old.insert(eta.clone());
                stack.push(n2);
                stack.push(n1);
            }
            Nnf::Next(a) => {
                node.next.insert((**a).clone());
                node.old.insert(eta.clone());
                stack.push(node);
            }
            Nnf::Until(a, b) | Nnf::Release(a, b) => {
                let (mut n1, mut n2) = if matches!(eta, Nnf::Until(..)) {
                    (node.with_new(&[a]), node.with_new(&[b]))
                } else {
                    (node.with_new(&[b]), node.with_new(&[a, b]))
                };
                n1.next.insert(eta.clone());
                n1.old.insert(eta.clone());
                n2.old.insert(eta.clone());
                stack.push(n2);
                stack.push(n1);
            }
        }
    }
    done
}

fn guard_of(old: &BTreeSet<Nnf>) -> Guard {
    let lits: Vec<Guard> = old
        .iter()
        .filter_map(|f| match f {
            Nnf::Lit(a, positive) => Some(Guard::Lit { atom: a.clone(), positive: *positive }),
            _ => None,
        })
        .collect();
    match lits.len() {
        0 => Guard::True,
        1 => lits.into_iter().next().unwrap(),
        _ => Guard::And(lits),
    }
}

/// Translate `formula` into an NBA accepting exactly the words that satisfy
/// it. Only reachable states are kept; states are named `s0, s1, ...` in
/// breadth-first order.
pub fn ltl_to_nba(formula: &Formula) -> BuchiAutomaton {
    let root = nnf(formula, false);
    let mut acc_sets = Vec::new();
    untils(&root, &mut acc_sets);
    let done = expand(root, &acc_sets);
    let in_set: Vec<Vec<bool>> = acc_sets
        .iter()
        .map(|(u, b)| {
            done.iter()
                .map(|n| !n.old.contains(u) || *b == Nnf::True || n.old.contains(b))
                .collect()
        })
        .collect();
    let k = acc_sets.len();

    let mut by_class: HashMap<usize, Vec<usize>> = HashMap::new();
    for (m, node) in done.iter().enumerate() {
        for &c in &node.from {
            by_class.entry(c).or_default().push(m);
        }
    }
    let succ: Vec<Vec<usize>> =
        done.iter().map(|n| by_class.get(&n.next_class).cloned().unwrap_or_default()).collect();
    let guards: Vec<Guard> = done.iter().map(|n| guard_of(&n.old)).collect();

    // Degeneralize: (node, counter); the counter advances past i when the
    // node lies in acceptance set i.
    let advance = |n: usize, c: usize| {
        if k > 0 && in_set[c][n] {
            (c + 1) % k
        } else {
            c
        }
    };
    let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    let initial: Vec<usize> =
        (0..done.len()).filter(|&n| done[n].from.contains(&INIT)).collect();
    for &n in &initial {
        ids.insert((n, 0), order.len());
        order.push((n, 0));
        queue.push_back((n, 0));
    }
    let mut edges: Vec<Vec<(Guard, usize)>> = Vec::new();
    while let Some((n, c)) = queue.pop_front() {
        let c2 = advance(n, c);
        let mut out = Vec::new();
        for &m in &succ[n] {
            let key = (m, c2);
            let id = *ids.entry(key).or_insert_with(|| {
                order.push(key);
                queue.push_back(key);
                order.len() - 1
            });
            out.push((guards[n].clone(), id));
        }
        edges.push(out);
    }
    let accepting: Vec<bool> =
        order.iter().map(|&(n, c)| k == 0 || (c == 0 && in_set[0][n])).collect();
    let (initial, accepting, edges) = reduce((0..initial.len()).collect(), accepting, edges);
    let accepting = accepting.into_iter().collect();
    BuchiAutomaton::from_parts(
        formula.atoms(),
        (0..edges.len()).map(|i| format!("s{i}")).collect(),
        initial.into_iter().collect(),
        accepting,
        edges,
    )
}

type Edges = Vec<Vec<(Guard, usize)>>;
type Signature<'a> = (usize, BTreeSet<(&'a Guard, usize)>);

// Language-preserving cleanup: drop states that cannot reach an accepting
// cycle, merge bisimilar states, renumber breadth-first from the initial states.
fn reduce(initial: Vec<usize>, accepting: Vec<bool>, edges: Edges) -> (Vec<usize>, Vec<usize>, Edges) {
    let n = edges.len();
    let adj: Vec<Vec<usize>> = edges.iter().map(|es| es.iter().map(|(_, y)| *y).collect()).collect();
    let mut good = vec![false; n];
    for comp in tarjan_scc(&adj) {
        if is_nontrivial(&adj, &comp) && comp.iter().any(|&x| accepting[x]) {
            for x in comp {
                good[x] = true;
            }
        }
    }
    let live = reachable(&reverse(&adj), (0..n).filter(|&x| good[x]));

    // partition refinement on (accepting, {(guard, block of target)})
    let mut block: Vec<usize> = (0..n).map(|x| accepting[x] as usize).collect();
    let mut count = 0;
    loop {
        let mut sigs: HashMap<Signature, usize> = HashMap::new();
        let next: Vec<usize> = (0..n)
            .map(|x| {
                let out = edges[x].iter().filter(|(_, y)| live[*y]).map(|(g, y)| (g, block[*y])).collect();
                let fresh = sigs.len();
                *sigs.entry((block[x], out)).or_insert(fresh)
            })
            .collect();
        block = next;
        if sigs.len() == count {
            break;
        }
        count = sigs.len();
    }

    let mut ids: HashMap<usize, usize> = HashMap::new();
    let mut rep = Vec::new();
    let mut queue = VecDeque::new();
    let visit = |x: usize, ids: &mut HashMap<usize, usize>, rep: &mut Vec<usize>, queue: &mut VecDeque<usize>| {
        *ids.entry(block[x]).or_insert_with(|| {
            rep.push(x);
            queue.push_back(x);
            rep.len() - 1
        })
    };
    let mut init: Vec<usize> =
        initial.into_iter().filter(|&x| live[x]).map(|x| visit(x, &mut ids, &mut rep, &mut queue)).collect();
    init.sort_unstable();
    init.dedup();
    let mut out: Edges = Vec::new();
    while let Some(x) = queue.pop_front() {
        let mut es: Vec<(Guard, usize)> = Vec::new();
        for (g, y) in &edges[x] {
            if live[*y] {
                let id = visit(*y, &mut ids, &mut rep, &mut queue);
                if !es.contains(&(g.clone(), id)) {
                    es.push((g.clone(), id));
                }
            }
        }
        out.push(es);
    }
    let acc = (0..rep.len()).filter(|&i| accepting[rep[i]]).collect();
    (init, acc, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lasso::Lasso;
    use crate::ltl::{eval_lasso, nba_accepts_lasso, parse_ltl_any, Letter};

    fn letter(atoms: &[&str]) -> Letter {
        atoms.iter().map(|s| s.to_string()).collect()
    }

    fn all_lassos(atoms: &[&str], max_len: usize) -> Vec<Lasso<Letter>> {
        let letters: Vec<Letter> = (0..1usize << atoms.len())
            .map(|m| {
                atoms.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, a)| a.to_string()).collect()
            })
            .collect();
        let mut words: Vec<Vec<Letter>> = vec![vec![]];
        let mut all = vec![vec![]];
        for _ in 0..max_len {
            words = words
                .iter()
                .flat_map(|w| letters.iter().map(move |l| {
                    let mut w = w.clone();
                    w.push(l.clone());
                    w
                }))
                .collect();
            all.extend(words.iter().cloned());
        }
        let mut out = Vec::new();
        for p in &all {
            for c in &all {
                if !c.is_empty() && p.len() + c.len() <= max_len {
                    out.push(Lasso::new(p.clone(), c.clone()));
                }
            }
        }
        out
    }

    #[test]
    fn true_gives_single_accepting_self_loop() {
        let nba = ltl_to_nba(&Formula::True);
        assert_eq!(nba.num_states(), 1);
        assert!(nba.initial().contains(&0));
        assert!(nba.is_accepting(0));
        assert_eq!(nba.edges_from(0), &[(Guard::True, 0)]);
    }

    #[test]
    fn false_accepts_nothing() {
        let nba = ltl_to_nba(&Formula::False);
        assert!(!nba_accepts_lasso(&nba, &Lasso::new(vec![], vec![letter(&[])])));
    }

    #[test]
    fn exhaustive_agreement_on_short_lassos() {
        let formulas = [
            "G(m1 -> G !m0)",
            "G F p",
            "F G p",
            "p U q",
            "!(p U q)",
            "X X p",
            "G(p -> X q)",
            "(p U q) U p",
            "G F p -> G F q",
            "F p & F !p",
            "G !(p & X(!q U p))",
        ];
        for text in formulas {
            let f = parse_ltl_any(text).unwrap();
            let nba = ltl_to_nba(&f);
            let atoms: Vec<String> = f.atoms().into_iter().collect();
            let atoms: Vec<&str> = atoms.iter().map(String::as_str).collect();
            for w in all_lassos(&atoms, 4) {
                assert_eq!(nba_accepts_lasso(&nba, &w), eval_lasso(&w, &f), "{text} on {w:?}");
            }
        }
    }

    #[test]
    fn per_nba_agrees_with_hand_drawn_one() {
        let f = parse_ltl_any("G(m1 -> G !m0)").unwrap();
        let nba = ltl_to_nba(&f);
        let hand = BuchiAutomaton::new(
            letter(&["m0", "m1"]),
            vec!["A".into(), "B".into()],
            &["A"],
            &["A", "B"],
            vec![
                ("A", Guard::neg("m1"), "A"),
                ("A", Guard::And(vec![Guard::neg("m0"), Guard::pos("m1")]), "B"),
                ("B", Guard::neg("m0"), "B"),
            ],
        );
        for w in all_lassos(&["m0", "m1"], 5) {
            assert_eq!(nba_accepts_lasso(&nba, &w), nba_accepts_lasso(&hand, &w));
        }
        // no until operators: every state accepts
        assert_eq!(nba.accepting().len(), nba.num_states());
    }

    #[test]
    fn translation_is_deterministic() {
        let f = parse_ltl_any("G F p -> G F (q & X p)").unwrap();
        assert_eq!(ltl_to_nba(&f), ltl_to_nba(&f));
    }
}

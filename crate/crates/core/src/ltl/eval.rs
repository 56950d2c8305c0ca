use super::{Formula, Letter};
use crate::lasso::Lasso;

/// Whether `prefix · cycle^ω` satisfies `formula`.
///
/// # Panics
///
/// If the cycle is empty.
pub fn eval_lasso(word: &Lasso<Letter>, formula: &Formula) -> bool {
    eval_positions(word, formula)[0]
}

/// Truth value of `formula` at every folded position `0..word.len()` of the
/// lasso. Positions past the prefix are identified modulo the cycle, so the
/// temporal operators become fixpoints over a functional graph: least for
/// `U`/`F`, greatest for `G`.
pub fn eval_positions(word: &Lasso<Letter>, formula: &Formula) -> Vec<bool> {
    assert!(!word.cycle.is_empty(), "lasso cycle must be non-empty");
    let n = word.len();
    let succ: Vec<usize> = (0..n).map(|i| word.successor(i)).collect();
    go(word, &succ, formula)
}

fn go(word: &Lasso<Letter>, succ: &[usize], f: &Formula) -> Vec<bool> {
    let n = succ.len();
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(a) => (0..n).map(|i| word.at(i).contains(a)).collect(),
        Formula::Not(g) => go(word, succ, g).into_iter().map(|v| !v).collect(),
        Formula::And(a, b) => zip(go(word, succ, a), go(word, succ, b), |x, y| x && y),
        Formula::Or(a, b) => zip(go(word, succ, a), go(word, succ, b), |x, y| x || y),
        Formula::Implies(a, b) => zip(go(word, succ, a), go(word, succ, b), |x, y| !x || y),
        Formula::Next(g) => {
            let v = go(word, succ, g);
            (0..n).map(|i| v[succ[i]]).collect()
        }
        Formula::Until(a, b) => until(succ, &go(word, succ, a), &go(word, succ, b)),
        Formula::Eventually(g) => until(succ, &vec![true; n], &go(word, succ, g)),
        Formula::Always(g) => {
            let v = go(word, succ, g);
            let mut res = vec![true; n];
            fixpoint(&mut res, |res, i| v[i] && res[succ[i]]);
            res
        }
    }
}

fn until(succ: &[usize], a: &[bool], b: &[bool]) -> Vec<bool> {
    let mut res = vec![false; succ.len()];
    fixpoint(&mut res, |res, i| b[i] || (a[i] && res[succ[i]]));
    res
}

fn fixpoint(res: &mut [bool], step: impl Fn(&[bool], usize) -> bool) {
    loop {
        let mut changed = false;
        for i in (0..res.len()).rev() {
            let v = step(res, i);
            if v != res[i] {
                res[i] = v;
                changed = true;
            }
        }
        if !changed {
            return;
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

//! Linear temporal logic: syntax, parsing, lasso semantics and translation to
//! Büchi automata.

mod eval;
mod nba;
mod parser;
mod translate;

use std::collections::BTreeSet;
use std::fmt;

pub use eval::{eval_lasso, eval_positions};
pub use nba::{nba_accepts_lasso, BuchiAutomaton, Guard};
pub use parser::{is_identifier, parse_ltl, parse_ltl_any};
pub use translate::ltl_to_nba;

/// One letter of the NBA alphabet: the set of atoms that hold.
pub type Letter = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }

    pub fn always(f: Formula) -> Self {
        Formula::Always(Box::new(f))
    }

    /// Left-folded conjunction; the empty conjunction is `true`.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Left-folded disjunction; the empty disjunction is `false`.
    pub fn disjunction(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts.into_iter().reduce(Formula::or).unwrap_or(Formula::False)
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(f) | Formula::Next(f) | Formula::Eventually(f) | Formula::Always(f) => {
                f.collect_atoms(out)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Until(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Next(f) | Formula::Eventually(f) | Formula::Always(f) => {
                1 + f.size()
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Until(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Nesting depth of operators; atoms and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 0,
            Formula::Not(f) | Formula::Next(f) | Formula::Eventually(f) | Formula::Always(f) => {
                1 + f.depth()
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Until(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Until(..) => 4,
            Formula::Not(_) | Formula::Next(_) | Formula::Eventually(_) | Formula::Always(_) => 5,
            Formula::True | Formula::False | Formula::Atom(_) => 6,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Formula, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.precedence();
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => f.write_str(a),
            Formula::Not(c) => {
                f.write_str("!")?;
                write_child(f, c, c.precedence() < p)
            }
            Formula::Next(c) | Formula::Eventually(c) | Formula::Always(c) => {
                let op = match self {
                    Formula::Next(_) => "X",
                    Formula::Eventually(_) => "F",
                    _ => "G",
                };
                if c.precedence() < p {
                    write!(f, "{op}({c})")
                } else {
                    write!(f, "{op} {c}")
                }
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let op = if matches!(self, Formula::And(..)) { "&" } else { "|" };
                write_child(f, a, a.precedence() < p)?;
                write!(f, " {op} ")?;
                write_child(f, b, b.precedence() <= p)
            }
            Formula::Implies(a, b) | Formula::Until(a, b) => {
                let op = if matches!(self, Formula::Implies(..)) { "->" } else { "U" };
                write_child(f, a, a.precedence() <= p)?;
                write!(f, " {op} ")?;
                write_child(f, b, b.precedence() < p)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_uses_minimal_parentheses() {
        let per = Formula::always(Formula::implies(
            Formula::atom("m1"),
            Formula::always(Formula::not(Formula::atom("m0"))),
        ));
        assert_eq!(per.to_string(), "G(m1 -> G !m0)");
        let f = Formula::and(
            Formula::and(Formula::atom("a"), Formula::atom("b")),
            Formula::and(Formula::atom("c"), Formula::atom("d")),
        );
        assert_eq!(f.to_string(), "a & b & (c & d)");
        let u = Formula::until(Formula::until(Formula::atom("a"), Formula::atom("b")), Formula::atom("c"));
        assert_eq!(u.to_string(), "(a U b) U c");
    }

    #[test]
    fn conjunction_of_nothing_is_true() {
        assert_eq!(Formula::conjunction([]), Formula::True);
        assert_eq!(Formula::disjunction([]), Formula::False);
        assert_eq!(Formula::conjunction([Formula::atom("p")]), Formula::atom("p"));
    }

    #[test]
    fn size_and_depth() {
        let f = parse_ltl_any("G(m1 -> G !m0)").unwrap();
        assert_eq!(f.size(), 6);
        assert_eq!(f.depth(), 4);
        assert_eq!(f.atoms().into_iter().collect::<Vec<_>>(), ["m0", "m1"]);
    }
}

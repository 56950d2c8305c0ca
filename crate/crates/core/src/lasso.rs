//! Ultimately periodic words: a finite prefix followed by a cycle repeated forever.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Lasso<T> {
    pub prefix: Vec<T>,
    pub cycle: Vec<T>,
}

impl<T> Lasso<T> {
    pub fn new(prefix: Vec<T>, cycle: Vec<T>) -> Self {
        Self { prefix, cycle }
    }

    /// Total number of distinct positions (`|prefix| + |cycle|`).
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty() && self.cycle.is_empty()
    }

    /// Element at position `i` of the infinite word. Panics on an empty cycle
    /// once `i` runs past the prefix.
    pub fn at(&self, i: usize) -> &T {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Position following `i` when positions are folded onto `0..len()`.
    pub fn successor(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.prefix.len()
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Lasso<U> {
        Lasso {
            prefix: self.prefix.iter().map(&mut f).collect(),
            cycle: self.cycle.iter().map(&mut f).collect(),
        }
    }

    /// Like [`Lasso::map`], dropping elements for which `f` returns `None`.
    pub fn filter_map<U>(&self, mut f: impl FnMut(&T) -> Option<U>) -> Lasso<U> {
        Lasso {
            prefix: self.prefix.iter().filter_map(&mut f).collect(),
            cycle: self.cycle.iter().filter_map(&mut f).collect(),
        }
    }
}

impl<T: Clone> Lasso<T> {
    /// The finite word `prefix · cycle^reps`.
    pub fn unroll(&self, reps: usize) -> Vec<T> {
        let mut out = self.prefix.clone();
        for _ in 0..reps {
            out.extend(self.cycle.iter().cloned());
        }
        out
    }
}

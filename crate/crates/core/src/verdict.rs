//! Outcome plumbing shared by the two satisfiability backends.

use std::time::Duration;

use crate::tree::Tree;

/// Whether the search ran with the theoretically complete bounds or with
/// user-supplied caps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Sound,
    Bounded,
}

/// Result of a bounded satisfiability search.  A satisfiable verdict always
/// carries a witness tree that has been re-checked by direct evaluation.
/// `UnsatProved` is only produced when the exhausted search space provably
/// covers every candidate model; otherwise exhaustion downgrades to
/// `UnsatWithinBounds`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Sat(Tree),
    UnsatProved,
    UnsatWithinBounds,
    Timeout,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

/// Verdict paired with whatever bound structure the backend used.
#[derive(Debug, Clone)]
pub struct Verdict<B> {
    pub outcome: Outcome,
    pub bounds_used: B,
    pub stats: Stats,
}

impl<B> Verdict<B> {
    pub fn is_sat(&self) -> bool {
        matches!(self.outcome, Outcome::Sat(_))
    }

    pub fn witness(&self) -> Option<&Tree> {
        match &self.outcome {
            Outcome::Sat(t) => Some(t),
            _ => None,
        }
    }
}

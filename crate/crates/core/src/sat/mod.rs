//! CNF construction, cardinality encodings and the CDCL solver.

mod cardinality;
mod cnf;
mod solver;

pub use cardinality::{at_least, at_most};
pub use cnf::Cnf;
pub use solver::{Lit, Solver, Status, Var};

/// External stop signal polled during search (wall-clock deadlines live in
/// the std companion crate).
pub trait Interrupt {
    fn should_stop(&self) -> bool;
}

/// Search limits. With only `max_conflicts` set, runs are reproducible.
#[derive(Clone, Copy, Default)]
pub struct Budget<'a> {
    pub max_conflicts: Option<u64>,
    pub interrupt: Option<&'a dyn Interrupt>,
}

impl<'a> Budget<'a> {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn conflicts(max: u64) -> Self {
        Self {
            max_conflicts: Some(max),
            interrupt: None,
        }
    }

    pub fn with_interrupt(mut self, interrupt: &'a dyn Interrupt) -> Self {
        self.interrupt = Some(interrupt);
        self
    }

    /// Budget left after `used` conflicts have been spent.
    pub fn remaining(&self, used: u64) -> Self {
        Self {
            max_conflicts: self.max_conflicts.map(|m| m.saturating_sub(used)),
            interrupt: self.interrupt,
        }
    }

    pub fn exhausted(&self, used: u64) -> bool {
        self.max_conflicts.is_some_and(|m| used >= m) || self.interrupted()
    }

    pub fn interrupted(&self) -> bool {
        self.interrupt.is_some_and(|i| i.should_stop())
    }
}

impl core::fmt::Debug for Budget<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Budget")
            .field("max_conflicts", &self.max_conflicts)
            .field("interrupt", &self.interrupt.is_some())
            .finish()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
}

impl SolveStats {
    pub fn accumulate(&mut self, other: &SolveStats) {
        self.decisions += other.decisions;
        self.conflicts += other.conflicts;
        self.propagations += other.propagations;
        self.restarts += other.restarts;
    }
}

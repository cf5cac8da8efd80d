use alloc::vec::Vec;

use super::{Budget, Solver, Status};

/// A clause set over DIMACS literals (variables numbered from 1).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    vars: u32,
    clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vars(vars: u32) -> Self {
        Self {
            vars,
            clauses: Vec::new(),
        }
    }

    pub fn from_parts(vars: u32, clauses: Vec<Vec<i32>>) -> Self {
        Self { vars, clauses }
    }

    pub fn new_var(&mut self) -> i32 {
        self.vars += 1;
        self.vars as i32
    }

    pub fn var_count(&self) -> u32 {
        self.vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn add_clause<I: IntoIterator<Item = i32>>(&mut self, lits: I) {
        let c: Vec<i32> = lits.into_iter().collect();
        debug_assert!(c.iter().all(|&l| l != 0 && l.unsigned_abs() <= self.vars));
        self.clauses.push(c);
    }

    /// True iff every clause literal names a declared variable.
    pub fn is_well_formed(&self) -> bool {
        self.clauses
            .iter()
            .flatten()
            .all(|&l| l != 0 && l.unsigned_abs() <= self.vars)
    }

    pub fn solver(&self) -> Solver {
        Solver::from_clauses(self.vars as usize, &self.clauses)
    }

    /// One-shot solve; on `Sat` returns the model indexed by variable - 1.
    pub fn solve(&self, budget: &Budget<'_>) -> (Status, Option<Vec<bool>>) {
        let mut s = self.solver();
        let st = s.solve(budget);
        let model = (st == Status::Sat).then(|| s.model().to_vec());
        (st, model)
    }

    /// Checks a full assignment (`model[v - 1]` is variable `v`).
    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&l| {
                model
                    .get(l.unsigned_abs() as usize - 1)
                    .copied()
                    .unwrap_or(false)
                    == (l > 0)
            })
        })
    }
}

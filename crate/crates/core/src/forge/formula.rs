use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};

/// A CNF formula with exactly three literals per clause. Literals are
/// DIMACS-style: `i` is `x_i`, `-i` is its negation, `1 <= i <= n_vars`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThreeSatFormula {
    n_vars: usize,
    clauses: Vec<[i32; 3]>,
}

impl ThreeSatFormula {
    pub fn new(n_vars: usize, clauses: Vec<[i32; 3]>) -> Result<Self> {
        for clause in &clauses {
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > n_vars {
                    return Err(Error::InvalidFormula(format!(
                        "literal {lit} out of range for {n_vars} variables"
                    )));
                }
            }
        }
        Ok(Self { n_vars, clauses })
    }

    /// Uniform random clauses. Each clause uses three distinct variables
    /// when `n_vars >= 3`.
    pub fn random(n_vars: usize, m: usize, seed: u64) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::InvalidFormula("no variables".into()));
        }
        let mut rng = super::rng(seed);
        let mut clauses = Vec::with_capacity(m);
        for _ in 0..m {
            let mut vars = [0usize; 3];
            let mut pos = 0;
            while pos < 3 {
                let v = rng.gen_range(1..=n_vars);
                if n_vars < 3 || !vars[..pos].contains(&v) {
                    vars[pos] = v;
                    pos += 1;
                }
            }
            clauses.push(vars.map(|v| {
                if rng.gen_bool(0.5) {
                    v as i32
                } else {
                    -(v as i32)
                }
            }));
        }
        Self::new(n_vars, clauses)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn clauses(&self) -> &[[i32; 3]] {
        &self.clauses
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    /// `assignment[i - 1]` is the value of `x_i`.
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                assignment
                    .get(lit.unsigned_abs() as usize - 1)
                    .copied()
                    .unwrap_or(false)
                    == (lit > 0)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn evaluation() {
        let f = ThreeSatFormula::new(3, vec![[1, -2, 3]]).unwrap();
        assert!(f.evaluate(&[true, true, false]));
        assert!(!f.evaluate(&[false, true, false]));
        let contradiction = ThreeSatFormula::new(1, vec![[1, 1, 1], [-1, -1, -1]]).unwrap();
        assert!(!contradiction.evaluate(&[true]) && !contradiction.evaluate(&[false]));
    }

    #[test]
    fn rejects_bad_literals() {
        assert!(ThreeSatFormula::new(2, vec![[1, 0, 2]]).is_err());
        assert!(ThreeSatFormula::new(2, vec![[1, 3, 2]]).is_err());
    }

    #[test]
    fn random_is_seeded() {
        let a = ThreeSatFormula::random(4, 6, 3).unwrap();
        assert_eq!(a, ThreeSatFormula::random(4, 6, 3).unwrap());
        for c in a.clauses() {
            assert!(
                c[0].abs() != c[1].abs() && c[1].abs() != c[2].abs() && c[0].abs() != c[2].abs()
            );
        }
    }
}

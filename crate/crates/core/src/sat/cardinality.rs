//! Cardinality constraints by sequential counter.
//!
//! Every clause can carry an optional relaxation literal: when that literal
//! is true the whole constraint is switched off.

use alloc::vec::Vec;

use super::Cnf;

fn push(cnf: &mut Cnf, relax: Option<i32>, lits: &[i32]) {
    cnf.add_clause(lits.iter().copied().chain(relax));
}

/// `sum(lits) <= bound`. Returns the counter variables introduced.
pub fn at_most(cnf: &mut Cnf, lits: &[i32], bound: usize, relax: Option<i32>) -> Vec<i32> {
    let n = lits.len();
    if bound >= n {
        return Vec::new();
    }
    if bound == 0 {
        for &x in lits {
            push(cnf, relax, &[-x]);
        }
        return Vec::new();
    }
    // s[i][j]: at least j+1 of lits[0..=i] are true
    let regs: Vec<Vec<i32>> = (0..n - 1)
        .map(|_| (0..bound).map(|_| cnf.new_var()).collect())
        .collect();
    push(cnf, relax, &[-lits[0], regs[0][0]]);
    for j in 1..bound {
        push(cnf, relax, &[-regs[0][j]]);
    }
    for i in 1..n - 1 {
        let x = lits[i];
        push(cnf, relax, &[-x, regs[i][0]]);
        push(cnf, relax, &[-regs[i - 1][0], regs[i][0]]);
        for j in 1..bound {
            push(cnf, relax, &[-x, -regs[i - 1][j - 1], regs[i][j]]);
            push(cnf, relax, &[-regs[i - 1][j], regs[i][j]]);
        }
        push(cnf, relax, &[-x, -regs[i - 1][bound - 1]]);
    }
    push(cnf, relax, &[-lits[n - 1], -regs[n - 2][bound - 1]]);
    regs.into_iter().flatten().collect()
}

/// `sum(lits) >= bound`, as at-most over the negated literals.
pub fn at_least(cnf: &mut Cnf, lits: &[i32], bound: usize, relax: Option<i32>) -> Vec<i32> {
    if bound == 0 {
        return Vec::new();
    }
    if bound > lits.len() {
        push(cnf, relax, &[]);
        return Vec::new();
    }
    let negated: Vec<i32> = lits.iter().map(|&l| -l).collect();
    at_most(cnf, &negated, lits.len() - bound, relax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::{Budget, Status};

    /// Fixes the inputs to `assignment` and asks whether the counter
    /// clauses can be completed.
    fn extendable(
        n: usize,
        bound: usize,
        at_most_mode: bool,
        assignment: u32,
        relaxed: bool,
    ) -> bool {
        let mut cnf = Cnf::with_vars(n as u32 + 1);
        let lits: Vec<i32> = (1..=n as i32).collect();
        let relax = Some(n as i32 + 1);
        if at_most_mode {
            at_most(&mut cnf, &lits, bound, relax);
        } else {
            at_least(&mut cnf, &lits, bound, relax);
        }
        for (q, &l) in lits.iter().enumerate() {
            cnf.add_clause([if assignment >> q & 1 == 1 { l } else { -l }]);
        }
        cnf.add_clause([if relaxed {
            n as i32 + 1
        } else {
            -(n as i32 + 1)
        }]);
        assert!(cnf.is_well_formed());
        cnf.solve(&Budget::unlimited()).0 == Status::Sat
    }

    #[test]
    fn counters_match_popcount() {
        for n in 1..=6usize {
            for bound in 0..=n + 1 {
                for a in 0u32..1 << n {
                    let ones = a.count_ones() as usize;
                    assert_eq!(
                        extendable(n, bound, true, a, false),
                        ones <= bound,
                        "n={n} bound={bound} a={a:b}"
                    );
                    assert_eq!(
                        extendable(n, bound, false, a, false),
                        ones >= bound,
                        "n={n} bound={bound} a={a:b}"
                    );
                    assert!(extendable(n, bound, true, a, true));
                    assert!(extendable(n, bound, false, a, true));
                }
            }
        }
    }

    #[test]
    fn clause_count_is_linear_in_bound() {
        let mut cnf = Cnf::with_vars(10);
        let lits: Vec<i32> = (1..=10).collect();
        let aux = at_most(&mut cnf, &lits, 3, None);
        assert_eq!(aux.len(), 9 * 3);
        // 1 + (bound-1) + 8*(2 + 2(bound-1) + 1) + 1
        assert_eq!(cnf.clauses().len(), 1 + 2 + 8 * (3 + 4) + 1);
    }
}

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use super::formula::ThreeSatFormula;
use super::gadget::{gen_gadget, Gadget};
use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::graph::{
    verify_representation, AttributeRepresentation, CompatibilityGraph, ConstrainedPairs,
};
use crate::represent::RepresentationProblem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    /// Carries the assignment in its donor vector.
    Assignment,
    /// Fixes the two extra bits.
    Extra,
    /// Forces exactly one of `x_i`, `not x_i` (1-based `i`).
    Variable(usize),
    /// Forces one true literal of clause `j` (0-based).
    Clause(usize),
    GadgetFirst(usize),
    GadgetSecond(usize),
}

/// A representation problem at `k = 2n + 2`, `t = 1` that is solvable
/// exactly when the formula is satisfiable.
///
/// Vertex layout: the assignment vertex `0`, the extra-bit vertex `1`, the
/// variable vertices `2..2 + n`, one vertex per clause, then the gadget.
/// Bit `i - 1` stands for `x_i`, bit `n + i - 1` for `not x_i`, and bits
/// `2n`, `2n + 1` are the extras.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionInstance {
    pub formula: ThreeSatFormula,
    pub problem: RepresentationProblem,
    pub roles: Vec<Role>,
    pub gadget: Gadget,
}

impl ReductionInstance {
    pub fn n_vars(&self) -> usize {
        self.formula.n_vars()
    }

    pub fn k(&self) -> usize {
        self.problem.k
    }

    pub const ASSIGNMENT_VERTEX: usize = 0;
    pub const EXTRA_VERTEX: usize = 1;

    pub fn variable_vertex(&self, i: usize) -> usize {
        1 + i
    }

    pub fn clause_vertex(&self, j: usize) -> usize {
        2 + self.n_vars() + j
    }

    pub fn gadget_offset(&self) -> usize {
        2 + self.n_vars() + self.formula.m()
    }

    /// The same problem with the gadget fixed to its labelled
    /// representation. The gadget's representation is unique up to a
    /// permutation of the bit positions, and the whole problem is invariant
    /// under such permutations, so this keeps satisfiability while removing
    /// the symmetry a solver would otherwise have to explore.
    pub fn pinned_problem(&self) -> RepresentationProblem {
        let mut problem = self.problem.clone();
        let rep = self.gadget.canonical_representation();
        let offset = self.gadget_offset();
        for v in 0..self.gadget.n() {
            problem
                .pin(offset + v, rep.donor(v).clone(), rep.patient(v).clone())
                .expect("gadget fits the instance");
        }
        problem
    }

    /// Bit standing for literal `lit`.
    pub fn literal_bit(&self, lit: i32) -> usize {
        literal_bit(self.n_vars(), lit)
    }

    /// Bits of clause `j`'s literals (deduplicated) plus the last extra bit.
    pub fn clause_bits(&self, j: usize) -> BTreeSet<usize> {
        clause_bits(&self.formula, j)
    }

    /// The representation the construction has in mind for `assignment`.
    /// It verifies exactly when the assignment satisfies the formula.
    pub fn witness(&self, assignment: &[bool]) -> Result<AttributeRepresentation> {
        let (n, k) = (self.n_vars(), self.k());
        if assignment.len() != n {
            return Err(Error::InvalidFormula(format!(
                "assignment has {} values for {n} variables",
                assignment.len()
            )));
        }
        let total = self.problem.graph.n();
        let mut donor = alloc::vec![BitVector::ones(k); total];
        let mut patient = alloc::vec![BitVector::ones(k); total];
        let extras = [2 * n, 2 * n + 1];
        let mut truth: Vec<usize> = (1..=n)
            .map(|i| if assignment[i - 1] { i - 1 } else { n + i - 1 })
            .collect();
        truth.extend(extras);
        donor[Self::ASSIGNMENT_VERTEX] = BitVector::from_ones(k, &truth);
        patient[Self::EXTRA_VERTEX] = BitVector::from_ones(k, &extras);
        for i in 1..=n {
            patient[self.variable_vertex(i)] = BitVector::from_ones(k, &[i - 1, n + i - 1]);
        }
        for j in 0..self.formula.m() {
            let bits: Vec<usize> = self.clause_bits(j).into_iter().collect();
            patient[self.clause_vertex(j)] = BitVector::from_ones(k, &bits);
        }
        let gadget = self.gadget.canonical_representation();
        let offset = self.gadget_offset();
        for v in 0..self.gadget.n() {
            donor[offset + v] = gadget.donor(v).clone();
            patient[offset + v] = gadget.patient(v).clone();
        }
        AttributeRepresentation::new(k, 1, donor, patient)
    }
}

fn literal_bit(n: usize, lit: i32) -> usize {
    let i = lit.unsigned_abs() as usize;
    if lit > 0 {
        i - 1
    } else {
        n + i - 1
    }
}

fn clause_bits(formula: &ThreeSatFormula, j: usize) -> BTreeSet<usize> {
    let n = formula.n_vars();
    let mut bits: BTreeSet<usize> = formula.clauses()[j]
        .iter()
        .map(|&lit| literal_bit(n, lit))
        .collect();
    bits.insert(2 * n + 1);
    bits
}

pub fn reduce_3sat(formula: &ThreeSatFormula) -> Result<ReductionInstance> {
    let n = formula.n_vars();
    if n == 0 {
        return Err(Error::InvalidFormula("no variables".into()));
    }
    let m = formula.m();
    let k = 2 * n + 2;
    let gadget = gen_gadget(k)?;
    let offset = 2 + n + m;
    let total = offset + gadget.n();
    let mut graph = CompatibilityGraph::empty(total);
    let mut pairs = gadget.pairs_at(offset);
    for (i, j) in gadget.graph.edges() {
        graph.add_edge(offset + i, offset + j)?;
    }

    let mut roles = Vec::with_capacity(total);
    roles.push(Role::Assignment);
    roles.push(Role::Extra);
    roles.extend((1..=n).map(Role::Variable));
    roles.extend((0..m).map(Role::Clause));
    roles.extend((0..gadget.n1()).map(Role::GadgetFirst));
    roles.extend((0..k).map(Role::GadgetSecond));

    let prime = 0..offset;
    // first-part gadget vertices into G'
    for u in 0..gadget.n1() {
        let w = offset + u;
        let (a, b) = gadget.labels[u];
        for x in prime.clone() {
            pairs.insert((w, x));
            let edge = match roles[x] {
                Role::Assignment => false,
                Role::Extra => (a, b) != (2 * n, 2 * n + 1),
                Role::Variable(i) => (a, b) != (i - 1, n + i - 1),
                Role::Clause(j) => {
                    let bits = clause_bits(formula, j);
                    !(bits.contains(&a) && bits.contains(&b))
                }
                _ => unreachable!("G' roles only"),
            };
            if edge {
                graph.add_edge(w, x)?;
            }
        }
    }
    // second-part gadget vertices have no edges into G'
    for i in 0..k {
        for x in prime.clone() {
            pairs.insert((gadget.second_part(i) + offset, x));
        }
    }
    // G' minus the assignment vertex: no edges anywhere
    for x in 1..offset {
        for y in 0..total {
            if y != x {
                pairs.insert((x, y));
            }
        }
    }
    // the assignment vertex gives to every variable vertex and nothing else
    // in G'; its edges into the gadget are left free
    for y in 1..offset {
        pairs.insert((0, y));
        if matches!(roles[y], Role::Variable(_)) {
            graph.add_edge(0, y)?;
        }
    }

    let problem = RepresentationProblem::new(graph, ConstrainedPairs::only(pairs), k, 1)?;
    Ok(ReductionInstance {
        formula: formula.clone(),
        problem,
        roles,
        gadget,
    })
}

/// Reads the assignment off the assignment vertex's donor vector: `x_i` is
/// true when the bit standing for `x_i` is set. Bit meanings are taken from
/// the gadget, whose second-part patient vectors each miss exactly one bit,
/// so any column permutation the solver chose is undone. Variables that are
/// neither set nor negated default to false.
pub fn decode_assignment(
    instance: &ReductionInstance,
    rep: &AttributeRepresentation,
) -> Result<Vec<bool>> {
    let report =
        verify_representation(&instance.problem.graph, rep, &instance.problem.constrained)?;
    if !report.ok {
        return Err(Error::InvalidFormula(format!(
            "representation fails {} constrained pairs",
            report.mismatches.len()
        )));
    }
    let offset = instance.gadget_offset();
    let mut column = Vec::with_capacity(instance.k());
    for i in 0..instance.k() {
        let p = rep.patient(offset + instance.gadget.second_part(i));
        let zeros: Vec<usize> = (0..instance.k()).filter(|&q| !p.get(q)).collect();
        match zeros.as_slice() {
            [q] => column.push(*q),
            _ => {
                return Err(Error::Internal(format!(
                    "gadget vertex {i} has patient vector {p} instead of a single zero"
                )))
            }
        }
    }
    let d = rep.donor(ReductionInstance::ASSIGNMENT_VERTEX);
    let assignment: Vec<bool> = (0..instance.n_vars()).map(|i| d.get(column[i])).collect();
    if !instance.formula.evaluate(&assignment) {
        return Err(Error::Internal(format!(
            "verified representation decodes to non-satisfying assignment {assignment:?}"
        )));
    }
    Ok(assignment)
}

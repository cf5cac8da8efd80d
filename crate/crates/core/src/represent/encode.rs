//! Clause-level encodings of the representation problem.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::RepresentationProblem;
use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::graph::AttributeRepresentation;
use crate::sat::{at_least, at_most, Cnf};

/// Named auxiliary variables. Vertex indices and bit positions are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AuxRole {
    /// `z^q_ij`: bit `q` witnesses the required conflict of non-edge `(i, j)`
    /// (threshold-0 encoding).
    Witness { i: usize, j: usize, q: usize },
    /// `c^q_ij`: donor `i` and patient `j` both have bit `q` set.
    Conflict { i: usize, j: usize, q: usize },
    /// `xi_ij`: pair `(i, j)` is allowed to be reproduced wrongly.
    Violation { i: usize, j: usize },
}

/// Maps the named roles of an encoding to DIMACS variables. Donor bits
/// come first (`1 + i*k + q`), then patient bits (`1 + n*k + i*k + q`),
/// then auxiliaries in creation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarMap {
    n: usize,
    k: usize,
    aux: BTreeMap<AuxRole, i32>,
    by_var: BTreeMap<i32, AuxRole>,
}

impl VarMap {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            aux: BTreeMap::new(),
            by_var: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn donor(&self, i: usize, q: usize) -> i32 {
        (1 + i * self.k + q) as i32
    }

    #[inline]
    pub fn patient(&self, i: usize, q: usize) -> i32 {
        (1 + self.n * self.k + i * self.k + q) as i32
    }

    pub fn primary_count(&self) -> usize {
        2 * self.n * self.k
    }

    pub fn aux(&self, role: AuxRole) -> Option<i32> {
        self.aux.get(&role).copied()
    }

    /// Records a role. Returns an error if the role or variable is taken.
    pub fn insert(&mut self, role: AuxRole, var: i32) -> Result<()> {
        if var <= 0 || (var as usize) <= self.primary_count() || self.by_var.contains_key(&var) {
            return Err(Error::Internal(alloc::format!(
                "variable {var} already mapped"
            )));
        }
        if self.aux.contains_key(&role) {
            return Err(Error::Internal(alloc::format!(
                "role {role:?} mapped twice"
            )));
        }
        self.aux.insert(role, var);
        self.by_var.insert(var, role);
        Ok(())
    }

    /// The role of an auxiliary variable.
    pub fn role_of(&self, var: i32) -> Option<AuxRole> {
        self.by_var.get(&var).copied()
    }

    pub fn aux_entries(&self) -> impl Iterator<Item = (AuxRole, i32)> + '_ {
        self.aux.iter().map(|(&r, &v)| (r, v))
    }

    /// Decodes the donor and patient bits of a model (`model[v - 1]` is
    /// variable `v`). Bits the model leaves out read as 0.
    pub fn decode(&self, model: &[bool], t: usize) -> AttributeRepresentation {
        let bit = |v: i32| model.get(v as usize - 1).copied().unwrap_or(false);
        let donor = (0..self.n)
            .map(|i| {
                BitVector::from_bits(
                    &(0..self.k)
                        .map(|q| bit(self.donor(i, q)))
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        let patient = (0..self.n)
            .map(|i| {
                BitVector::from_bits(
                    &(0..self.k)
                        .map(|q| bit(self.patient(i, q)))
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        AttributeRepresentation::new(self.k, t, donor, patient)
            .expect("widths match by construction")
    }

    /// The clause forbidding exactly this representation's donor/patient
    /// bits.
    pub fn blocking_clause(&self, rep: &AttributeRepresentation) -> Vec<i32> {
        let mut c = Vec::with_capacity(self.primary_count());
        for i in 0..self.n {
            for q in 0..self.k {
                let d = self.donor(i, q);
                c.push(if rep.donor(i).get(q) { -d } else { d });
                let p = self.patient(i, q);
                c.push(if rep.patient(i).get(q) { -p } else { p });
            }
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfEncoding {
    pub cnf: Cnf,
    pub varmap: VarMap,
    /// Counter registers introduced by cardinality constraints.
    pub cardinality_aux: Vec<i32>,
    pub t: usize,
}

impl CnfEncoding {
    fn empty(problem: &RepresentationProblem) -> Self {
        let varmap = VarMap::new(problem.graph.n(), problem.k);
        let mut cnf = Cnf::with_vars(varmap.primary_count() as u32);
        for (&i, (d, p)) in &problem.pinned {
            for q in 0..problem.k {
                let (dv, pv) = (varmap.donor(i, q), varmap.patient(i, q));
                cnf.add_clause([if d.get(q) { dv } else { -dv }]);
                cnf.add_clause([if p.get(q) { pv } else { -pv }]);
            }
        }
        Self {
            cnf,
            varmap,
            cardinality_aux: Vec::new(),
            t: problem.t,
        }
    }

    pub fn var_count(&self) -> u32 {
        self.cnf.var_count()
    }

    pub fn clause_count(&self) -> usize {
        self.cnf.clauses().len()
    }

    /// ξ variables in pair order (empty unless built for min-violations).
    pub fn violation_vars(&self) -> Vec<i32> {
        self.varmap
            .aux_entries()
            .filter_map(|(r, v)| matches!(r, AuxRole::Violation { .. }).then_some(v))
            .collect()
    }

    pub fn decode(&self, model: &[bool]) -> AttributeRepresentation {
        self.varmap.decode(model, self.t)
    }
}

/// Threshold-0 encoding: edges forbid any shared bit, non-edges need a
/// witness bit shared by donor and patient.
pub fn encode_k0(problem: &RepresentationProblem) -> Result<CnfEncoding> {
    if problem.t != 0 {
        return Err(Error::NonZeroThreshold(problem.t));
    }
    let mut enc = CnfEncoding::empty(problem);
    let k = problem.k;
    for (i, j) in problem.constrained.pairs(problem.graph.n()) {
        if problem.graph.has_edge(i, j) {
            for q in 0..k {
                let (d, p) = (enc.varmap.donor(i, q), enc.varmap.patient(j, q));
                enc.cnf.add_clause([-d, -p]);
            }
        } else {
            let zs: Vec<i32> = (0..k).map(|_| enc.cnf.new_var()).collect();
            for (q, &z) in zs.iter().enumerate() {
                enc.varmap.insert(AuxRole::Witness { i, j, q }, z)?;
            }
            enc.cnf.add_clause(zs.iter().copied());
            for (q, &z) in zs.iter().enumerate() {
                let (d, p) = (enc.varmap.donor(i, q), enc.varmap.patient(j, q));
                enc.cnf.add_clause([-z, d]);
                enc.cnf.add_clause([-z, p]);
            }
        }
    }
    Ok(enc)
}

/// General-threshold encoding with conflict indicators and sequential
/// counters: edges allow at most `t` conflicts, non-edges need at least
/// `t + 1`.
pub fn encode_kt(problem: &RepresentationProblem) -> Result<CnfEncoding> {
    encode_conflicts(problem, false)
}

/// As [`encode_kt`], with a violation selector per constrained pair that
/// switches that pair's cardinality constraint off when true.
pub fn encode_kt_relaxed(problem: &RepresentationProblem) -> Result<CnfEncoding> {
    encode_conflicts(problem, true)
}

fn encode_conflicts(problem: &RepresentationProblem, relaxed: bool) -> Result<CnfEncoding> {
    let (k, t) = (problem.k, problem.t);
    if t >= k {
        return Err(Error::ThresholdTooLarge { k, t });
    }
    let mut enc = CnfEncoding::empty(problem);
    for (i, j) in problem.constrained.pairs(problem.graph.n()) {
        let mut cs = Vec::with_capacity(k);
        for q in 0..k {
            let c = enc.cnf.new_var();
            enc.varmap.insert(AuxRole::Conflict { i, j, q }, c)?;
            let (d, p) = (enc.varmap.donor(i, q), enc.varmap.patient(j, q));
            enc.cnf.add_clause([-c, d]);
            enc.cnf.add_clause([-c, p]);
            enc.cnf.add_clause([-d, -p, c]);
            cs.push(c);
        }
        let relax = if relaxed {
            let xi = enc.cnf.new_var();
            enc.varmap.insert(AuxRole::Violation { i, j }, xi)?;
            Some(xi)
        } else {
            None
        };
        let aux = if problem.graph.has_edge(i, j) {
            at_most(&mut enc.cnf, &cs, t, relax)
        } else {
            at_least(&mut enc.cnf, &cs, t + 1, relax)
        };
        enc.cardinality_aux.extend(aux);
    }
    Ok(enc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{CompatibilityGraph, ConstrainedPairs};

    fn problem(g: CompatibilityGraph, k: usize, t: usize) -> RepresentationProblem {
        RepresentationProblem::new(g, ConstrainedPairs::All, k, t).unwrap()
    }

    #[test]
    fn k0_counts_two_cycle() {
        let g = CompatibilityGraph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        let enc = encode_k0(&problem(g, 1, 0)).unwrap();
        assert_eq!(enc.var_count(), 4);
        assert_eq!(enc.clause_count(), 2);
        assert_eq!(enc.varmap.aux_entries().count(), 0);
    }

    #[test]
    fn k0_counts_no_edges() {
        let enc = encode_k0(&problem(CompatibilityGraph::empty(2), 1, 0)).unwrap();
        assert_eq!(enc.var_count(), 4 + 2);
        assert_eq!(enc.clause_count(), 6);
    }

    #[test]
    fn k0_general_variable_count() {
        let g = CompatibilityGraph::from_edges(4, [(0, 1), (2, 3), (3, 0)]).unwrap();
        let enc = encode_k0(&problem(g, 3, 0)).unwrap();
        let non_edges = 12 - 3;
        assert_eq!(enc.var_count() as usize, 2 * 3 * 4 + 3 * non_edges);
        assert!(enc.cnf.is_well_formed());
    }

    #[test]
    fn k0_empty_constraint_set() {
        let p = RepresentationProblem::new(
            CompatibilityGraph::empty(3),
            ConstrainedPairs::only([]),
            2,
            0,
        )
        .unwrap();
        let enc = encode_k0(&p).unwrap();
        assert_eq!(enc.var_count(), 12);
        assert_eq!(enc.clause_count(), 0);
    }

    #[test]
    fn k0_rejects_positive_threshold() {
        let p = problem(CompatibilityGraph::empty(2), 2, 1);
        assert_eq!(encode_k0(&p), Err(Error::NonZeroThreshold(1)));
    }

    #[test]
    fn kt_rejects_threshold_at_width() {
        let g = CompatibilityGraph::empty(2);
        let p = RepresentationProblem {
            graph: g,
            constrained: ConstrainedPairs::All,
            k: 2,
            t: 2,
            pinned: Default::default(),
        };
        assert_eq!(encode_kt(&p), Err(Error::ThresholdTooLarge { k: 2, t: 2 }));
    }

    #[test]
    fn varmap_is_injective() {
        let g = CompatibilityGraph::from_edges(3, [(0, 1)]).unwrap();
        let enc = encode_kt_relaxed(&problem(g, 3, 1)).unwrap();
        let mut vars: Vec<i32> = enc.varmap.aux_entries().map(|(_, v)| v).collect();
        let before = vars.len();
        vars.sort_unstable();
        vars.dedup();
        assert_eq!(vars.len(), before);
        assert_eq!(enc.violation_vars().len(), 6);
        assert!(enc.cnf.is_well_formed());
    }
}

use alloc::format;
use alloc::vec::Vec;

use super::construct::constructive_representation;
use super::encode::{encode_k0, encode_kt, encode_kt_relaxed, CnfEncoding};
use super::RepresentationProblem;
use crate::error::{Error, Result};
use crate::graph::{
    verify_representation, AttributeRepresentation, CompatibilityGraph, ConstrainedPairs,
};
use crate::sat::{at_most, Budget, SolveStats, Status};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Sat(AttributeRepresentation),
    Unsat,
    Timeout,
}

impl SolveStatus {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveStatus::Sat(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            SolveStatus::Sat(_) => "SAT",
            SolveStatus::Unsat => "UNSAT",
            SolveStatus::Timeout => "TIMEOUT",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub stats: SolveStats,
}

/// The encoding `solve` uses: threshold 0 goes through the witness
/// encoding, anything else through conflict counters.
pub fn encode(problem: &RepresentationProblem) -> Result<CnfEncoding> {
    if problem.t == 0 {
        encode_k0(problem)
    } else {
        encode_kt(problem)
    }
}

fn checked(
    problem: &RepresentationProblem,
    rep: AttributeRepresentation,
) -> Result<AttributeRepresentation> {
    let report = verify_representation(&problem.graph, &rep, &problem.constrained)?;
    if report.ok {
        Ok(rep)
    } else {
        Err(Error::Internal(format!(
            "decoded model fails {} constrained pairs",
            report.mismatches.len()
        )))
    }
}

/// Complete search for a representation. A `Sat` answer always carries a
/// representation that has been verified on the constrained pairs.
pub fn solve(problem: &RepresentationProblem, budget: &Budget<'_>) -> Result<SolveOutcome> {
    let enc = encode(problem)?;
    let mut solver = enc.cnf.solver();
    let status = match solver.solve(budget) {
        Status::Sat => SolveStatus::Sat(checked(problem, enc.decode(solver.model()))?),
        Status::Unsat => SolveStatus::Unsat,
        Status::Unknown => SolveStatus::Timeout,
    };
    Ok(SolveOutcome {
        status,
        stats: solver.stats(),
    })
}

/// Decodes a model produced by an external solver for `encoding` and
/// verifies it against the problem.
pub fn decode_external_model(
    problem: &RepresentationProblem,
    encoding: &CnfEncoding,
    model: &[bool],
) -> Result<AttributeRepresentation> {
    if !encoding.cnf.satisfied_by(model) {
        return Err(Error::Internal(
            "model does not satisfy the encoding".into(),
        ));
    }
    checked(problem, encoding.decode(model))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub solutions: Vec<AttributeRepresentation>,
    /// The solver proved there are no further solutions.
    pub exhausted: bool,
    pub timed_out: bool,
    pub stats: SolveStats,
}

/// Distinct representations, found by blocking each model's donor and
/// patient bits and solving again.
pub fn enumerate_solutions(
    problem: &RepresentationProblem,
    limit: usize,
    budget: &Budget<'_>,
) -> Result<Enumeration> {
    let enc = encode(problem)?;
    let mut solver = enc.cnf.solver();
    let mut out = Enumeration {
        solutions: Vec::new(),
        exhausted: false,
        timed_out: false,
        stats: SolveStats::default(),
    };
    while out.solutions.len() < limit {
        let used = solver.stats().conflicts;
        if budget.exhausted(used) {
            out.timed_out = true;
            break;
        }
        match solver.solve(&budget.remaining(used)) {
            Status::Sat => {
                let rep = checked(problem, enc.decode(solver.model()))?;
                solver.add_dimacs_clause(&enc.varmap.blocking_clause(&rep));
                out.solutions.push(rep);
            }
            Status::Unsat => {
                out.exhausted = true;
                break;
            }
            Status::Unknown => {
                out.timed_out = true;
                break;
            }
        }
    }
    out.stats = solver.stats();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinK {
    pub k: usize,
    pub rep: AttributeRepresentation,
    /// Some width below `k` timed out and was counted as unrepresentable.
    pub conservative: bool,
    /// `(k, status label)` for every width actually solved, in search order.
    pub steps: Vec<(usize, &'static str)>,
    pub stats: SolveStats,
}

/// Smallest width admitting a `(k, t)`-representation of the whole graph.
///
/// Bisection over `[t + 1, n' + t]`: the upper end is always representable
/// (constructive representation, lifted by `t`) and representability is
/// monotone in `k` by zero-padding. A timed-out width is treated as
/// unrepresentable, which can only overstate the answer.
pub fn min_k(g: &CompatibilityGraph, t: usize, per_step: &Budget<'_>) -> Result<MinK> {
    let base = constructive_representation(g);
    let mut best = base.lift(t);
    let mut lo = t + 1;
    let mut hi = best.k();
    let mut conservative = false;
    let mut steps = Vec::new();
    let mut stats = SolveStats::default();
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let problem = RepresentationProblem::full(g.clone(), mid, t)?;
        let outcome = solve(&problem, per_step)?;
        stats.accumulate(&outcome.stats);
        steps.push((mid, outcome.status.label()));
        match outcome.status {
            SolveStatus::Sat(rep) => {
                hi = mid;
                best = rep;
            }
            SolveStatus::Unsat => lo = mid + 1,
            SolveStatus::Timeout => {
                conservative = true;
                lo = mid + 1;
            }
        }
    }
    Ok(MinK {
        k: hi,
        rep: best,
        conservative,
        steps,
        stats,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinViolations {
    pub rep: AttributeRepresentation,
    /// Constrained pairs `rep` reproduces wrongly.
    pub xi_count: usize,
    /// A bound step timed out; `xi_count` is an upper bound only.
    pub conservative: bool,
    pub stats: SolveStats,
}

fn mismatch_count(problem: &RepresentationProblem, rep: &AttributeRepresentation) -> Result<usize> {
    Ok(
        verify_representation(&problem.graph, rep, &problem.constrained)?
            .mismatches
            .len(),
    )
}

/// Fewest constrained pairs a width-`k` representation must get wrong.
///
/// Starts from the all-zero incumbent and bisects on a cardinality bound
/// over the violation selectors, lower half first. Every step is a complete
/// SAT call.
pub fn min_violations(
    problem: &RepresentationProblem,
    budget: &Budget<'_>,
) -> Result<MinViolations> {
    let base = encode_kt_relaxed(problem)?;
    let xis = base.violation_vars();
    let n = problem.graph.n();
    let zero = AttributeRepresentation::new(
        problem.k,
        problem.t,
        (0..n)
            .map(|_| crate::bits::BitVector::zeros(problem.k))
            .collect(),
        (0..n)
            .map(|_| crate::bits::BitVector::zeros(problem.k))
            .collect(),
    )?;
    let mut best_count = mismatch_count(problem, &zero)?;
    let mut best = zero;
    let mut lo = 0;
    let mut conservative = false;
    let mut stats = SolveStats::default();
    while lo < best_count {
        let bound = lo + (best_count - 1 - lo) / 2;
        let mut cnf = base.cnf.clone();
        at_most(&mut cnf, &xis, bound, None);
        let mut solver = cnf.solver();
        let status = solver.solve(&budget.remaining(stats.conflicts));
        stats.accumulate(&solver.stats());
        match status {
            Status::Sat => {
                let rep = base.decode(solver.model());
                let count = mismatch_count(problem, &rep)?;
                if count > bound {
                    return Err(Error::Internal(format!(
                        "model with {count} mismatches satisfies violation bound {bound}"
                    )));
                }
                best = rep;
                best_count = count;
            }
            Status::Unsat => lo = bound + 1,
            Status::Unknown => {
                conservative = true;
                break;
            }
        }
    }
    Ok(MinViolations {
        rep: best,
        xi_count: best_count,
        conservative,
        stats,
    })
}

/// Same as [`min_violations`] with every ordered pair constrained.
pub fn min_violations_full(
    g: &CompatibilityGraph,
    k: usize,
    t: usize,
    budget: &Budget<'_>,
) -> Result<MinViolations> {
    min_violations(
        &RepresentationProblem::new(g.clone(), ConstrainedPairs::All, k, t)?,
        budget,
    )
}

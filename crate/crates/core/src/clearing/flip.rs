use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::clear::{clear_by_types, Clearing};
use super::walks::TypeWalkSet;
use crate::error::{Error, Result};
use crate::types::TypeSpace;

/// Absolute tolerance for comparing net values.
pub const COST_TOLERANCE: f64 = 1e-9;

/// Cost of changing one vertex from type `a` to type `b`. An infinite
/// cost forbids the switch.
#[derive(Clone, Debug, PartialEq)]
pub struct FlipCostMatrix {
    m: usize,
    costs: Vec<f64>,
}

impl FlipCostMatrix {
    pub fn new(costs: Vec<Vec<f64>>) -> Result<Self> {
        let m = costs.len();
        if costs.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidTypeSpace(format!(
                "flip costs must be {m}x{m}"
            )));
        }
        let out = Self {
            m,
            costs: costs.into_iter().flatten().collect(),
        };
        for a in 0..m {
            for b in 0..m {
                let c = out.cost(a, b);
                if c.is_nan() || c < 0.0 || (a == b && c != 0.0) {
                    return Err(Error::InvalidTypeSpace(format!(
                        "invalid flip cost {c} for {a} -> {b}"
                    )));
                }
            }
        }
        Ok(out)
    }

    /// Every switch forbidden.
    pub fn forbidden(m: usize) -> Self {
        let mut costs = vec![f64::INFINITY; m * m];
        for a in 0..m {
            costs[a * m + a] = 0.0;
        }
        Self { m, costs }
    }

    /// Every switch costs `c`.
    pub fn uniform(m: usize, c: f64) -> Result<Self> {
        Self::new(
            (0..m)
                .map(|a| (0..m).map(|b| if a == b { 0.0 } else { c }).collect())
                .collect(),
        )
    }

    pub fn types(&self) -> usize {
        self.m
    }

    pub fn cost(&self, a: usize, b: usize) -> f64 {
        self.costs[a * self.m + b]
    }

    pub fn set(&mut self, a: usize, b: usize, c: f64) -> Result<()> {
        if a >= self.m || b >= self.m {
            return Err(Error::InvalidTypeSpace(format!(
                "type pair ({a}, {b}) out of range"
            )));
        }
        if c.is_nan() || c < 0.0 || (a == b && c != 0.0) {
            return Err(Error::InvalidTypeSpace(format!(
                "invalid flip cost {c} for {a} -> {b}"
            )));
        }
        self.costs[a * self.m + b] = c;
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FlipPlan {
    /// `(from, to, count)` with positive counts, sorted.
    pub switches: Vec<(usize, usize, usize)>,
    pub cost: f64,
    pub matched: usize,
    pub net_value: f64,
}

impl FlipPlan {
    /// Type counts after the switches.
    pub fn apply_to_counts(&self, counts: &[usize]) -> Result<Vec<usize>> {
        let mut out = counts.to_vec();
        for &(a, b, s) in &self.switches {
            if a >= out.len() || b >= out.len() || out[a] < s {
                return Err(Error::InvalidTypeSpace(format!(
                    "cannot switch {s} vertices from {a} to {b}"
                )));
            }
            out[a] -= s;
        }
        for &(_, b, s) in &self.switches {
            out[b] += s;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlipOutcome {
    pub plan: FlipPlan,
    /// Type counts after switching.
    pub counts: Vec<usize>,
    /// Optimal clearing of the switched profile over the same walks.
    pub clearing: Clearing,
}

/// Chooses switch counts and a clearing maximising matched vertices minus
/// switching cost. Exhaustive over switch-count vectors with
/// branch-and-bound; clearings are memoised per count profile. Among equal
/// net values (within [`COST_TOLERANCE`]) the first plan in enumeration
/// order wins, starting with the empty plan.
pub fn flip_and_clear(
    ts: &TypeSpace,
    walks: &TypeWalkSet,
    cost: &FlipCostMatrix,
) -> Result<FlipOutcome> {
    let m = ts.len();
    if cost.types() != m {
        return Err(Error::InvalidTypeSpace(format!(
            "flip costs cover {} types, type space has {m}",
            cost.types()
        )));
    }
    let pairs: Vec<(usize, usize, f64)> = (0..m)
        .flat_map(|a| (0..m).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && ts.count(a) > 0)
        .map(|(a, b)| (a, b, cost.cost(a, b)))
        .filter(|&(_, _, c)| c.is_finite())
        .collect();
    let mut search = FlipSearch {
        ts,
        walks,
        pairs,
        n: ts.n(),
        memo: BTreeMap::new(),
        remaining: ts.counts().to_vec(),
        counts: ts.counts().to_vec(),
        current: Vec::new(),
        best: None,
    };
    search.evaluate(0.0)?;
    search.run(0, 0.0)?;
    let (plan, counts) = search.best.expect("empty plan evaluated");
    let clearing = search.memo.remove(&counts).expect("memoised");
    Ok(FlipOutcome {
        plan,
        counts,
        clearing,
    })
}

struct FlipSearch<'a> {
    ts: &'a TypeSpace,
    walks: &'a TypeWalkSet,
    pairs: Vec<(usize, usize, f64)>,
    n: usize,
    memo: BTreeMap<Vec<usize>, Clearing>,
    /// Unswitched vertices left per original type.
    remaining: Vec<usize>,
    counts: Vec<usize>,
    current: Vec<(usize, usize, usize)>,
    best: Option<(FlipPlan, Vec<usize>)>,
}

impl FlipSearch<'_> {
    fn best_net(&self) -> f64 {
        self.best
            .as_ref()
            .map_or(f64::NEG_INFINITY, |(p, _)| p.net_value)
    }

    fn evaluate(&mut self, cost: f64) -> Result<()> {
        let matched = match self.memo.get(&self.counts) {
            Some(c) => c.matched,
            None => {
                let space = self.ts.with_counts(self.counts.clone())?;
                let c = clear_by_types(&space, self.walks)?;
                let matched = c.matched;
                self.memo.insert(self.counts.clone(), c);
                matched
            }
        };
        let net = matched as f64 - cost;
        if net > self.best_net() + COST_TOLERANCE {
            let plan = FlipPlan {
                switches: self.current.clone(),
                cost,
                matched,
                net_value: net,
            };
            self.best = Some((plan, self.counts.clone()));
        }
        Ok(())
    }

    fn run(&mut self, idx: usize, cost: f64) -> Result<()> {
        if idx == self.pairs.len() {
            // the all-zero plan was evaluated up front
            if !self.current.is_empty() {
                self.evaluate(cost)?;
            }
            return Ok(());
        }
        let (a, b, c) = self.pairs[idx];
        self.run(idx + 1, cost)?;
        for s in 1..=self.remaining[a] {
            let total = cost + s as f64 * c;
            if self.n as f64 - total <= self.best_net() + COST_TOLERANCE {
                break;
            }
            self.remaining[a] -= s;
            self.counts[a] -= s;
            self.counts[b] += s;
            self.current.push((a, b, s));
            self.run(idx + 1, total)?;
            self.current.pop();
            self.counts[b] -= s;
            self.counts[a] += s;
            self.remaining[a] += s;
        }
        Ok(())
    }
}

/// Reassigns concrete vertices according to `plan`: for each switch the
/// lowest-indexed vertices of the source type that have not already been
/// switched change type.
pub fn apply_flip_plan(ts: &TypeSpace, plan: &FlipPlan) -> Result<TypeSpace> {
    let members = ts.members();
    let mut taken = vec![0usize; ts.len()];
    let mut vertex_type = ts.vertex_types().to_vec();
    for &(a, b, s) in &plan.switches {
        if a >= ts.len() || b >= ts.len() || taken[a] + s > members[a].len() {
            return Err(Error::InvalidTypeSpace(format!(
                "cannot switch {s} vertices from {a} to {b}"
            )));
        }
        for &v in &members[a][taken[a]..taken[a] + s] {
            vertex_type[v] = b;
        }
        taken[a] += s;
    }
    ts.with_vertex_types(vertex_type)
}

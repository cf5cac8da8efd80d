//! Clearing in type space: maximum vertex-disjoint packings of short
//! cycles, computed over type walks instead of individual vertices.
//!
//! Chains started by altruists are handled by [`model_altruists`], which
//! gives every altruist a dummy incoming edge from every pair so that a
//! chain closes into a cycle through its altruist. A cycle may contain at
//! most one altruist.

mod altruists;
mod clear;
mod flip;
mod realize;
mod walks;

pub use altruists::model_altruists;
pub use clear::{clear_by_types, clear_by_types_weighted, Clearing, MultiplicityVector};
pub use flip::{
    apply_flip_plan, flip_and_clear, FlipCostMatrix, FlipOutcome, FlipPlan, COST_TOLERANCE,
};
pub use realize::realize_cover;
pub use walks::{enumerate_type_walks, TypeWalk, TypeWalkSet};

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::CompatibilityGraph;

/// Length caps for packed cycles. Cycles through an altruist (chains) use
/// `chain` when set and `cycle` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub cycle: usize,
    pub chain: Option<usize>,
}

impl Caps {
    pub fn new(cycle: usize) -> Result<Self> {
        if cycle < 2 {
            return Err(Error::CycleCapTooSmall(cycle));
        }
        Ok(Self { cycle, chain: None })
    }

    pub fn with_chain_cap(cycle: usize, chain: usize) -> Result<Self> {
        if chain < 2 {
            return Err(Error::CycleCapTooSmall(chain));
        }
        Ok(Self {
            chain: Some(chain),
            ..Self::new(cycle)?
        })
    }

    /// Longest cycle of either kind.
    pub fn max_len(&self) -> usize {
        self.cycle.max(self.chain.unwrap_or(0))
    }

    /// Whether a cycle of `len` vertices with `altruists` altruists may be
    /// packed.
    pub fn admits(&self, len: usize, altruists: usize) -> bool {
        match altruists {
            0 => (2..=self.cycle).contains(&len),
            1 => (2..=self.chain.unwrap_or(self.cycle)).contains(&len),
            _ => false,
        }
    }
}

/// Vertex-disjoint directed cycles of a graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CycleCover {
    pub cycles: Vec<Vec<usize>>,
    /// Total matched vertices.
    pub value: usize,
}

impl CycleCover {
    pub fn new(cycles: Vec<Vec<usize>>) -> Self {
        let value = cycles.iter().map(Vec::len).sum();
        Self { cycles, value }
    }

    /// Matched vertices that are not altruists.
    pub fn matched_pairs(&self, g: &CompatibilityGraph) -> usize {
        self.cycles
            .iter()
            .flatten()
            .filter(|&&v| !g.is_altruist(v))
            .count()
    }

    /// Checks disjointness, edge existence (including the closing edge),
    /// length caps, the one-altruist rule and the stored value.
    pub fn validate(&self, g: &CompatibilityGraph, caps: &Caps) -> Result<()> {
        let mut used = BTreeSet::new();
        for cycle in &self.cycles {
            let altruists = cycle
                .iter()
                .filter(|&&v| v < g.n() && g.is_altruist(v))
                .count();
            if !caps.admits(cycle.len(), altruists) {
                return Err(Error::Internal(format!(
                    "cycle {cycle:?} violates the length caps or has {altruists} altruists"
                )));
            }
            for (pos, &v) in cycle.iter().enumerate() {
                if v >= g.n() {
                    return Err(Error::VertexOutOfRange { index: v, n: g.n() });
                }
                if !used.insert(v) {
                    return Err(Error::Internal(format!("vertex {v} used twice")));
                }
                let w = cycle[(pos + 1) % cycle.len()];
                if w >= g.n() || !g.has_edge(v, w) {
                    return Err(Error::Internal(format!(
                        "cycle {cycle:?} uses missing edge ({v}, {w})"
                    )));
                }
            }
        }
        if self.value != used.len() {
            return Err(Error::Internal(format!(
                "cover value {} but {} vertices matched",
                self.value,
                used.len()
            )));
        }
        Ok(())
    }
}

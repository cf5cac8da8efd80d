//! Deciding and constructing `(k, t)`-representations.
//!
//! A representation problem asks for width-`k` donor and patient vectors
//! that reproduce the graph's adjacency on a set of constrained ordered
//! pairs under threshold `t`. The problem is encoded to CNF
//! ([`encode_k0`] for `t = 0`, [`encode_kt`] otherwise) and handed to the
//! built-in CDCL solver.

mod construct;
mod encode;
mod search;

pub use construct::{constructive_representation, constructive_width, lift_representation};
pub use encode::{encode_k0, encode_kt, encode_kt_relaxed, AuxRole, CnfEncoding, VarMap};
pub use search::{
    decode_external_model, encode, enumerate_solutions, min_k, min_violations, min_violations_full,
    solve, Enumeration, MinK, MinViolations, SolveOutcome, SolveStatus,
};

use alloc::collections::BTreeMap;

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::graph::{CompatibilityGraph, ConstrainedPairs};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentationProblem {
    pub graph: CompatibilityGraph,
    /// Pairs whose adjacency must be reproduced; all others are ignored.
    pub constrained: ConstrainedPairs,
    pub k: usize,
    pub t: usize,
    /// Vertices whose `(donor, patient)` vectors are fixed in advance.
    pub pinned: BTreeMap<usize, (BitVector, BitVector)>,
}

impl RepresentationProblem {
    /// Validates `k >= 1`, `t < k` and the constrained pairs.
    pub fn new(
        graph: CompatibilityGraph,
        constrained: ConstrainedPairs,
        k: usize,
        t: usize,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroWidth);
        }
        if t >= k {
            return Err(Error::ThresholdTooLarge { k, t });
        }
        constrained.check(graph.n())?;
        Ok(Self {
            graph,
            constrained,
            k,
            t,
            pinned: BTreeMap::new(),
        })
    }

    /// Every ordered pair constrained.
    pub fn full(graph: CompatibilityGraph, k: usize, t: usize) -> Result<Self> {
        Self::new(graph, ConstrainedPairs::All, k, t)
    }

    /// Same problem at another width. Pins are dropped.
    pub fn with_width(&self, k: usize) -> Result<Self> {
        Self::new(self.graph.clone(), self.constrained.clone(), k, self.t)
    }

    /// Fixes vertex `v`'s vectors.
    pub fn pin(&mut self, v: usize, donor: BitVector, patient: BitVector) -> Result<()> {
        if v >= self.graph.n() {
            return Err(Error::VertexOutOfRange {
                index: v,
                n: self.graph.n(),
            });
        }
        for w in [donor.width(), patient.width()] {
            if w != self.k {
                return Err(Error::WidthMismatch {
                    left: self.k,
                    right: w,
                });
            }
        }
        self.pinned.insert(v, (donor, patient));
        Ok(())
    }
}

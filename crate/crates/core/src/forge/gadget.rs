use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::graph::{AttributeRepresentation, CompatibilityGraph, ConstrainedPairs};

/// Position of the 2-subset `{a, b}` of `0..k` in lexicographic order.
pub fn pair_index(k: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    debug_assert!(b < k && a != b);
    a * (2 * k - a - 1) / 2 + (b - a - 1)
}

/// The bit-fixing gadget on `C(k, 2) + k` vertices.
///
/// Vertices `0..C(k, 2)` form the first part. Vertex `u` is labelled with
/// the `u`-th 2-subset of `0..k` in lexicographic order and has edges to
/// every vertex of the first part except itself and `u - 1` (cyclically).
/// The remaining `k` vertices form the second part: vertex `i` receives an
/// edge from `u` exactly when `i` is in `u`'s label, and has no outgoing
/// edges. Every ordered pair is constrained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    pub k: usize,
    pub labels: Vec<(usize, usize)>,
    pub graph: CompatibilityGraph,
    pub constrained: ConstrainedPairs,
}

pub fn gen_gadget(k: usize) -> Result<Gadget> {
    if k < 3 {
        return Err(Error::SizeGuard(format!("gadget needs k >= 3, got {k}")));
    }
    let labels: Vec<(usize, usize)> = (0..k)
        .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
        .collect();
    let n1 = labels.len();
    let mut graph = CompatibilityGraph::empty(n1 + k);
    for u in 0..n1 {
        let prev = (u + n1 - 1) % n1;
        for w in 0..n1 {
            if w != u && w != prev {
                graph.add_edge(u, w)?;
            }
        }
        let (a, b) = labels[u];
        graph.add_edge(u, n1 + a)?;
        graph.add_edge(u, n1 + b)?;
    }
    Ok(Gadget {
        k,
        labels,
        graph,
        constrained: ConstrainedPairs::All,
    })
}

impl Gadget {
    /// Size of the first part, `C(k, 2)`.
    pub fn n1(&self) -> usize {
        self.labels.len()
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// First-part vertex labelled `{a, b}`.
    pub fn vertex_for_pair(&self, a: usize, b: usize) -> usize {
        pair_index(self.k, a, b)
    }

    pub fn second_part(&self, i: usize) -> usize {
        self.n1() + i
    }

    /// The ordered pairs among `offset..offset + n` for a copy of the
    /// gadget placed at `offset`.
    pub fn pairs_at(&self, offset: usize) -> BTreeSet<(usize, usize)> {
        let n = self.n();
        (0..n)
            .flat_map(|i| {
                (0..n)
                    .filter(move |&j| j != i)
                    .map(move |j| (offset + i, offset + j))
            })
            .collect()
    }

    /// The labelled representation at threshold 1: donor `u` is its label,
    /// patient `u` is the label of `u + 1`; the second part has all-ones
    /// donors and patients missing only their own bit.
    pub fn canonical_representation(&self) -> AttributeRepresentation {
        let (k, n1) = (self.k, self.n1());
        let label = |u: usize| {
            let (a, b) = self.labels[u];
            BitVector::from_ones(k, &[a, b])
        };
        let mut donor: Vec<BitVector> = (0..n1).map(label).collect();
        let mut patient: Vec<BitVector> = (0..n1).map(|u| label((u + 1) % n1)).collect();
        for i in 0..k {
            donor.push(BitVector::ones(k));
            let mut p = BitVector::ones(k);
            p.set(i, false);
            patient.push(p);
        }
        AttributeRepresentation::new(k, 1, donor, patient).expect("consistent widths")
    }
}

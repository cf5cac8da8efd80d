//! Compatibility graphs, attribute representations and the threshold
//! feasibility test that links them.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::bits::BitVector;
use crate::error::{Error, Result};

/// Directed compatibility graph. Edge `(i, j)` means donor `i` can give to
/// patient `j`. Self-loops are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityGraph {
    n: usize,
    out: Vec<BitVector>,
    inc: Vec<BitVector>,
    altruist: Vec<bool>,
}

impl CompatibilityGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            out: (0..n).map(|_| BitVector::zeros(n)).collect(),
            inc: (0..n).map(|_| BitVector::zeros(n)).collect(),
            altruist: alloc::vec![false; n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    g.insert_edge(i, j);
                }
            }
        }
        g
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        self.insert_edge(i, j);
        Ok(())
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) {
        if i < self.n && j < self.n {
            self.out[i].set(j, false);
            self.inc[j].set(i, false);
        }
    }

    fn insert_edge(&mut self, i: usize, j: usize) {
        self.out[i].set(j, true);
        self.inc[j].set(i, true);
    }

    fn check_vertex(&self, i: usize) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                index: i,
                n: self.n,
            })
        }
    }

    pub fn set_altruist(&mut self, i: usize, flag: bool) -> Result<()> {
        self.check_vertex(i)?;
        self.altruist[i] = flag;
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.out[i].get(j)
    }

    #[inline]
    pub fn is_altruist(&self, i: usize) -> bool {
        self.altruist[i]
    }

    pub fn altruists(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.altruist[i]).collect()
    }

    pub fn altruist_count(&self) -> usize {
        self.altruist.iter().filter(|&&a| a).count()
    }

    /// Out-neighbourhood of `i` as a bit row.
    pub fn out_row(&self, i: usize) -> &BitVector {
        &self.out[i]
    }

    /// In-neighbourhood of `j` as a bit column.
    pub fn in_row(&self, j: usize) -> &BitVector {
        &self.inc[j]
    }

    pub fn out_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[i].iter_ones()
    }

    pub fn in_neighbors(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.inc[j].iter_ones()
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out[i].count_ones()
    }

    pub fn in_degree(&self, j: usize) -> usize {
        self.inc[j].count_ones()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.out[i].iter_ones().map(move |j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(BitVector::count_ones).sum()
    }

    /// Relabels vertices: old vertex `v` becomes `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut g = Self::empty(self.n);
        for (i, j) in self.edges() {
            g.insert_edge(perm[i], perm[j]);
        }
        for v in 0..self.n {
            g.altruist[perm[v]] = self.altruist[v];
        }
        g
    }
}

/// Per-vertex donor and patient bit vectors of a common width `k`, read
/// under threshold `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AttributeRepresentation {
    k: usize,
    t: usize,
    donor: Vec<BitVector>,
    patient: Vec<BitVector>,
}

impl AttributeRepresentation {
    pub fn new(k: usize, t: usize, donor: Vec<BitVector>, patient: Vec<BitVector>) -> Result<Self> {
        if donor.len() != patient.len() {
            return Err(Error::VertexCountMismatch {
                expected: donor.len(),
                found: patient.len(),
            });
        }
        for v in donor.iter().chain(&patient) {
            if v.width() != k {
                return Err(Error::WidthMismatch {
                    left: k,
                    right: v.width(),
                });
            }
        }
        Ok(Self {
            k,
            t,
            donor,
            patient,
        })
    }

    /// Every vertex gets the same donor and patient vector.
    pub fn uniform(n: usize, t: usize, donor: BitVector, patient: BitVector) -> Result<Self> {
        let k = donor.width();
        Self::new(k, t, alloc::vec![donor; n], alloc::vec![patient; n])
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn t(&self) -> usize {
        self.t
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.donor.len()
    }

    pub fn donor(&self, i: usize) -> &BitVector {
        &self.donor[i]
    }

    pub fn patient(&self, i: usize) -> &BitVector {
        &self.patient[i]
    }

    pub fn donors(&self) -> &[BitVector] {
        &self.donor
    }

    pub fn patients(&self) -> &[BitVector] {
        &self.patient
    }

    /// `Q_d(i)`: positions of the donor's set bits.
    pub fn donor_set(&self, i: usize) -> Vec<usize> {
        self.donor[i].iter_ones().collect()
    }

    /// `Q_p(i)`: positions of the patient's set bits.
    pub fn patient_set(&self, i: usize) -> Vec<usize> {
        self.patient[i].iter_ones().collect()
    }

    #[inline]
    pub fn inner_product(&self, i: usize, j: usize) -> usize {
        self.donor[i].dot(&self.patient[j])
    }

    #[inline]
    pub fn feasible(&self, i: usize, j: usize) -> bool {
        self.inner_product(i, j) <= self.t
    }

    /// Same vectors, read under a different threshold.
    pub fn with_threshold(&self, t: usize) -> Self {
        Self { t, ..self.clone() }
    }

    /// Appends `t` ones to every vector and raises the threshold by `t`.
    /// A verified threshold-0 representation stays verified after lifting,
    /// since every pair gains exactly `t` shared bits.
    pub fn lift(&self, t: usize) -> Self {
        Self {
            k: self.k + t,
            t: self.t + t,
            donor: self.donor.iter().map(|d| d.extended(t, true)).collect(),
            patient: self.patient.iter().map(|p| p.extended(t, true)).collect(),
        }
    }

    /// Appends `extra` zero bits to every vector; inner products are
    /// unchanged.
    pub fn zero_padded(&self, extra: usize) -> Self {
        Self {
            k: self.k + extra,
            t: self.t,
            donor: self
                .donor
                .iter()
                .map(|d| d.extended(extra, false))
                .collect(),
            patient: self
                .patient
                .iter()
                .map(|p| p.extended(extra, false))
                .collect(),
        }
    }

    /// Applies the same coordinate permutation to every vector.
    pub fn permuted_columns(&self, perm: &[usize]) -> Self {
        Self {
            k: self.k,
            t: self.t,
            donor: self.donor.iter().map(|d| d.permuted(perm)).collect(),
            patient: self.patient.iter().map(|p| p.permuted(perm)).collect(),
        }
    }
}

/// `f^t(d, p)`: true iff the donor and patient vectors share at most `t`
/// set bits.
pub fn threshold_feasible(d: &BitVector, p: &BitVector, t: usize) -> Result<bool> {
    if d.width() != p.width() {
        return Err(Error::WidthMismatch {
            left: d.width(),
            right: p.width(),
        });
    }
    Ok(d.dot(p) <= t)
}

/// Graph with edge `(i, j)` for every `i != j` whose vectors are feasible.
/// No altruists are flagged.
pub fn build_graph_from_attributes(rep: &AttributeRepresentation) -> CompatibilityGraph {
    let n = rep.n();
    let mut g = CompatibilityGraph::empty(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && rep.feasible(i, j) {
                g.insert_edge(i, j);
            }
        }
    }
    g
}

/// Ordered vertex pairs whose adjacency a representation must reproduce.
/// Pairs outside the set are ignored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum ConstrainedPairs {
    /// Every ordered pair `(i, j)` with `i != j`.
    #[default]
    All,
    Only(BTreeSet<(usize, usize)>),
}

impl ConstrainedPairs {
    pub fn only<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Self {
        ConstrainedPairs::Only(pairs.into_iter().filter(|&(i, j)| i != j).collect())
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        match self {
            ConstrainedPairs::All => i != j,
            ConstrainedPairs::Only(set) => set.contains(&(i, j)),
        }
    }

    /// The constrained pairs on `n` vertices, in lexicographic order.
    pub fn pairs(&self, n: usize) -> Vec<(usize, usize)> {
        match self {
            ConstrainedPairs::All => (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .collect(),
            ConstrainedPairs::Only(set) => set.iter().copied().collect(),
        }
    }

    pub fn len(&self, n: usize) -> usize {
        match self {
            ConstrainedPairs::All => n * n.saturating_sub(1),
            ConstrainedPairs::Only(set) => set.len(),
        }
    }

    pub fn is_empty(&self, n: usize) -> bool {
        self.len(n) == 0
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if let ConstrainedPairs::Only(set) = self {
            for &(i, j) in set {
                for v in [i, j] {
                    if v >= n {
                        return Err(Error::VertexOutOfRange { index: v, n });
                    }
                }
                if i == j {
                    return Err(Error::SelfLoop(i));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub pair: (usize, usize),
    /// Adjacency in the graph.
    pub expected_edge: bool,
    pub inner_product: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub ok: bool,
    pub mismatches: Vec<Mismatch>,
}

impl VerificationReport {
    fn from_mismatches(mismatches: Vec<Mismatch>) -> Self {
        Self {
            ok: mismatches.is_empty(),
            mismatches,
        }
    }
}

/// Checks that, on every constrained pair, the graph has an edge exactly
/// when the inner product is within the threshold.
pub fn verify_representation(
    g: &CompatibilityGraph,
    rep: &AttributeRepresentation,
    constrained: &ConstrainedPairs,
) -> Result<VerificationReport> {
    if rep.n() != g.n() {
        return Err(Error::VertexCountMismatch {
            expected: g.n(),
            found: rep.n(),
        });
    }
    constrained.check(g.n())?;
    let mut mismatches = Vec::new();
    for (i, j) in constrained.pairs(g.n()) {
        let ip = rep.inner_product(i, j);
        let edge = g.has_edge(i, j);
        if edge != (ip <= rep.t()) {
            mismatches.push(Mismatch {
                pair: (i, j),
                expected_edge: edge,
                inner_product: ip,
            });
        }
    }
    Ok(VerificationReport::from_mismatches(mismatches))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        BitVector::from_bits(&s.bytes().map(|b| b == b'1').collect::<Vec<_>>())
    }

    #[test]
    fn threshold_examples() {
        assert!(threshold_feasible(&bv("11"), &bv("00"), 0).unwrap());
        assert!(threshold_feasible(&bv("00"), &bv("11"), 0).unwrap());
        assert!(!threshold_feasible(&bv("11"), &bv("10"), 0).unwrap());
        assert!(threshold_feasible(&bv("111"), &bv("111"), 3).unwrap());
        assert_eq!(
            threshold_feasible(&bv("1"), &bv("11"), 0),
            Err(Error::WidthMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn uniform_vectors_give_complete_or_empty_graphs() {
        let rep = AttributeRepresentation::uniform(5, 0, bv("0"), bv("0")).unwrap();
        assert_eq!(
            build_graph_from_attributes(&rep),
            CompatibilityGraph::complete(5)
        );
        let rep = AttributeRepresentation::uniform(5, 0, bv("1"), bv("1")).unwrap();
        assert_eq!(build_graph_from_attributes(&rep).edge_count(), 0);
    }

    #[test]
    fn empty_graph_with_all_ones_verifies() {
        let g = CompatibilityGraph::empty(4);
        let rep = AttributeRepresentation::uniform(4, 0, bv("1"), bv("1")).unwrap();
        assert!(
            verify_representation(&g, &rep, &ConstrainedPairs::All)
                .unwrap()
                .ok
        );
    }

    #[test]
    fn directed_triangle_has_no_width_one_representation() {
        let g = CompatibilityGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        for mask in 0u32..64 {
            let bit = |s: u32| BitVector::from_bits(&[mask >> s & 1 == 1]);
            let rep = AttributeRepresentation::new(
                1,
                0,
                vec![bit(0), bit(1), bit(2)],
                vec![bit(3), bit(4), bit(5)],
            )
            .unwrap();
            let report = verify_representation(&g, &rep, &ConstrainedPairs::All).unwrap();
            assert!(!report.ok);
            assert_eq!(report.ok, report.mismatches.is_empty());
        }
    }

    #[test]
    fn ignored_pairs_are_not_checked() {
        let g = CompatibilityGraph::from_edges(2, [(0, 1)]).unwrap();
        let rep = AttributeRepresentation::uniform(2, 0, bv("0"), bv("0")).unwrap();
        let full = verify_representation(&g, &rep, &ConstrainedPairs::All).unwrap();
        assert_eq!(full.mismatches.len(), 1);
        assert_eq!(full.mismatches[0].pair, (1, 0));
        let partial = verify_representation(&g, &rep, &ConstrainedPairs::only([(0, 1)])).unwrap();
        assert!(partial.ok);
    }

    #[test]
    fn self_loops_rejected() {
        assert_eq!(
            CompatibilityGraph::from_edges(2, [(1, 1)]),
            Err(Error::SelfLoop(1))
        );
        assert!(matches!(
            CompatibilityGraph::from_edges(2, [(0, 2)]),
            Err(Error::VertexOutOfRange { index: 2, n: 2 })
        ));
    }

    fn arb_rep() -> impl Strategy<Value = AttributeRepresentation> {
        (1usize..8, 1usize..5).prop_flat_map(|(n, k)| {
            (
                proptest::collection::vec(proptest::collection::vec(any::<bool>(), k), 2 * n),
                0..=k,
            )
                .prop_map(move |(rows, t)| {
                    let donor = rows[..n].iter().map(|r| BitVector::from_bits(r)).collect();
                    let patient = rows[n..].iter().map(|r| BitVector::from_bits(r)).collect();
                    AttributeRepresentation::new(k, t, donor, patient).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn built_graph_round_trips(rep in arb_rep()) {
            let g = build_graph_from_attributes(&rep);
            prop_assert!(verify_representation(&g, &rep, &ConstrainedPairs::All).unwrap().ok);
        }

        #[test]
        fn edges_grow_with_threshold(rep in arb_rep()) {
            let low = build_graph_from_attributes(&rep);
            let high = build_graph_from_attributes(&rep.with_threshold(rep.t() + 1));
            for (i, j) in low.edges() {
                prop_assert!(high.has_edge(i, j));
            }
        }

        #[test]
        fn zero_padding_preserves_graph(rep in arb_rep(), extra in 0usize..4) {
            prop_assert_eq!(
                build_graph_from_attributes(&rep),
                build_graph_from_attributes(&rep.zero_padded(extra))
            );
        }
    }
}

use alloc::vec::Vec;

use crate::bits::BitVector;
use crate::graph::{AttributeRepresentation, CompatibilityGraph};

/// `n' = min(n1 + 1, n2 + 1, n)` where `n1` (`n2`) counts vertices with
/// outgoing (incoming) edges, floored at 1.
pub fn constructive_width(g: &CompatibilityGraph) -> usize {
    let (n1, n2) = degree_counts(g);
    (n1 + 1).min(n2 + 1).min(g.n()).max(1)
}

fn degree_counts(g: &CompatibilityGraph) -> (usize, usize) {
    let n1 = (0..g.n()).filter(|&i| g.out_degree(i) > 0).count();
    let n2 = (0..g.n()).filter(|&j| g.in_degree(j) > 0).count();
    (n1, n2)
}

/// Threshold-0 representation of width [`constructive_width`].
///
/// Donor scheme: each vertex with outgoing edges gets its own unit donor
/// vector, all other vertices share one extra unit vector, and patient `j`
/// has bit `i` clear exactly when `(i, j)` is an edge. The patient scheme is
/// the mirror image and is used when it is strictly narrower.
pub fn constructive_representation(g: &CompatibilityGraph) -> AttributeRepresentation {
    let n = g.n();
    let (n1, n2) = degree_counts(g);
    let donor_width = (n1 + 1).min(n).max(1);
    let patient_width = (n2 + 1).min(n).max(1);
    if donor_width <= patient_width {
        let (donor, patient) = unit_scheme(
            n,
            donor_width,
            |i| g.out_degree(i) > 0,
            |i, j| g.has_edge(i, j),
        );
        AttributeRepresentation::new(donor_width, 0, donor, patient).expect("consistent widths")
    } else {
        let (patient, donor) = unit_scheme(
            n,
            patient_width,
            |j| g.in_degree(j) > 0,
            |j, i| g.has_edge(i, j),
        );
        AttributeRepresentation::new(patient_width, 0, donor, patient).expect("consistent widths")
    }
}

/// Builds `(unit side, complementary side)`. Vertices passing `active` get
/// consecutive unit vectors; the rest share the last coordinate, which every
/// complementary vector sets.
fn unit_scheme(
    n: usize,
    width: usize,
    active: impl Fn(usize) -> bool,
    adjacent: impl Fn(usize, usize) -> bool,
) -> (Vec<BitVector>, Vec<BitVector>) {
    let mut slot = Vec::with_capacity(n);
    let mut next = 0;
    for v in 0..n {
        if active(v) && next < width {
            slot.push(Some(next));
            next += 1;
        } else {
            slot.push(None);
        }
    }
    // when every vertex is active and width == n, nobody shares
    let shared = width - 1;
    let units = slot
        .iter()
        .map(|s| BitVector::unit(width, s.unwrap_or(shared)))
        .collect();
    let others = (0..n)
        .map(|w| {
            let mut bits = BitVector::zeros(width);
            for (v, s) in slot.iter().enumerate() {
                let q = s.unwrap_or(shared);
                if v != w && !adjacent(v, w) {
                    bits.set(q, true);
                }
            }
            if slot.iter().any(Option::is_none) {
                bits.set(shared, true);
            }
            bits
        })
        .collect();
    (units, others)
}

/// Appends `t` ones to every vector of a threshold-0 representation,
/// yielding a `(k + t, t)`-representation of the same graph.
pub fn lift_representation(rep: &AttributeRepresentation, t: usize) -> AttributeRepresentation {
    rep.lift(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{verify_representation, ConstrainedPairs};

    fn check(g: &CompatibilityGraph) -> AttributeRepresentation {
        let rep = constructive_representation(g);
        assert_eq!(rep.k(), constructive_width(g));
        let report = verify_representation(g, &rep, &ConstrainedPairs::All).unwrap();
        assert!(report.ok, "{:?}", report.mismatches);
        rep
    }

    #[test]
    fn single_edge_uses_two_bits() {
        let g = CompatibilityGraph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(check(&g).k(), 2);
    }

    #[test]
    fn complete_digraph_uses_n_bits() {
        assert_eq!(check(&CompatibilityGraph::complete(5)).k(), 5);
    }

    #[test]
    fn degenerate_graphs() {
        assert_eq!(check(&CompatibilityGraph::empty(0)).k(), 1);
        assert_eq!(check(&CompatibilityGraph::empty(1)).k(), 1);
        assert_eq!(check(&CompatibilityGraph::empty(4)).k(), 1);
    }

    #[test]
    fn patient_scheme_when_fewer_receivers() {
        // every vertex donates, only vertex 0 receives
        let g = CompatibilityGraph::from_edges(4, [(1, 0), (2, 0), (3, 0)]).unwrap();
        let rep = check(&g);
        assert_eq!(rep.k(), 2);
    }

    #[test]
    fn lifting_keeps_graph() {
        let g = CompatibilityGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 1)]).unwrap();
        let rep = check(&g);
        assert_eq!(lift_representation(&rep, 0), rep);
        for t in 1..4 {
            let lifted = lift_representation(&rep, t);
            assert_eq!((lifted.k(), lifted.t()), (rep.k() + t, t));
            assert!(
                verify_representation(&g, &lifted, &ConstrainedPairs::All)
                    .unwrap()
                    .ok
            );
        }
    }
}

use crate::graph::CompatibilityGraph;

/// Replaces every altruist's incoming edges with dummy edges from all
/// non-altruists, so a chain `a -> v1 -> ... -> vr` becomes the cycle that
/// returns from `vr` to `a`. Altruist-to-altruist edges are dropped.
pub fn model_altruists(g: &CompatibilityGraph) -> CompatibilityGraph {
    let mut out = g.clone();
    for a in g.altruists() {
        for v in 0..g.n() {
            if v == a {
                continue;
            }
            if g.is_altruist(v) {
                out.remove_edge(v, a);
            } else {
                out.add_edge(v, a).expect("indices in range");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dummy_edges_close_chains() {
        let mut g = CompatibilityGraph::from_edges(4, [(0, 1), (1, 2), (3, 0), (2, 3)]).unwrap();
        g.set_altruist(0, true).unwrap();
        g.set_altruist(3, true).unwrap();
        let m = model_altruists(&g);
        assert!(m.has_edge(1, 0) && m.has_edge(2, 0));
        assert!(!m.has_edge(3, 0));
        assert!(m.has_edge(0, 1) && m.has_edge(1, 2));
        assert!(m.has_edge(1, 3) && m.has_edge(2, 3));
        assert_eq!(m.altruists(), g.altruists());
    }
}

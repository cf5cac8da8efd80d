use proptest::prelude::*;
use typed_exchange_core::forge::gen_witness_graph;
use typed_exchange_core::oracle::{
    all_representations, count_representations, exhaustive_representation,
};
use typed_exchange_core::represent::{
    constructive_representation, constructive_width, enumerate_solutions, min_k, min_violations,
    solve, RepresentationProblem, SolveStatus,
};
use typed_exchange_core::sat::Budget;
use typed_exchange_core::{verify_representation, CompatibilityGraph, ConstrainedPairs};

fn digraph(n: usize) -> impl Strategy<Value = CompatibilityGraph> {
    proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
        let edges = (0..n * n)
            .filter(|&e| bits[e] && e / n != e % n)
            .map(|e| (e / n, e % n));
        CompatibilityGraph::from_edges(n, edges).unwrap()
    })
}

fn sized_digraph(max: usize) -> impl Strategy<Value = CompatibilityGraph> {
    (1..=max).prop_flat_map(digraph)
}

fn status(g: &CompatibilityGraph, k: usize, t: usize) -> SolveStatus {
    solve(
        &RepresentationProblem::full(g.clone(), k, t).unwrap(),
        &Budget::unlimited(),
    )
    .unwrap()
    .status
}

#[test]
fn witness_family_needs_full_width() {
    for n in 3..=5 {
        let g = gen_witness_graph(n).unwrap();
        assert_eq!(status(&g, n - 1, 0), SolveStatus::Unsat);
        assert!(status(&g, n, 0).is_sat());
        let m = min_k(&g, 0, &Budget::unlimited()).unwrap();
        assert_eq!((m.k, m.conservative), (n, false));
    }
}

#[test]
fn complete_digraph_width_one_solutions() {
    let g = CompatibilityGraph::complete(3);
    let p = RepresentationProblem::full(g.clone(), 1, 0).unwrap();
    let all = enumerate_solutions(&p, usize::MAX, &Budget::unlimited()).unwrap();
    assert!(all.exhausted);
    let expected = all_representations(&g, &ConstrainedPairs::All, 1, 0, false).unwrap();
    assert_eq!(all.solutions.len(), expected.len());
    for rep in &expected {
        assert!(all.solutions.contains(rep));
    }
}

#[test]
fn two_vertex_graphs_exhaustively() {
    for edges in 0..4u32 {
        let g = CompatibilityGraph::from_edges(
            2,
            [(0, 1), (1, 0)]
                .into_iter()
                .enumerate()
                .filter(|(b, _)| edges >> b & 1 == 1)
                .map(|(_, e)| e),
        )
        .unwrap();
        for k in 1..=3 {
            for t in 0..k {
                let oracle =
                    exhaustive_representation(&g, &ConstrainedPairs::All, k, t, false).unwrap();
                assert_eq!(
                    status(&g, k, t).is_sat(),
                    oracle.is_some(),
                    "{edges} {k} {t}"
                );
            }
        }
    }
}

#[test]
fn min_violations_on_witness_family() {
    // one bit short: the graph is not representable, so at least one pair is wrong
    let g = gen_witness_graph(4).unwrap();
    let p = RepresentationProblem::full(g.clone(), 3, 0).unwrap();
    let mv = min_violations(&p, &Budget::unlimited()).unwrap();
    assert!(!mv.conservative);
    assert!(mv.xi_count >= 1);
    let report = verify_representation(&g, &mv.rep, &ConstrainedPairs::All).unwrap();
    assert_eq!(report.mismatches.len(), mv.xi_count);
    let p = RepresentationProblem::full(g, 4, 0).unwrap();
    assert_eq!(
        min_violations(&p, &Budget::unlimited()).unwrap().xi_count,
        0
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constructive_width_always_verifies(g in sized_digraph(10)) {
        let rep = constructive_representation(&g);
        prop_assert_eq!(rep.k(), constructive_width(&g));
        prop_assert!(verify_representation(&g, &rep, &ConstrainedPairs::All).unwrap().ok);
    }

    #[test]
    fn solver_agrees_with_exhaustive_search(g in sized_digraph(4), k in 1usize..=3, t in 0usize..3) {
        prop_assume!(t < k && 2 * k * g.n() <= 24);
        let oracle = exhaustive_representation(&g, &ConstrainedPairs::All, k, t, false).unwrap();
        match status(&g, k, t) {
            SolveStatus::Sat(rep) => {
                prop_assert!(oracle.is_some());
                prop_assert!(verify_representation(&g, &rep, &ConstrainedPairs::All).unwrap().ok);
            }
            SolveStatus::Unsat => prop_assert!(oracle.is_none()),
            SolveStatus::Timeout => prop_assert!(false, "unlimited budget timed out"),
        }
    }

    #[test]
    fn partial_constraints_agree(g in digraph(3), mask in proptest::collection::vec(any::<bool>(), 6), k in 1usize..=2) {
        let pairs = ConstrainedPairs::All.pairs(3).into_iter().zip(mask).filter(|(_, m)| *m).map(|(p, _)| p);
        let constrained = ConstrainedPairs::only(pairs);
        let p = RepresentationProblem::new(g.clone(), constrained.clone(), k, 0).unwrap();
        let count = count_representations(&g, &constrained, k, 0, false).unwrap();
        let found = solve(&p, &Budget::unlimited()).unwrap().status;
        prop_assert_eq!(found.is_sat(), count > 0);
    }

    #[test]
    fn min_k_is_tight(g in sized_digraph(6), t in 0usize..2) {
        let m = min_k(&g, t, &Budget::unlimited()).unwrap();
        prop_assert!(!m.conservative);
        prop_assert!(m.k <= constructive_width(&g) + t);
        prop_assert!(verify_representation(&g, &m.rep, &ConstrainedPairs::All).unwrap().ok);
        if m.k > t + 1 {
            prop_assert_eq!(status(&g, m.k - 1, t), SolveStatus::Unsat);
        }
    }

    #[test]
    fn lifting_preserves_the_graph(g in sized_digraph(8), t in 1usize..=3) {
        let rep = constructive_representation(&g).lift(t);
        prop_assert!(verify_representation(&g, &rep, &ConstrainedPairs::All).unwrap().ok);
    }
}

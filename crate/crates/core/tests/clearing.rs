use proptest::prelude::*;
use typed_exchange_core::clearing::{
    clear_by_types, clear_by_types_weighted, enumerate_type_walks, flip_and_clear, model_altruists,
    realize_cover, Caps, FlipCostMatrix, COST_TOLERANCE,
};
use typed_exchange_core::forge::{gen_attribute_pool, gen_blood_pool, GeneratorConfig};
use typed_exchange_core::oracle::{max_cycle_cover_bruteforce, max_weighted_cover_bruteforce};
use typed_exchange_core::{CompatibilityGraph, TypeSpace};

fn clear_graph(g: &CompatibilityGraph, ts: &TypeSpace, l: usize) -> usize {
    let caps = Caps::new(l).unwrap();
    let walks = enumerate_type_walks(ts, caps).unwrap();
    let c = clear_by_types(ts, &walks).unwrap();
    let cover = realize_cover(g, ts, &walks, &c.multiplicities).unwrap();
    cover.validate(g, &caps).unwrap();
    assert_eq!(cover.value, c.matched);
    c.matched
}

fn pool(n: usize, k: usize, pd: f64, pp: f64, altruists: f64, seed: u64) -> CompatibilityGraph {
    let mut cfg = GeneratorConfig::new(n, seed).with_uniform_bits(k, pd, pp);
    cfg.altruist_fraction = altruists;
    model_altruists(&gen_attribute_pool(&cfg).unwrap().1)
}

#[test]
fn spec_examples() {
    let one = TypeSpace::new(vec![4], vec![vec![true]], vec![false]).unwrap();
    assert_eq!(clear_graph(&one.induced_graph(), &one, 2), 4);
    let none = TypeSpace::new(vec![2, 3], vec![vec![false; 2]; 2], vec![false; 2]).unwrap();
    assert_eq!(clear_graph(&none.induced_graph(), &none, 3), 0);
    let tri = CompatibilityGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
    let ts = TypeSpace::from_graph(&tri).unwrap();
    assert_eq!(ts.len(), 3);
    assert_eq!(clear_graph(&tri, &ts, 3), 3);
    assert_eq!(clear_graph(&tri, &ts, 2), 0);
}

#[test]
fn altruist_chains() {
    let mut g = CompatibilityGraph::from_edges(2, [(0, 1)]).unwrap();
    g.set_altruist(0, true).unwrap();
    let m = model_altruists(&g);
    assert!(m.has_edge(1, 0));
    assert_eq!(clear_graph(&m, &TypeSpace::from_graph(&m).unwrap(), 2), 2);

    let plain = CompatibilityGraph::from_edges(3, [(0, 1), (1, 0), (1, 2), (2, 1)]).unwrap();
    assert_eq!(model_altruists(&plain), plain);

    let mut g = CompatibilityGraph::from_edges(3, [(1, 2), (2, 1)]).unwrap();
    g.set_altruist(0, true).unwrap();
    let m = model_altruists(&g);
    assert_eq!(clear_graph(&m, &TypeSpace::from_graph(&m).unwrap(), 3), 2);
}

#[test]
fn two_altruists_never_share_a_cycle() {
    let mut g = CompatibilityGraph::from_edges(3, [(0, 2), (1, 2), (0, 1), (1, 0)]).unwrap();
    g.set_altruist(0, true).unwrap();
    g.set_altruist(1, true).unwrap();
    let m = model_altruists(&g);
    let cover = max_cycle_cover_bruteforce(&m, Caps::new(3).unwrap(), false).unwrap();
    assert_eq!(cover.value, 2);
    assert_eq!(clear_graph(&m, &TypeSpace::from_graph(&m).unwrap(), 3), 2);
}

#[test]
fn blood_pool_clears_and_realizes() {
    let (rep, g) = gen_blood_pool(40, [0.44, 0.42, 0.1, 0.04], [0.44, 0.42, 0.1, 0.04], 5).unwrap();
    let ts = TypeSpace::from_attributes(&rep);
    assert!(ts.len() <= 16);
    for l in 2..=3 {
        assert!(clear_graph(&g, &ts, l) <= 40);
    }
}

fn exhaustive_flip(ts: &TypeSpace, l: usize, cost: &FlipCostMatrix) -> f64 {
    let m = ts.len();
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|a| (0..m).map(move |b| (a, b)))
        .filter(|(a, b)| a != b)
        .collect();
    let mut best = f64::NEG_INFINITY;
    let mut s = vec![0usize; pairs.len()];
    loop {
        let mut out = vec![0usize; m];
        let mut counts = ts.counts().to_vec();
        let mut c = 0.0;
        let mut ok = true;
        for (&(a, b), &x) in pairs.iter().zip(&s) {
            out[a] += x;
            if x > 0 {
                ok &= cost.cost(a, b).is_finite();
                c += x as f64 * cost.cost(a, b);
            }
            counts[b] += x;
        }
        ok &= out.iter().zip(ts.counts()).all(|(o, n)| o <= n);
        if ok {
            for (count, o) in counts.iter_mut().zip(&out) {
                *count -= o;
            }
            let space = ts.with_counts(counts).unwrap();
            let value =
                max_cycle_cover_bruteforce(&space.induced_graph(), Caps::new(l).unwrap(), false)
                    .unwrap()
                    .value;
            best = best.max(value as f64 - c);
        }
        let mut pos = 0;
        while pos < s.len() {
            s[pos] += 1;
            if s[pos] <= ts.count(pairs[pos].0) {
                break;
            }
            s[pos] = 0;
            pos += 1;
        }
        if pos == s.len() {
            return best;
        }
    }
}

#[test]
fn flip_example_with_half_unit_cost() {
    let ts = TypeSpace::new(
        vec![1, 1],
        vec![vec![false, false], vec![false, true]],
        vec![false; 2],
    )
    .unwrap();
    let walks = enumerate_type_walks(&ts, Caps::new(3).unwrap()).unwrap();
    let mut cost = FlipCostMatrix::forbidden(2);
    cost.set(0, 1, 0.5).unwrap();
    let out = flip_and_clear(&ts, &walks, &cost).unwrap();
    assert!((out.plan.net_value - 1.5).abs() < COST_TOLERANCE);
    assert!((exhaustive_flip(&ts, 3, &cost) - 1.5).abs() < COST_TOLERANCE);
}

fn type_space() -> impl Strategy<Value = TypeSpace> {
    (1usize..=3).prop_flat_map(|m| {
        (
            proptest::collection::vec(0usize..=3, m),
            proptest::collection::vec(any::<bool>(), m * m),
        )
            .prop_map(move |(counts, compat)| {
                let table = compat.chunks(m).map(<[bool]>::to_vec).collect();
                TypeSpace::new(counts, table, vec![false; m]).unwrap()
            })
    })
}

fn cost_matrix(m: usize) -> impl Strategy<Value = FlipCostMatrix> {
    proptest::collection::vec(
        prop_oneof![Just(0.0), Just(0.5), Just(1.0), Just(10.0)],
        m * m,
    )
    .prop_map(move |c| {
        FlipCostMatrix::new(
            (0..m)
                .map(|a| {
                    (0..m)
                        .map(|b| if a == b { 0.0 } else { c[a * m + b] })
                        .collect()
                })
                .collect(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn type_clearing_matches_brute_force(
        n in 1usize..=10,
        k in 2usize..=5,
        pd in 0.05f64..0.5,
        pp in 0.05f64..0.5,
        alt in prop_oneof![Just(0.0), Just(0.2)],
        l in 2usize..=3,
        seed in any::<u64>(),
    ) {
        let g = pool(n, k, pd, pp, alt, seed);
        let oracle = max_cycle_cover_bruteforce(&g, Caps::new(l).unwrap(), false).unwrap();
        prop_assert_eq!(clear_graph(&g, &TypeSpace::from_graph(&g).unwrap(), l), oracle.value);
    }

    #[test]
    fn more_vertices_never_hurt(ts in type_space(), extra in 0usize..3, l in 2usize..=3) {
        let walks = enumerate_type_walks(&ts, Caps::new(l).unwrap()).unwrap();
        let base = clear_by_types(&ts, &walks).unwrap().matched;
        let ty = extra % ts.len();
        let mut counts = ts.counts().to_vec();
        counts[ty] += 1;
        let grown = clear_by_types(&ts.with_counts(counts).unwrap(), &walks).unwrap().matched;
        prop_assert!(grown >= base);
    }

    #[test]
    fn swapping_same_type_vertices_keeps_a_cover(ts in type_space(), l in 2usize..=3) {
        let g = ts.induced_graph();
        let caps = Caps::new(l).unwrap();
        let walks = enumerate_type_walks(&ts, caps).unwrap();
        let c = clear_by_types(&ts, &walks).unwrap();
        let cover = realize_cover(&g, &ts, &walks, &c.multiplicities).unwrap();
        // reverse the order of vertices within each type
        let members = ts.members();
        let mut perm: Vec<usize> = (0..g.n()).collect();
        for group in &members {
            for (a, b) in group.iter().zip(group.iter().rev()) {
                perm[*a] = *b;
            }
        }
        let mut swapped = cover.clone();
        for cycle in &mut swapped.cycles {
            for v in cycle.iter_mut() {
                *v = perm[*v];
            }
        }
        swapped.validate(&g, &caps).unwrap();
        prop_assert_eq!(swapped.value, cover.value);
    }

    #[test]
    fn flip_matches_exhaustive_plans(
        (ts, cost) in type_space().prop_flat_map(|ts| { let m = ts.len(); (Just(ts), cost_matrix(m)) }),
        l in 2usize..=3,
    ) {
        prop_assume!(ts.n() <= 8);
        let walks = enumerate_type_walks(&ts, Caps::new(l).unwrap()).unwrap();
        let out = flip_and_clear(&ts, &walks, &cost).unwrap();
        let expected = exhaustive_flip(&ts, l, &cost);
        prop_assert!((out.plan.net_value - expected).abs() < COST_TOLERANCE, "{} vs {}", out.plan.net_value, expected);
        prop_assert_eq!(out.plan.apply_to_counts(ts.counts()).unwrap(), out.counts.clone());
    }

    #[test]
    fn forbidden_flips_reduce_to_clearing(ts in type_space(), l in 2usize..=3) {
        let walks = enumerate_type_walks(&ts, Caps::new(l).unwrap()).unwrap();
        let out = flip_and_clear(&ts, &walks, &FlipCostMatrix::forbidden(ts.len())).unwrap();
        prop_assert!(out.plan.switches.is_empty());
        prop_assert_eq!(out.plan.matched, clear_by_types(&ts, &walks).unwrap().matched);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sparse_pools_with_distinct_types_match_brute_force(
        n in 12usize..=18,
        alt in prop_oneof![Just(0.0), Just(0.15)],
        l in 2usize..=3,
        seed in any::<u64>(),
    ) {
        let g = pool(n, 10, 0.3, 0.5, alt, seed);
        let caps = Caps::new(l).unwrap();
        let ts = TypeSpace::from_graph(&g).unwrap();
        let oracle = max_cycle_cover_bruteforce(&g, caps, false).unwrap();
        prop_assert_eq!(clear_graph(&g, &ts, l), oracle.value);

        let walks = enumerate_type_walks(&ts, caps).unwrap();
        let weights: Vec<u64> = (0..ts.len()).map(|ty| u64::from(!ts.is_altruist(ty))).collect();
        let per_vertex: Vec<u64> = (0..g.n()).map(|v| u64::from(!g.is_altruist(v))).collect();
        let (_, exact) = max_weighted_cover_bruteforce(&g, caps, &per_vertex, false).unwrap();
        prop_assert_eq!(clear_by_types_weighted(&ts, &walks, &weights).unwrap().value, exact);
    }
}

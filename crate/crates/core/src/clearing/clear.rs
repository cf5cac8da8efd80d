use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::walks::TypeWalkSet;
use crate::error::{Error, Result};
use crate::types::TypeSpace;

/// How many copies of each walk of a [`TypeWalkSet`] a clearing uses,
/// aligned with `TypeWalkSet::walks`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultiplicityVector(pub Vec<usize>);

impl MultiplicityVector {
    /// Vertices matched by the walks.
    pub fn matched(&self, walks: &TypeWalkSet) -> usize {
        self.0
            .iter()
            .zip(&walks.walks)
            .map(|(&m, w)| m * w.len())
            .sum()
    }

    /// Vertices of each type the walks consume.
    pub fn usage(&self, walks: &TypeWalkSet, types: usize) -> Vec<usize> {
        let mut used = vec![0; types];
        for (&m, w) in self.0.iter().zip(&walks.walks) {
            for &ty in w.types() {
                used[ty] += m;
            }
        }
        used
    }

    /// Walks with positive multiplicity, as `(walk index, copies)`.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(i, &m)| (i, m))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clearing {
    pub multiplicities: MultiplicityVector,
    /// Matched vertices.
    pub matched: usize,
    /// Objective value: the sum of type weights over matched vertices.
    pub value: u64,
}

/// Maximum number of vertices coverable by vertex-disjoint admissible
/// cycles, solved exactly over walk multiplicities.
pub fn clear_by_types(ts: &TypeSpace, walks: &TypeWalkSet) -> Result<Clearing> {
    clear_by_types_weighted(ts, walks, &vec![1; ts.len()])
}

/// Like [`clear_by_types`] but each matched vertex of type `θ` is worth
/// `weights[θ]`. Ties are broken towards the first optimum found.
pub fn clear_by_types_weighted(
    ts: &TypeSpace,
    walks: &TypeWalkSet,
    weights: &[u64],
) -> Result<Clearing> {
    if weights.len() != ts.len() {
        return Err(Error::InvalidTypeSpace(format!(
            "expected {} weights, got {}",
            ts.len(),
            weights.len()
        )));
    }
    for w in &walks.walks {
        if w.types().iter().any(|&ty| ty >= ts.len()) || !w.is_closed(ts) {
            return Err(Error::InvalidTypeSpace(format!(
                "walk {:?} is not closed in this type space",
                w.types()
            )));
        }
    }
    let mut search = Search::new(ts, walks, weights);
    search.run(None);
    let multiplicities = MultiplicityVector(search.best);
    Ok(Clearing {
        matched: multiplicities.matched(walks),
        multiplicities,
        value: search.best_value,
    })
}

struct Search<'a> {
    occ: Vec<Vec<(usize, usize)>>,
    walk_value: Vec<u64>,
    by_type: Vec<Vec<usize>>,
    weights: &'a [u64],
    cap: Vec<usize>,
    retired: Vec<bool>,
    current: Vec<usize>,
    value: u64,
    best: Vec<usize>,
    best_value: u64,
    ceiling: u64,
    // scratch for the bounds
    feasible_count: Vec<usize>,
    walk_edges: Vec<Vec<(usize, usize)>>,
    flow: FlowScratch,
    /// Lagrange multipliers on the type capacities, kept between nodes.
    lambda: Vec<f64>,
    nodes: u64,
}

/// Residual state for the transportation bound: `out[a]` predecessors
/// supplied by type `a`, `inn[b]` matched vertices of type `b`,
/// `f[a * m + b]` flow along type edge `a -> b`.
#[derive(Default)]
struct FlowScratch {
    edge: Vec<bool>,
    f: Vec<usize>,
    out: Vec<usize>,
    inn: Vec<usize>,
    prev: Vec<usize>,
    queue: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(ts: &TypeSpace, walks: &TypeWalkSet, weights: &'a [u64]) -> Self {
        let m = ts.len();
        let occ: Vec<Vec<(usize, usize)>> = walks.walks.iter().map(|w| w.occurrences()).collect();
        let mut by_type = vec![Vec::new(); m];
        for (i, o) in occ.iter().enumerate() {
            for &(ty, _) in o {
                by_type[ty].push(i);
            }
        }
        let walk_value = walks
            .walks
            .iter()
            .map(|w| w.types().iter().map(|&ty| weights[ty]).sum())
            .collect();
        let cap = ts.counts().to_vec();
        let ceiling = cap.iter().zip(weights).map(|(&c, &w)| c as u64 * w).sum();
        Self {
            walk_value,
            by_type,
            weights,
            retired: vec![false; m],
            current: vec![0; walks.len()],
            value: 0,
            best: vec![0; walks.len()],
            best_value: 0,
            ceiling,
            feasible_count: vec![0; m],
            walk_edges: walks
                .walks
                .iter()
                .map(|w| {
                    let t = w.types();
                    let mut e: Vec<(usize, usize)> =
                        (0..t.len()).map(|i| (t[i], t[(i + 1) % t.len()])).collect();
                    e.sort_unstable();
                    e.dedup();
                    e
                })
                .collect(),
            flow: FlowScratch {
                edge: vec![false; m * m],
                f: vec![0; m * m],
                out: vec![0; m],
                inn: vec![0; m],
                prev: vec![0; 2 * m],
                queue: Vec::with_capacity(2 * m),
            },
            lambda: vec![0.5; m],
            nodes: 0,
            cap,
            occ,
        }
    }

    fn feasible(&self, w: usize) -> bool {
        self.occ[w]
            .iter()
            .all(|&(ty, c)| !self.retired[ty] && self.cap[ty] >= c)
    }

    /// Upper bound on the best completion, and the most constrained type
    /// that still has a usable walk.
    fn bound(&mut self) -> (u64, Option<usize>) {
        self.feasible_count.iter_mut().for_each(|c| *c = 0);
        for w in 0..self.occ.len() {
            if self.walk_value[w] > 0 && self.feasible(w) {
                for &(ty, _) in &self.occ[w] {
                    self.feasible_count[ty] += 1;
                }
            }
        }
        let mut ub = self.value;
        let mut choice: Option<usize> = None;
        for ty in 0..self.cap.len() {
            let fc = self.feasible_count[ty];
            if fc == 0 {
                continue;
            }
            ub += self.cap[ty] as u64 * self.weights[ty];
            let better = match choice {
                None => true,
                Some(c) => {
                    let (wc, wt) = (self.weights[c] > 0, self.weights[ty] > 0);
                    (wt && !wc) || (wt == wc && fc < self.feasible_count[c])
                }
            };
            if better {
                choice = Some(ty);
            }
        }
        if ub > self.best_value && choice.is_some() {
            ub = ub.min(self.value + self.transport_bound());
        }
        if ub > self.best_value && choice.is_some() {
            let rounds = if self.nodes == 0 { 300 } else { 25 };
            ub = ub.min(self.value + self.lagrangian_bound(rounds));
        }
        self.nodes += 1;
        (ub, choice)
    }

    /// Relaxes the capacity constraints with multipliers `lambda >= 0`:
    /// `sum cap * lambda + sum ub_w * max(0, v_w - occ_w . lambda)` bounds
    /// the completion for any multipliers, where `ub_w` is the most copies of
    /// walk `w` that fit. Subgradient steps tighten it.
    fn lagrangian_bound(&mut self, rounds: usize) -> u64 {
        let m = self.cap.len();
        let live: Vec<usize> = (0..self.occ.len())
            .filter(|&w| self.walk_value[w] > 0 && self.feasible(w))
            .collect();
        let most: Vec<f64> = live
            .iter()
            .map(|&w| {
                self.occ[w]
                    .iter()
                    .map(|&(ty, c)| self.cap[ty] / c)
                    .min()
                    .unwrap_or(0) as f64
            })
            .collect();
        let target = self.best_value.saturating_sub(self.value) as f64;
        let mut best = f64::INFINITY;
        let mut mu = 1.0;
        let mut stale = 0;
        let mut g = vec![0.0f64; m];
        for _ in 0..rounds {
            let mut bound: f64 = (0..m).map(|ty| self.lambda[ty] * self.cap[ty] as f64).sum();
            g.iter_mut()
                .zip(&self.cap)
                .for_each(|(g, &c)| *g = c as f64);
            for (i, &w) in live.iter().enumerate() {
                let reduced = self.walk_value[w] as f64
                    - self.occ[w]
                        .iter()
                        .map(|&(ty, c)| c as f64 * self.lambda[ty])
                        .sum::<f64>();
                if reduced > 0.0 {
                    bound += most[i] * reduced;
                    for &(ty, c) in &self.occ[w] {
                        g[ty] -= most[i] * c as f64;
                    }
                }
            }
            if bound < best - 1e-9 {
                best = bound;
                stale = 0;
            } else {
                stale += 1;
                if stale >= 5 {
                    mu /= 2.0;
                    stale = 0;
                }
            }
            if best < target + 1.0 - 1e-6 {
                break;
            }
            // only active capacities move: a zero multiplier with slack stays put
            let norm: f64 = (0..m)
                .filter(|&ty| g[ty] < 0.0 || self.lambda[ty] > 0.0)
                .map(|ty| g[ty] * g[ty])
                .sum();
            if norm < 1e-12 || mu < 1e-4 {
                break;
            }
            let step = mu * (bound - target).max(0.5) / norm;
            for ty in 0..m {
                self.lambda[ty] = (self.lambda[ty] - step * g[ty]).max(0.0);
            }
        }
        if best.is_finite() {
            (best + 1e-6).max(0.0) as u64
        } else {
            0
        }
    }

    /// Every matched vertex of type `b` has a predecessor of some type `a`
    /// along an edge of a usable walk, and each type supplies at most its
    /// capacity in predecessors. The best weighted transportation plan under
    /// those limits bounds any completion; it is computed greedily by
    /// weight, one augmenting path at a time.
    fn transport_bound(&mut self) -> u64 {
        let m = self.cap.len();
        let fs = &mut self.flow;
        fs.edge.iter_mut().for_each(|e| *e = false);
        fs.f.iter_mut().for_each(|f| *f = 0);
        fs.out.iter_mut().for_each(|x| *x = 0);
        fs.inn.iter_mut().for_each(|x| *x = 0);
        for w in 0..self.occ.len() {
            if self.walk_value[w] > 0
                && self.occ[w]
                    .iter()
                    .all(|&(ty, c)| !self.retired[ty] && self.cap[ty] >= c)
            {
                for &(a, b) in &self.walk_edges[w] {
                    fs.edge[a * m + b] = true;
                }
            }
        }
        let mut order: Vec<usize> = (0..m)
            .filter(|&b| self.weights[b] > 0 && self.feasible_count[b] > 0)
            .collect();
        order.sort_by_key(|&b| core::cmp::Reverse(self.weights[b]));
        let mut total = 0u64;
        const NONE: usize = usize::MAX;
        for b in order {
            // nodes: 0..m are supply sides, m..2m demand sides
            while fs.inn[b] < self.cap[b] {
                fs.prev.iter_mut().for_each(|p| *p = NONE);
                fs.queue.clear();
                for a in 0..m {
                    if fs.out[a] < self.cap[a] && self.feasible_count[a] > 0 {
                        fs.prev[a] = a;
                        fs.queue.push(a);
                    }
                }
                let mut head = 0;
                let mut found = false;
                while head < fs.queue.len() && !found {
                    let x = fs.queue[head];
                    head += 1;
                    if x < m {
                        for y in 0..m {
                            if fs.edge[x * m + y] && fs.prev[m + y] == NONE {
                                fs.prev[m + y] = x;
                                if y == b {
                                    found = true;
                                    break;
                                }
                                fs.queue.push(m + y);
                            }
                        }
                    } else {
                        let y = x - m;
                        for a in 0..m {
                            if fs.f[a * m + y] > 0 && fs.prev[a] == NONE {
                                fs.prev[a] = x;
                                fs.queue.push(a);
                            }
                        }
                    }
                }
                if !found {
                    break;
                }
                // bottleneck along the path back from demand side b
                let mut push = self.cap[b] - fs.inn[b];
                let mut node = m + b;
                loop {
                    let a = fs.prev[node];
                    if fs.prev[a] == a {
                        push = push.min(self.cap[a] - fs.out[a]);
                        break;
                    }
                    let back = fs.prev[a] - m;
                    push = push.min(fs.f[a * m + back]);
                    node = fs.prev[a];
                }
                let mut node = m + b;
                loop {
                    let a = fs.prev[node];
                    let y = node - m;
                    fs.f[a * m + y] += push;
                    if fs.prev[a] == a {
                        fs.out[a] += push;
                        break;
                    }
                    let back = fs.prev[a] - m;
                    fs.f[a * m + back] -= push;
                    node = fs.prev[a];
                }
                fs.inn[b] += push;
                total += push as u64 * self.weights[b];
            }
        }
        total
    }

    fn apply(&mut self, w: usize) {
        for &(ty, c) in &self.occ[w] {
            self.cap[ty] -= c;
        }
        self.current[w] += 1;
        self.value += self.walk_value[w];
    }

    fn undo(&mut self, w: usize) {
        for &(ty, c) in &self.occ[w] {
            self.cap[ty] += c;
        }
        self.current[w] -= 1;
        self.value -= self.walk_value[w];
    }

    fn done(&self) -> bool {
        self.best_value >= self.ceiling
    }

    /// `focus` is the type currently being filled and the position in its
    /// walk list to resume from, so every multiset is generated once.
    fn run(&mut self, focus: Option<(usize, usize)>) {
        if self.value > self.best_value {
            self.best_value = self.value;
            self.best.clone_from(&self.current);
        }
        let (ub, choice) = self.bound();
        if ub <= self.best_value || self.done() {
            return;
        }
        let (ty, from) = match focus {
            Some((ty, from)) if !self.retired[ty] => (ty, from),
            _ => match choice {
                Some(ty) => (ty, 0),
                None => return,
            },
        };
        for idx in from..self.by_type[ty].len() {
            let w = self.by_type[ty][idx];
            if self.walk_value[w] > 0 && self.feasible(w) {
                self.apply(w);
                self.run(Some((ty, idx)));
                self.undo(w);
                if self.done() {
                    return;
                }
            }
        }
        self.retired[ty] = true;
        self.run(None);
        self.retired[ty] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clearing::{enumerate_type_walks, Caps};

    fn clear(counts: Vec<usize>, compat: Vec<Vec<bool>>, l: usize) -> usize {
        let m = counts.len();
        let ts = TypeSpace::new(counts, compat, vec![false; m]).unwrap();
        let walks = enumerate_type_walks(&ts, Caps::new(l).unwrap()).unwrap();
        let c = clear_by_types(&ts, &walks).unwrap();
        assert_eq!(c.value as usize, c.matched);
        let usage = c.multiplicities.usage(&walks, m);
        assert!(usage.iter().zip(ts.counts()).all(|(u, c)| u <= c));
        c.matched
    }

    #[test]
    fn bipartite_types_pair_off() {
        let compat = vec![vec![false, true], vec![true, false]];
        assert_eq!(clear(vec![3, 5], compat.clone(), 2), 6);
        assert_eq!(clear(vec![4, 4], compat, 3), 8);
    }

    #[test]
    fn odd_self_compatible_type_needs_triangles() {
        assert_eq!(clear(vec![5], vec![vec![true]], 2), 4);
        assert_eq!(clear(vec![5], vec![vec![true]], 3), 5);
        assert_eq!(clear(vec![1], vec![vec![true]], 3), 0);
    }

    #[test]
    fn directed_triangle_of_types() {
        let compat = vec![
            vec![false, true, false],
            vec![false, false, true],
            vec![true, false, false],
        ];
        assert_eq!(clear(vec![2, 2, 2], compat.clone(), 2), 0);
        assert_eq!(clear(vec![2, 3, 2], compat, 3), 6);
    }

    #[test]
    fn weighted_prefers_heavy_types() {
        let ts = TypeSpace::new(
            vec![1, 1, 1],
            vec![
                vec![false, true, true],
                vec![true, false, false],
                vec![true, false, false],
            ],
            vec![false; 3],
        )
        .unwrap();
        let walks = enumerate_type_walks(&ts, Caps::new(2).unwrap()).unwrap();
        let c = clear_by_types_weighted(&ts, &walks, &[1, 1, 5]).unwrap();
        assert_eq!(c.value, 6);
        assert_eq!(c.matched, 2);
        assert_eq!(c.multiplicities.usage(&walks, 3), vec![1, 0, 1]);
    }
}

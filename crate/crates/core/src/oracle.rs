//! Brute-force reference engines. They are deliberately simple and guarded
//! by hard size limits; pass `force = true` to lift a guard.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitVector;
use crate::clearing::{Caps, CycleCover};
use crate::error::{Error, Result};
use crate::forge::ThreeSatFormula;
use crate::graph::{AttributeRepresentation, CompatibilityGraph, ConstrainedPairs};

pub const MAX_COVER_VERTICES: usize = 20;
pub const MAX_REPRESENTATION_BITS: usize = 24;
pub const MAX_SAT_VARS: usize = 20;

/// Every admissible simple cycle, as its rotation starting at the smallest
/// vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleCatalog {
    pub cycles: Vec<Vec<usize>>,
    pub masks: Vec<u128>,
}

impl CycleCatalog {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn count_of_length(&self, len: usize) -> usize {
        self.cycles.iter().filter(|c| c.len() == len).count()
    }
}

/// DFS from each root, visiting only larger vertices. Cycles with more than
/// one altruist or above the caps are skipped.
pub fn enumerate_cycles(g: &CompatibilityGraph, caps: Caps) -> Result<CycleCatalog> {
    if g.n() > 128 {
        return Err(Error::SizeGuard(format!(
            "cycle catalog supports at most 128 vertices, got {}",
            g.n()
        )));
    }
    let mut cat = CycleCatalog {
        cycles: Vec::new(),
        masks: Vec::new(),
    };
    let mut path = Vec::new();
    for root in 0..g.n() {
        path.push(root);
        dfs(g, &caps, &mut path, &mut cat);
        path.pop();
    }
    Ok(cat)
}

fn dfs(g: &CompatibilityGraph, caps: &Caps, path: &mut Vec<usize>, cat: &mut CycleCatalog) {
    let root = path[0];
    let last = *path.last().expect("non-empty");
    let altruists = path.iter().filter(|&&v| g.is_altruist(v)).count();
    if altruists > 1 {
        return;
    }
    if path.len() >= 2 && g.has_edge(last, root) && caps.admits(path.len(), altruists) {
        cat.masks.push(path.iter().fold(0u128, |m, &v| m | 1 << v));
        cat.cycles.push(path.clone());
    }
    if path.len() == caps.max_len() {
        return;
    }
    for next in g.out_neighbors(last) {
        if next > root && !path.contains(&next) {
            path.push(next);
            dfs(g, caps, path, cat);
            path.pop();
        }
    }
}

/// Maximum vertex-disjoint cycle packing.
pub fn max_cycle_cover_bruteforce(
    g: &CompatibilityGraph,
    caps: Caps,
    force: bool,
) -> Result<CycleCover> {
    max_weighted_cover_bruteforce(g, caps, &vec![1; g.n()], force).map(|(cover, _)| cover)
}

/// Packing maximising the summed weight of covered vertices. Returns the
/// cover and its weight.
pub fn max_weighted_cover_bruteforce(
    g: &CompatibilityGraph,
    caps: Caps,
    weights: &[u64],
    force: bool,
) -> Result<(CycleCover, u64)> {
    if g.n() > MAX_COVER_VERTICES && !force {
        return Err(Error::SizeGuard(format!(
            "brute-force packing refuses {} vertices (limit {MAX_COVER_VERTICES})",
            g.n()
        )));
    }
    if weights.len() != g.n() {
        return Err(Error::VertexCountMismatch {
            expected: g.n(),
            found: weights.len(),
        });
    }
    let cat = enumerate_cycles(g, caps)?;
    let mut through = vec![Vec::new(); g.n()];
    for (c, cycle) in cat.cycles.iter().enumerate() {
        for &v in cycle {
            through[v].push(c);
        }
    }
    let mut packer = Packer {
        cat: &cat,
        through: &through,
        weights,
        chosen: Vec::new(),
        best: Vec::new(),
        best_value: 0,
    };
    packer.run(0, 0, 0);
    let cycles = packer.best.iter().map(|&c| cat.cycles[c].clone()).collect();
    let value = packer.best_value;
    Ok((CycleCover::new(cycles), value))
}

struct Packer<'a> {
    cat: &'a CycleCatalog,
    through: &'a [Vec<usize>],
    weights: &'a [u64],
    chosen: Vec<usize>,
    best: Vec<usize>,
    best_value: u64,
}

impl Packer<'_> {
    /// Vertices below `v` are decided; `used` holds covered vertices.
    fn run(&mut self, v: usize, used: u128, value: u64) {
        if value > self.best_value {
            self.best_value = value;
            self.best.clone_from(&self.chosen);
        }
        let n = self.weights.len();
        let free: u64 = (v..n)
            .filter(|&w| used & 1 << w == 0)
            .map(|w| self.weights[w])
            .sum();
        if value + free <= self.best_value {
            return;
        }
        let Some(v) = (v..n).find(|&w| used & 1 << w == 0) else {
            return;
        };
        for &c in &self.through[v] {
            let mask = self.cat.masks[c];
            if mask & used == 0 {
                let gain: u64 = self.cat.cycles[c].iter().map(|&w| self.weights[w]).sum();
                self.chosen.push(c);
                self.run(v + 1, used | mask, value + gain);
                self.chosen.pop();
            }
        }
        // leave v uncovered
        self.run(v + 1, used | 1 << v, value);
    }
}

fn check_representation_size(n: usize, k: usize, force: bool) -> Result<()> {
    if k == 0 {
        return Err(Error::ZeroWidth);
    }
    if 2 * k * n > MAX_REPRESENTATION_BITS && !force {
        return Err(Error::SizeGuard(format!(
            "exhaustive search over 2*{k}*{n} bits exceeds {MAX_REPRESENTATION_BITS}"
        )));
    }
    Ok(())
}

fn vectors(k: usize) -> Vec<BitVector> {
    (0..1u64 << k)
        .map(|mask| BitVector::from_bits(&(0..k).map(|q| mask >> q & 1 == 1).collect::<Vec<_>>()))
        .collect()
}

/// For fixed donors, the patient vectors each vertex may take. Patient
/// constraints only involve that patient, so the full assignment space is
/// the product of these lists.
fn patient_options(
    g: &CompatibilityGraph,
    constrained: &ConstrainedPairs,
    t: usize,
    donors: &[&BitVector],
    all: &[BitVector],
) -> Vec<Vec<usize>> {
    let n = g.n();
    (0..n)
        .map(|j| {
            (0..all.len())
                .filter(|&p| {
                    (0..n).all(|i| {
                        i == j
                            || !constrained.contains(i, j)
                            || (donors[i].dot(&all[p]) <= t) == g.has_edge(i, j)
                    })
                })
                .collect()
        })
        .collect()
}

fn donor_assignments(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let base = 1usize << k;
    let total = base.checked_pow(n as u32).unwrap_or(usize::MAX);
    (0..total).map(move |mut code| {
        (0..n)
            .map(|_| {
                let d = code % base;
                code /= base;
                d
            })
            .collect()
    })
}

/// First representation found by exhausting every bit assignment, or
/// `None` if the graph has no `(k, t)`-representation on `constrained`.
pub fn exhaustive_representation(
    g: &CompatibilityGraph,
    constrained: &ConstrainedPairs,
    k: usize,
    t: usize,
    force: bool,
) -> Result<Option<AttributeRepresentation>> {
    check_representation_size(g.n(), k, force)?;
    constrained.check(g.n())?;
    let all = vectors(k);
    for donors in donor_assignments(g.n(), k) {
        let d: Vec<&BitVector> = donors.iter().map(|&i| &all[i]).collect();
        let options = patient_options(g, constrained, t, &d, &all);
        if options.iter().all(|o| !o.is_empty()) {
            let rep = AttributeRepresentation::new(
                k,
                t,
                d.into_iter().cloned().collect(),
                options.iter().map(|o| all[o[0]].clone()).collect(),
            )?;
            return Ok(Some(rep));
        }
    }
    Ok(None)
}

/// Number of bit assignments that represent `g` on `constrained`.
pub fn count_representations(
    g: &CompatibilityGraph,
    constrained: &ConstrainedPairs,
    k: usize,
    t: usize,
    force: bool,
) -> Result<u128> {
    check_representation_size(g.n(), k, force)?;
    constrained.check(g.n())?;
    let all = vectors(k);
    let mut total = 0u128;
    for donors in donor_assignments(g.n(), k) {
        let d: Vec<&BitVector> = donors.iter().map(|&i| &all[i]).collect();
        total += patient_options(g, constrained, t, &d, &all)
            .iter()
            .map(|o| o.len() as u128)
            .product::<u128>();
    }
    Ok(total)
}

/// Every representing bit assignment, in donor-major order.
pub fn all_representations(
    g: &CompatibilityGraph,
    constrained: &ConstrainedPairs,
    k: usize,
    t: usize,
    force: bool,
) -> Result<Vec<AttributeRepresentation>> {
    check_representation_size(g.n(), k, force)?;
    constrained.check(g.n())?;
    let all = vectors(k);
    let mut out = Vec::new();
    for donors in donor_assignments(g.n(), k) {
        let d: Vec<BitVector> = donors.iter().map(|&i| all[i].clone()).collect();
        let refs: Vec<&BitVector> = d.iter().collect();
        let options = patient_options(g, constrained, t, &refs, &all);
        if options.iter().any(Vec::is_empty) {
            continue;
        }
        let mut pick = vec![0usize; g.n()];
        loop {
            let patients = pick
                .iter()
                .zip(&options)
                .map(|(&i, o)| all[o[i]].clone())
                .collect();
            out.push(AttributeRepresentation::new(k, t, d.clone(), patients)?);
            // odometer over the option lists
            let mut pos = 0;
            while pos < pick.len() {
                pick[pos] += 1;
                if pick[pos] < options[pos].len() {
                    break;
                }
                pick[pos] = 0;
                pos += 1;
            }
            if pos == pick.len() {
                break;
            }
        }
    }
    Ok(out)
}

/// Truth-table search; returns the first satisfying assignment in binary
/// counting order (variable 1 is the lowest bit).
pub fn sat_bruteforce(formula: &ThreeSatFormula, force: bool) -> Result<Option<Vec<bool>>> {
    let n = formula.n_vars();
    if n > MAX_SAT_VARS && !force {
        return Err(Error::SizeGuard(format!(
            "truth table over {n} variables exceeds {MAX_SAT_VARS}"
        )));
    }
    if n >= 64 {
        return Err(Error::SizeGuard(format!("truth table over {n} variables")));
    }
    for mask in 0..1u64 << n {
        let assignment: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        if formula.evaluate(&assignment) {
            return Ok(Some(assignment));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps(l: usize) -> Caps {
        Caps::new(l).unwrap()
    }

    fn binom(n: usize, r: usize) -> usize {
        (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn complete_digraph_cycle_counts() {
        for n in 2..=6 {
            let g = CompatibilityGraph::complete(n);
            let cat = enumerate_cycles(&g, caps(n)).unwrap();
            for len in 2..=n {
                let factorial: usize = (1..len).product();
                assert_eq!(cat.count_of_length(len), binom(n, len) * factorial);
            }
        }
        let cat = enumerate_cycles(&CompatibilityGraph::complete(4), caps(3)).unwrap();
        assert_eq!(cat.len(), 14);
    }

    #[test]
    fn small_packings() {
        let tri = CompatibilityGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(enumerate_cycles(&tri, caps(3)).unwrap().len(), 1);
        assert_eq!(
            max_cycle_cover_bruteforce(&tri, caps(3), false)
                .unwrap()
                .value,
            3
        );
        assert_eq!(
            max_cycle_cover_bruteforce(&tri, caps(2), false)
                .unwrap()
                .value,
            0
        );
        let two = CompatibilityGraph::from_edges(4, [(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        let cover = max_cycle_cover_bruteforce(&two, caps(2), false).unwrap();
        assert_eq!(cover.value, 4);
        cover.validate(&two, &caps(2)).unwrap();
        assert!(enumerate_cycles(&CompatibilityGraph::empty(5), caps(3))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn size_guards() {
        let g = CompatibilityGraph::empty(21);
        assert!(matches!(
            max_cycle_cover_bruteforce(&g, caps(2), false),
            Err(Error::SizeGuard(_))
        ));
        assert!(max_cycle_cover_bruteforce(&g, caps(2), true).is_ok());
        let g = CompatibilityGraph::empty(5);
        assert!(matches!(
            exhaustive_representation(&g, &ConstrainedPairs::All, 3, 0, false),
            Err(Error::SizeGuard(_))
        ));
    }

    #[test]
    fn representation_examples() {
        let tri = CompatibilityGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(
            exhaustive_representation(&tri, &ConstrainedPairs::All, 2, 0, false)
                .unwrap()
                .is_none()
        );
        assert!(
            exhaustive_representation(&tri, &ConstrainedPairs::All, 3, 0, true)
                .unwrap()
                .is_some()
        );
        let edge = CompatibilityGraph::from_edges(2, [(0, 1)]).unwrap();
        let rep = exhaustive_representation(&edge, &ConstrainedPairs::All, 1, 0, false)
            .unwrap()
            .unwrap();
        assert!(rep.donor(1).get(0) && rep.patient(0).get(0));
        // d1 = p0 = 1 forced, (d0, p1) != (1, 1)
        assert_eq!(
            count_representations(&edge, &ConstrainedPairs::All, 1, 0, false).unwrap(),
            3
        );
        assert_eq!(
            all_representations(&edge, &ConstrainedPairs::All, 1, 0, false)
                .unwrap()
                .len(),
            3
        );
    }

    #[test]
    fn complete_digraph_width_one() {
        // d_i and p_j never both set for i != j
        let g = CompatibilityGraph::complete(3);
        let reps = all_representations(&g, &ConstrainedPairs::All, 1, 0, false).unwrap();
        for rep in &reps {
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        assert!(!(rep.donor(i).get(0) && rep.patient(j).get(0)));
                    }
                }
            }
        }
        // no donor set: 8, one donor: 3 * 2, two or three donors: 3 + 1
        assert_eq!(reps.len(), 18);
    }
}

use alloc::vec::Vec;

use super::Caps;
use crate::error::Result;
use crate::types::TypeSpace;

/// A closed walk through the type digraph, stored as its lexicographically
/// smallest rotation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeWalk {
    seq: Vec<usize>,
}

impl TypeWalk {
    /// Canonicalises `seq` by rotation.
    pub fn new(seq: Vec<usize>) -> Self {
        let best = (0..seq.len())
            .min_by(|&a, &b| rotation(&seq, a).cmp(rotation(&seq, b)))
            .unwrap_or(0);
        Self {
            seq: rotation(&seq, best).copied().collect(),
        }
    }

    pub fn types(&self) -> &[usize] {
        &self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    /// Occurrences of each type, ascending by type.
    pub fn occurrences(&self) -> Vec<(usize, usize)> {
        let mut sorted = self.seq.clone();
        sorted.sort_unstable();
        let mut out: Vec<(usize, usize)> = Vec::new();
        for ty in sorted {
            match out.last_mut() {
                Some((t, c)) if *t == ty => *c += 1,
                _ => out.push((ty, 1)),
            }
        }
        out
    }

    /// Every consecutive pair, including the wrap-around, is compatible.
    pub fn is_closed(&self, ts: &TypeSpace) -> bool {
        let l = self.seq.len();
        l >= 2 && (0..l).all(|i| ts.compat(self.seq[i], self.seq[(i + 1) % l]))
    }

    pub fn altruist_count(&self, ts: &TypeSpace) -> usize {
        self.seq.iter().filter(|&&ty| ts.is_altruist(ty)).count()
    }
}

fn rotation(seq: &[usize], start: usize) -> impl Iterator<Item = &usize> + Clone {
    seq[start..].iter().chain(&seq[..start])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeWalkSet {
    pub caps: Caps,
    pub walks: Vec<TypeWalk>,
}

impl TypeWalkSet {
    pub fn len(&self) -> usize {
        self.walks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }
}

/// All rotation-canonical closed type walks of admissible length, in
/// lexicographic order.
pub fn enumerate_type_walks(ts: &TypeSpace, caps: Caps) -> Result<TypeWalkSet> {
    let mut walks = Vec::new();
    let max_len = caps.max_len();
    let mut seq = Vec::with_capacity(max_len);
    for start in 0..ts.len() {
        seq.clear();
        seq.push(start);
        extend(ts, &caps, max_len, &mut seq, &mut walks);
    }
    walks.sort();
    Ok(TypeWalkSet { caps, walks })
}

fn extend(
    ts: &TypeSpace,
    caps: &Caps,
    max_len: usize,
    seq: &mut Vec<usize>,
    out: &mut Vec<TypeWalk>,
) {
    let start = seq[0];
    let last = *seq.last().expect("non-empty");
    let altruists = seq.iter().filter(|&&ty| ts.is_altruist(ty)).count();
    if altruists > 1 {
        return;
    }
    if seq.len() >= 2 && ts.compat(last, start) && caps.admits(seq.len(), altruists) {
        let is_min =
            (1..seq.len()).all(|r| rotation(seq, r).cmp(seq.iter()) != core::cmp::Ordering::Less);
        if is_min {
            out.push(TypeWalk { seq: seq.clone() });
        }
    }
    if seq.len() == max_len {
        return;
    }
    for next in start..ts.len() {
        if ts.compat(last, next) {
            seq.push(next);
            extend(ts, caps, max_len, seq, out);
            seq.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn space(compat: Vec<Vec<bool>>) -> TypeSpace {
        let m = compat.len();
        TypeSpace::new(vec![3; m], compat, vec![false; m]).unwrap()
    }

    #[test]
    fn canonical_rotation() {
        assert_eq!(TypeWalk::new(vec![2, 0, 1]).types(), &[0, 1, 2]);
        assert_eq!(TypeWalk::new(vec![1, 0, 1, 0]).types(), &[0, 1, 0, 1]);
        assert_eq!(TypeWalk::new(vec![1, 1, 0]), TypeWalk::new(vec![0, 1, 1]));
        assert_eq!(
            TypeWalk::new(vec![0, 2, 1, 1]).occurrences(),
            vec![(0, 1), (1, 2), (2, 1)]
        );
    }

    #[test]
    fn bipartite_pair_gives_single_walk() {
        let ts = space(vec![vec![false, true], vec![true, false]]);
        let set = enumerate_type_walks(&ts, Caps::new(3).unwrap()).unwrap();
        assert_eq!(set.walks, vec![TypeWalk::new(vec![0, 1])]);
    }

    #[test]
    fn self_compatible_single_type() {
        let ts = space(vec![vec![true]]);
        let set = enumerate_type_walks(&ts, Caps::new(3).unwrap()).unwrap();
        assert_eq!(
            set.walks,
            vec![TypeWalk::new(vec![0, 0]), TypeWalk::new(vec![0, 0, 0])]
        );
    }

    #[test]
    fn one_altruist_per_walk() {
        let ts = TypeSpace::new(
            vec![2, 1, 1],
            vec![vec![true; 3]; 3],
            vec![false, true, true],
        )
        .unwrap();
        let set = enumerate_type_walks(&ts, Caps::new(3).unwrap()).unwrap();
        assert!(set.walks.iter().all(|w| w.altruist_count(&ts) <= 1));
        assert!(set.walks.contains(&TypeWalk::new(vec![0, 1])));
        assert!(!set.walks.contains(&TypeWalk::new(vec![1, 2])));
    }

    #[test]
    fn chain_cap_applies_to_altruist_walks() {
        let ts = TypeSpace::new(vec![3, 1], vec![vec![true; 2]; 2], vec![false, true]).unwrap();
        let set = enumerate_type_walks(&ts, Caps::with_chain_cap(2, 4).unwrap()).unwrap();
        assert!(set.walks.contains(&TypeWalk::new(vec![0, 0, 0, 1])));
        assert!(!set.walks.contains(&TypeWalk::new(vec![0, 0, 0])));
    }
}

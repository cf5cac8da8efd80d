use alloc::vec;
use alloc::vec::Vec;

use super::clear::MultiplicityVector;
use super::walks::TypeWalkSet;
use super::CycleCover;
use crate::error::{Error, Result};
use crate::graph::CompatibilityGraph;
use crate::types::TypeSpace;

/// Turns walk multiplicities into vertex cycles of `g`, taking members of
/// each type in ascending index order. The result is validated against `g`.
pub fn realize_cover(
    g: &CompatibilityGraph,
    ts: &TypeSpace,
    walks: &TypeWalkSet,
    m: &MultiplicityVector,
) -> Result<CycleCover> {
    if ts.n() != g.n() {
        return Err(Error::VertexCountMismatch {
            expected: g.n(),
            found: ts.n(),
        });
    }
    if m.0.len() != walks.len() {
        return Err(Error::Internal(
            "multiplicity vector does not match the walk set".into(),
        ));
    }
    let usage = m.usage(walks, ts.len());
    for (ty, (&need, &have)) in usage.iter().zip(ts.counts()).enumerate() {
        if need > have {
            return Err(Error::CapacityExceeded { ty, need, have });
        }
    }
    let members = ts.members();
    let mut next = vec![0usize; ts.len()];
    let mut cycles = Vec::new();
    for (w, copies) in m.support() {
        for _ in 0..copies {
            let cycle = walks.walks[w]
                .types()
                .iter()
                .map(|&ty| {
                    let v = members[ty][next[ty]];
                    next[ty] += 1;
                    v
                })
                .collect();
            cycles.push(cycle);
        }
    }
    let cover = CycleCover::new(cycles);
    cover.validate(g, &walks.caps)?;
    Ok(cover)
}

//! Type spaces: partitions of the vertex set into interchangeable classes
//! together with a compatibility table over ordered pairs of classes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::graph::{AttributeRepresentation, CompatibilityGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeInfo {
    /// Defining `(donor, patient)` vectors for attribute-derived types.
    pub vectors: Option<(BitVector, BitVector)>,
    pub altruist: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeSpace {
    types: Vec<TypeInfo>,
    counts: Vec<usize>,
    compat: Vec<bool>,
    vertex_type: Vec<usize>,
}

/// Where to read types from.
#[derive(Clone, Copy, Debug)]
pub enum TypeSource<'a> {
    /// Group vertices by identical `(donor, patient)` vectors.
    Attributes(&'a AttributeRepresentation),
    /// Group vertices by identical in/out neighbourhoods.
    Graph(&'a CompatibilityGraph),
}

pub fn extract_type_space(source: TypeSource<'_>) -> Result<TypeSpace> {
    match source {
        TypeSource::Attributes(rep) => Ok(TypeSpace::from_attributes(rep)),
        TypeSource::Graph(g) => TypeSpace::from_graph(g),
    }
}

impl TypeSpace {
    /// A synthetic type space. Vertices are laid out type by type: the
    /// first `counts[0]` vertices have type 0, and so on.
    pub fn new(counts: Vec<usize>, compat: Vec<Vec<bool>>, altruist: Vec<bool>) -> Result<Self> {
        let m = counts.len();
        if compat.len() != m || compat.iter().any(|row| row.len() != m) || altruist.len() != m {
            return Err(Error::InvalidTypeSpace(format!(
                "{m} types need an {m}x{m} compatibility table and {m} altruist flags"
            )));
        }
        let vertex_type = counts
            .iter()
            .enumerate()
            .flat_map(|(ty, &c)| core::iter::repeat_n(ty, c))
            .collect();
        Ok(Self {
            types: altruist
                .into_iter()
                .map(|altruist| TypeInfo {
                    vectors: None,
                    altruist,
                })
                .collect(),
            counts,
            compat: compat.into_iter().flatten().collect(),
            vertex_type,
        })
    }

    pub fn from_attributes(rep: &AttributeRepresentation) -> Self {
        let mut index: BTreeMap<(&BitVector, &BitVector), usize> = BTreeMap::new();
        let mut reps: Vec<(BitVector, BitVector)> = Vec::new();
        let mut counts = Vec::new();
        let mut vertex_type = Vec::with_capacity(rep.n());
        for v in 0..rep.n() {
            let key = (rep.donor(v), rep.patient(v));
            let ty = *index.entry(key).or_insert_with(|| {
                reps.push((key.0.clone(), key.1.clone()));
                counts.push(0);
                reps.len() - 1
            });
            counts[ty] += 1;
            vertex_type.push(ty);
        }
        let m = reps.len();
        let mut compat = vec![false; m * m];
        for a in 0..m {
            for b in 0..m {
                compat[a * m + b] = reps[a].0.dot(&reps[b].1) <= rep.t();
            }
        }
        Self {
            types: reps
                .into_iter()
                .map(|v| TypeInfo {
                    vectors: Some(v),
                    altruist: false,
                })
                .collect(),
            counts,
            compat,
            vertex_type,
        }
    }

    /// Neighbourhood classes. Two vertices share a class when their open
    /// neighbourhoods agree (no edges between them) or their closed
    /// neighbourhoods agree (edges both ways); altruist status must match.
    pub fn from_graph(g: &CompatibilityGraph) -> Result<Self> {
        let n = g.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for closed in [false, true] {
            let mut seen: BTreeMap<(BitVector, BitVector, bool), usize> = BTreeMap::new();
            for v in 0..n {
                let mut out = g.out_row(v).clone();
                let mut inc = g.in_row(v).clone();
                if closed {
                    out.set(v, true);
                    inc.set(v, true);
                }
                match seen.get(&(out.clone(), inc.clone(), g.is_altruist(v))) {
                    Some(&w) => {
                        let (a, b) = (find(&mut parent, v), find(&mut parent, w));
                        parent[a.max(b)] = a.min(b);
                    }
                    None => {
                        seen.insert((out, inc, g.is_altruist(v)), v);
                    }
                }
            }
        }
        let classes: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
        Self::from_partition(g, &classes)
    }

    /// Builds a type space from an explicit vertex partition (`labels[v]` is
    /// any class label), rejecting partitions whose classes are not
    /// interchangeable in `g`.
    pub fn from_partition(g: &CompatibilityGraph, labels: &[usize]) -> Result<Self> {
        let n = g.n();
        if labels.len() != n {
            return Err(Error::VertexCountMismatch {
                expected: n,
                found: labels.len(),
            });
        }
        let mut index = BTreeMap::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut vertex_type = Vec::with_capacity(n);
        for (v, label) in labels.iter().enumerate() {
            let ty = *index.entry(label).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            members[ty].push(v);
            vertex_type.push(ty);
        }
        let m = members.len();
        let mut compat = vec![false; m * m];
        for a in 0..m {
            for b in 0..m {
                let ra = members[a][0];
                compat[a * m + b] = if a == b {
                    members[a].len() >= 2 && g.has_edge(ra, members[a][1])
                } else {
                    g.has_edge(ra, members[b][0])
                };
            }
        }
        for a in 0..m {
            if members[a]
                .iter()
                .any(|&v| g.is_altruist(v) != g.is_altruist(members[a][0]))
            {
                return Err(Error::InvalidTypeSpace(format!(
                    "type {a} mixes altruists and pairs"
                )));
            }
        }
        for u in 0..n {
            for v in 0..n {
                if u != v && g.has_edge(u, v) != compat[vertex_type[u] * m + vertex_type[v]] {
                    return Err(Error::InconsistentType { a: u, b: v });
                }
            }
        }
        Ok(Self {
            types: members
                .iter()
                .map(|ms| TypeInfo {
                    vectors: None,
                    altruist: g.is_altruist(ms[0]),
                })
                .collect(),
            counts: members.iter().map(Vec::len).collect(),
            compat,
            vertex_type,
        })
    }

    /// Number of types.
    #[inline]
    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.vertex_type.len()
    }

    #[inline]
    pub fn count(&self, ty: usize) -> usize {
        self.counts[ty]
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    #[inline]
    pub fn compat(&self, a: usize, b: usize) -> bool {
        self.compat[a * self.len() + b]
    }

    pub fn info(&self, ty: usize) -> &TypeInfo {
        &self.types[ty]
    }

    pub fn is_altruist(&self, ty: usize) -> bool {
        self.types[ty].altruist
    }

    pub fn vertex_type(&self, v: usize) -> usize {
        self.vertex_type[v]
    }

    pub fn vertex_types(&self) -> &[usize] {
        &self.vertex_type
    }

    /// Vertices of each type, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for (v, &ty) in self.vertex_type.iter().enumerate() {
            out[ty].push(v);
        }
        out
    }

    /// Same types and table with a different count profile. Vertices are
    /// relaid type by type.
    pub fn with_counts(&self, counts: Vec<usize>) -> Result<Self> {
        if counts.len() != self.len() {
            return Err(Error::InvalidTypeSpace(format!(
                "expected {} counts, got {}",
                self.len(),
                counts.len()
            )));
        }
        let vertex_type = counts
            .iter()
            .enumerate()
            .flat_map(|(ty, &c)| core::iter::repeat_n(ty, c))
            .collect();
        Ok(Self {
            types: self.types.clone(),
            counts,
            compat: self.compat.clone(),
            vertex_type,
        })
    }

    /// Same type table with vertices reassigned; `vertex_type[v]` is the new
    /// type of vertex `v`.
    pub fn with_vertex_types(&self, vertex_type: Vec<usize>) -> Result<Self> {
        let mut counts = vec![0; self.len()];
        for &ty in &vertex_type {
            if ty >= self.len() {
                return Err(Error::InvalidTypeSpace(format!("unknown type {ty}")));
            }
            counts[ty] += 1;
        }
        Ok(Self {
            types: self.types.clone(),
            counts,
            compat: self.compat.clone(),
            vertex_type,
        })
    }

    /// The graph induced by the type table on this space's vertices.
    pub fn induced_graph(&self) -> CompatibilityGraph {
        let n = self.n();
        let mut g = CompatibilityGraph::empty(n);
        for u in 0..n {
            for v in 0..n {
                if u != v && self.compat(self.vertex_type[u], self.vertex_type[v]) {
                    g.add_edge(u, v).expect("indices in range");
                }
            }
            if self.is_altruist(self.vertex_type[u]) {
                g.set_altruist(u, true).expect("index in range");
            }
        }
        g
    }
}

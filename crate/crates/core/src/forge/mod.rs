//! Instance generators: random attribute pools, blood-type pools, the
//! width lower-bound family, the gadget `G_k` and the 3SAT reduction.
//!
//! Every generator is a pure function of its parameters and seed.

mod formula;
mod gadget;
mod reduction;

pub use formula::ThreeSatFormula;
pub use gadget::{gen_gadget, pair_index, Gadget};
pub use reduction::{decode_assignment, reduce_3sat, ReductionInstance, Role};

use alloc::vec;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::graph::{build_graph_from_attributes, AttributeRepresentation, CompatibilityGraph};

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    /// Probability that donor bit `q` is set, one entry per bit.
    pub donor_p: Vec<f64>,
    pub patient_p: Vec<f64>,
    pub altruist_fraction: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    /// Defaults: `k = 10`, `t = 0`, donor bits 0.1, patient bits 0.2,
    /// five percent altruists.
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            k: 10,
            t: 0,
            donor_p: vec![0.1; 10],
            patient_p: vec![0.2; 10],
            altruist_fraction: 0.05,
            seed,
        }
    }

    /// Resizes to width `k` with the same probability on every bit.
    pub fn with_uniform_bits(mut self, k: usize, donor: f64, patient: f64) -> Self {
        self.k = k;
        self.donor_p = vec![donor; k];
        self.patient_p = vec![patient; k];
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::ZeroWidth);
        }
        if self.t >= self.k {
            return Err(Error::ThresholdTooLarge {
                k: self.k,
                t: self.t,
            });
        }
        if self.donor_p.len() != self.k {
            return Err(Error::WidthMismatch {
                left: self.k,
                right: self.donor_p.len(),
            });
        }
        if self.patient_p.len() != self.k {
            return Err(Error::WidthMismatch {
                left: self.k,
                right: self.patient_p.len(),
            });
        }
        for &p in self
            .donor_p
            .iter()
            .chain(&self.patient_p)
            .chain([&self.altruist_fraction])
        {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
        }
        Ok(())
    }
}

fn sample_vector(rng: &mut ChaCha8Rng, probs: &[f64]) -> BitVector {
    BitVector::from_bits(&probs.iter().map(|&p| rng.gen_bool(p)).collect::<Vec<_>>())
}

fn flag_altruists(g: &mut CompatibilityGraph, fraction: f64, rng: &mut ChaCha8Rng) {
    let n = g.n();
    let count = ((fraction * n as f64) + 0.5) as usize;
    let mut chosen = sample(rng, n, count.min(n)).into_vec();
    chosen.sort_unstable();
    for v in chosen {
        g.set_altruist(v, true).expect("index in range");
    }
}

/// Independent bits per vertex, graph built from the vectors, altruists
/// chosen uniformly (the fraction of `n`, rounded).
pub fn gen_attribute_pool(
    cfg: &GeneratorConfig,
) -> Result<(AttributeRepresentation, CompatibilityGraph)> {
    cfg.validate()?;
    let mut rng = rng(cfg.seed);
    let mut donor = Vec::with_capacity(cfg.n);
    let mut patient = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        donor.push(sample_vector(&mut rng, &cfg.donor_p));
        patient.push(sample_vector(&mut rng, &cfg.patient_p));
    }
    let rep = AttributeRepresentation::new(cfg.k, cfg.t, donor, patient)?;
    let mut g = build_graph_from_attributes(&rep);
    flag_altruists(&mut g, cfg.altruist_fraction, &mut rng);
    Ok((rep, g))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BloodType {
    O,
    A,
    B,
    AB,
}

impl BloodType {
    pub const ALL: [BloodType; 4] = [BloodType::O, BloodType::A, BloodType::B, BloodType::AB];

    /// Antigens present: `(has A, has B)`.
    pub fn donor_vector(self) -> BitVector {
        let (a, b) = self.antigens();
        BitVector::from_bits(&[a, b])
    }

    /// Antigens the patient's blood rejects: `(no A, no B)`.
    pub fn patient_vector(self) -> BitVector {
        let (a, b) = self.antigens();
        BitVector::from_bits(&[!a, !b])
    }

    fn antigens(self) -> (bool, bool) {
        match self {
            BloodType::O => (false, false),
            BloodType::A => (true, false),
            BloodType::B => (false, true),
            BloodType::AB => (true, true),
        }
    }
}

/// Width-2, threshold-0 pool with donor and patient blood types drawn from
/// the given distributions over `[O, A, B, AB]`.
pub fn gen_blood_pool(
    n: usize,
    donor_dist: [f64; 4],
    patient_dist: [f64; 4],
    seed: u64,
) -> Result<(AttributeRepresentation, CompatibilityGraph)> {
    for dist in [&donor_dist, &patient_dist] {
        if let Some(&p) = dist.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidProbability(p));
        }
        let total: f64 = dist.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidProbability(total));
        }
    }
    let donor_ix = WeightedIndex::new(donor_dist).map_err(|_| Error::InvalidProbability(0.0))?;
    let patient_ix =
        WeightedIndex::new(patient_dist).map_err(|_| Error::InvalidProbability(0.0))?;
    let mut rng = rng(seed);
    let mut donor = Vec::with_capacity(n);
    let mut patient = Vec::with_capacity(n);
    for _ in 0..n {
        donor.push(BloodType::ALL[donor_ix.sample(&mut rng)].donor_vector());
        patient.push(BloodType::ALL[patient_ix.sample(&mut rng)].patient_vector());
    }
    let rep = AttributeRepresentation::new(2, 0, donor, patient)?;
    let g = build_graph_from_attributes(&rep);
    Ok((rep, g))
}

/// Vertex `i` has an edge to every vertex except itself and `i - 1`
/// (mod `n`). Not `(k, 0)`-representable for any `k < n`.
pub fn gen_witness_graph(n: usize) -> Result<CompatibilityGraph> {
    if n < 3 {
        return Err(Error::SizeGuard(alloc::format!(
            "witness family needs n >= 3, got {n}"
        )));
    }
    let mut g = CompatibilityGraph::empty(n);
    for i in 0..n {
        let skip = (i + n - 1) % n;
        for j in 0..n {
            if j != i && j != skip {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{verify_representation, ConstrainedPairs};

    #[test]
    fn probability_extremes() {
        let cfg = GeneratorConfig::new(6, 1).with_uniform_bits(4, 0.0, 0.0);
        let (_, g) = gen_attribute_pool(&cfg).unwrap();
        assert_eq!(g.edge_count(), 30);
        let cfg = GeneratorConfig::new(6, 1).with_uniform_bits(4, 1.0, 1.0);
        let (_, g) = gen_attribute_pool(&cfg).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn pools_are_deterministic() {
        let cfg = GeneratorConfig::new(40, 99);
        assert_eq!(
            gen_attribute_pool(&cfg).unwrap(),
            gen_attribute_pool(&cfg).unwrap()
        );
        let (_, g) = gen_attribute_pool(&cfg).unwrap();
        assert_eq!(g.altruist_count(), 2);
        let other = GeneratorConfig { seed: 100, ..cfg };
        assert_ne!(
            gen_attribute_pool(&other).unwrap().0,
            gen_attribute_pool(&GeneratorConfig::new(40, 99)).unwrap().0
        );
    }

    #[test]
    fn invalid_probability_rejected() {
        let mut cfg = GeneratorConfig::new(3, 0);
        cfg.donor_p[2] = 1.5;
        assert_eq!(
            gen_attribute_pool(&cfg),
            Err(Error::InvalidProbability(1.5))
        );
    }

    #[test]
    fn blood_types() {
        use BloodType::*;
        let compatible =
            |d: BloodType, p: BloodType| d.donor_vector().dot(&p.patient_vector()) == 0;
        for p in BloodType::ALL {
            assert!(compatible(O, p));
            assert!(compatible(p, AB));
            assert_eq!(compatible(AB, p), p == AB);
            assert_eq!(compatible(p, O), p == O);
        }
        assert!(compatible(A, A) && !compatible(A, B));
        let (rep, g) = gen_blood_pool(40, [0.25; 4], [0.25; 4], 7).unwrap();
        assert!(
            verify_representation(&g, &rep, &ConstrainedPairs::All)
                .unwrap()
                .ok
        );
        assert!(gen_blood_pool(4, [0.5; 4], [0.25; 4], 7).is_err());
    }

    #[test]
    fn witness_family_shape() {
        let g = gen_witness_graph(3).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 0)]);
        let g = gen_witness_graph(5).unwrap();
        assert!((0..5).all(|i| g.out_degree(i) == 3));
        assert!(gen_witness_graph(2).is_err());
    }
}

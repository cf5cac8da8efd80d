//! Experiment sweeps: satisfiability against width, minimum width per
//! graph, and matched fraction against threshold. Instances run on a rayon
//! pool; rows are sorted before they are written.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use typed_exchange_core::clearing::{
    clear_by_types_weighted, enumerate_type_walks, model_altruists, realize_cover, Caps, CycleCover,
};
use typed_exchange_core::forge::{gen_attribute_pool, GeneratorConfig};
use typed_exchange_core::represent::{constructive_width, min_k, solve, RepresentationProblem};
use typed_exchange_core::{
    build_graph_from_attributes, AttributeRepresentation, CompatibilityGraph, TypeSpace,
};

use crate::budget::Deadline;
use crate::formats::{parse_attributes, parse_edge_list, AttributeFile};

pub const CSV_HEADER: &str = "# typed-exchange csv v1";
pub const SEED_ENV: &str = "TYPED_EXCHANGE_SEED";

/// The seed to use: `TYPED_EXCHANGE_SEED` when set, else `fallback`.
pub fn effective_seed(fallback: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .with_context(|| format!("{SEED_ENV}={s} is not a u64")),
        Err(_) => Ok(fallback),
    }
}

/// Solver limits applied to every individual solve of a sweep.
#[derive(Clone, Copy, Debug, Default)]
pub struct SweepBudget {
    pub ms: Option<u64>,
    pub conflicts: Option<u64>,
    /// Write `wall_ms` as 0 so output depends only on inputs.
    pub deterministic: bool,
}

impl SweepBudget {
    fn wall_ms(&self, start: Instant) -> u64 {
        if self.deterministic {
            0
        } else {
            start.elapsed().as_millis() as u64
        }
    }
}

/// Runs `f` on a pool of `jobs` threads (rayon's default when `None`).
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        Some(j) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()?
            .install(f)),
        None => Ok(f()),
    }
}

#[derive(Clone, Debug)]
pub struct GraphInstance {
    pub id: String,
    pub seed: Option<u64>,
    pub graph: CompatibilityGraph,
}

/// A graph file of either supported kind.
#[derive(Clone, Debug)]
pub enum GraphFile {
    Edges(CompatibilityGraph),
    Attributes(AttributeFile),
}

impl GraphFile {
    pub fn graph(&self) -> CompatibilityGraph {
        match self {
            GraphFile::Edges(g) => g.clone(),
            GraphFile::Attributes(a) => a.graph(),
        }
    }
}

/// Reads an edge list or attribute file, telling them apart by the
/// header's field count.
pub fn read_graph_file(path: &Path) -> Result<GraphFile> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let fields = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .map_or(0, |l| l.split_whitespace().count());
    let file = if fields == 3 {
        parse_attributes(&text).map(GraphFile::Attributes)
    } else {
        parse_edge_list(&text).map(GraphFile::Edges)
    };
    file.with_context(|| format!("parsing {}", path.display()))
}

pub fn load_graph(path: &Path) -> Result<CompatibilityGraph> {
    Ok(read_graph_file(path)?.graph())
}

/// Files named directly plus the `.edges` / `.attr` files of named
/// directories, sorted by path within each directory.
pub fn load_instances(paths: &[PathBuf]) -> Result<Vec<GraphInstance>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut inside: Vec<PathBuf> = std::fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "edges" || x == "attr"))
                .collect();
            inside.sort();
            files.extend(inside);
        } else {
            files.push(p.clone());
        }
    }
    files
        .iter()
        .map(|f| {
            Ok(GraphInstance {
                id: f.file_stem().map_or_else(
                    || f.display().to_string(),
                    |s| s.to_string_lossy().into_owned(),
                ),
                seed: None,
                graph: load_graph(f)?,
            })
        })
        .collect()
}

/// `count` pools from `base` with seeds `seed, seed + 1, ...`.
pub fn generate_instances(base: &GeneratorConfig, count: usize) -> Result<Vec<GraphInstance>> {
    (0..count)
        .map(|i| {
            let cfg = GeneratorConfig {
                seed: base.seed.wrapping_add(i as u64),
                ..base.clone()
            };
            let (_, graph) = gen_attribute_pool(&cfg)?;
            Ok(GraphInstance {
                id: i.to_string(),
                seed: Some(cfg.seed),
                graph,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepKRow {
    pub sweep: &'static str,
    pub instance: String,
    pub seed: Option<u64>,
    pub n: usize,
    pub k: usize,
    pub k_over_n: f64,
    pub t: usize,
    /// Raw solver status: SAT, UNSAT or TIMEOUT.
    pub status: &'static str,
    /// 1 for SAT; timeouts count as 0.
    pub sat: u8,
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub wall_ms: u64,
}

/// One row per instance and width `k > t` of `ks`.
pub fn sweep_k(
    instances: &[GraphInstance],
    t: usize,
    ks: &[usize],
    budget: SweepBudget,
) -> Result<Vec<SweepKRow>> {
    let per_instance: Vec<Result<Vec<SweepKRow>>> = instances
        .par_iter()
        .map(|inst| {
            let mut rows = Vec::new();
            for &k in ks.iter().filter(|&&k| k > t) {
                let problem = RepresentationProblem::full(inst.graph.clone(), k, t)?;
                let deadline = Deadline::after_ms(budget.ms);
                let start = Instant::now();
                let out = solve(&problem, &deadline.budget(budget.conflicts))?;
                let n = inst.graph.n();
                rows.push(SweepKRow {
                    sweep: "sweep-k",
                    instance: inst.id.clone(),
                    seed: inst.seed,
                    n,
                    k,
                    k_over_n: if n == 0 { 0.0 } else { k as f64 / n as f64 },
                    t,
                    status: out.status.label(),
                    sat: u8::from(out.status.is_sat()),
                    decisions: out.stats.decisions,
                    conflicts: out.stats.conflicts,
                    propagations: out.stats.propagations,
                    wall_ms: budget.wall_ms(start),
                });
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_instance {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| {
        natural_key(&a.instance)
            .cmp(&natural_key(&b.instance))
            .then(a.k.cmp(&b.k))
    });
    Ok(rows)
}

/// Digit runs compare as numbers, so `pool_n8` sorts before `pool_n10`.
fn natural_key(id: &str) -> Vec<(bool, u64, &str)> {
    let mut out = Vec::new();
    let mut rest = id;
    while let Some(c) = rest.chars().next() {
        let digit = c.is_ascii_digit();
        let end = rest
            .find(|ch: char| ch.is_ascii_digit() != digit)
            .unwrap_or(rest.len());
        let (run, tail) = rest.split_at(end);
        out.push(if digit {
            (false, run.parse().unwrap_or(u64::MAX), run)
        } else {
            (true, 0, run)
        });
        rest = tail;
    }
    out
}

/// Instances whose counted satisfiability drops as `k` grows, with the
/// offending widths. Rows must be sorted by instance then `k`.
pub fn monotonicity_violations(rows: &[SweepKRow]) -> Vec<(String, usize, usize)> {
    let mut out = Vec::new();
    for w in rows.windows(2) {
        if w[0].instance == w[1].instance && w[0].sat > w[1].sat {
            out.push((w[0].instance.clone(), w[0].k, w[1].k));
        }
    }
    out
}

/// Fraction of instances counted SAT at each `k`, in increasing `k`.
pub fn fraction_sat_by_k(rows: &[SweepKRow]) -> Vec<(usize, f64)> {
    let mut ks: Vec<usize> = rows.iter().map(|r| r.k).collect();
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter()
        .map(|k| {
            let at: Vec<&SweepKRow> = rows.iter().filter(|r| r.k == k).collect();
            let sat = at.iter().filter(|r| r.sat == 1).count();
            (k, sat as f64 / at.len() as f64)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinKRow {
    pub sweep: &'static str,
    pub instance: String,
    pub n: usize,
    pub t: usize,
    pub k_min: usize,
    /// A width below `k_min` timed out, so `k_min` is only an upper bound.
    pub conservative: bool,
    /// Constructive width `n'`; at `t > 0` the guaranteed bound is `n' + t`.
    pub n_prime: usize,
    /// Widths solved, as `k:STATUS` separated by `;`.
    pub steps: String,
    pub conflicts: u64,
    pub wall_ms: u64,
}

pub fn sweep_min_k(
    instances: &[GraphInstance],
    t: usize,
    budget: SweepBudget,
) -> Result<Vec<MinKRow>> {
    let per: Vec<Result<MinKRow>> = instances
        .par_iter()
        .map(|inst| {
            let deadline = Deadline::after_ms(budget.ms);
            let start = Instant::now();
            let res = min_k(&inst.graph, t, &deadline.budget(budget.conflicts))?;
            let steps: Vec<String> = res.steps.iter().map(|(k, s)| format!("{k}:{s}")).collect();
            Ok(MinKRow {
                sweep: "min-k",
                instance: inst.id.clone(),
                n: inst.graph.n(),
                t,
                k_min: res.k,
                conservative: res.conservative,
                n_prime: constructive_width(&inst.graph),
                steps: steps.join(";"),
                conflicts: res.stats.conflicts,
                wall_ms: budget.wall_ms(start),
            })
        })
        .collect();
    let mut rows = per.into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| natural_key(&a.instance).cmp(&natural_key(&b.instance)));
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub sweep: &'static str,
    pub instance: usize,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    #[serde(rename = "L")]
    pub l: usize,
    /// Non-altruist vertices matched.
    pub matched: usize,
    /// `matched` over the number of non-altruist vertices.
    pub fraction: f64,
    pub wall_ms: u64,
}

/// The generated graph re-read at threshold `t`, altruists kept.
pub fn graph_at_threshold(
    rep: &AttributeRepresentation,
    altruists: &[usize],
    t: usize,
) -> CompatibilityGraph {
    let mut g = build_graph_from_attributes(&rep.with_threshold(t));
    for &a in altruists {
        g.set_altruist(a, true).expect("altruist in range");
    }
    g
}

/// Clears `g` (altruists modelled as chain heads) maximising matched
/// non-altruist vertices. Returns that count and the realized cover of the
/// modelled graph.
pub fn clear_pairs(g: &CompatibilityGraph, cap: usize) -> Result<(usize, CycleCover)> {
    let modelled = model_altruists(g);
    let ts = TypeSpace::from_graph(&modelled)?;
    let walks = enumerate_type_walks(&ts, Caps::new(cap)?)?;
    let weights: Vec<u64> = (0..ts.len())
        .map(|ty| u64::from(!ts.is_altruist(ty)))
        .collect();
    let clearing = clear_by_types_weighted(&ts, &walks, &weights)?;
    let cover = realize_cover(&modelled, &ts, &walks, &clearing.multiplicities)?;
    Ok((clearing.value as usize, cover))
}

#[derive(Clone, Debug)]
pub struct ThresholdSweep {
    pub base: GeneratorConfig,
    pub sizes: Vec<usize>,
    pub instances: usize,
    /// Largest threshold; defaults to the width `k`.
    pub t_max: Option<usize>,
    pub cap: usize,
}

pub fn sweep_threshold(plan: &ThresholdSweep, budget: SweepBudget) -> Result<Vec<ThresholdRow>> {
    let t_max = plan.t_max.unwrap_or(plan.base.k);
    let jobs: Vec<(usize, usize)> = plan
        .sizes
        .iter()
        .flat_map(|&n| (0..plan.instances).map(move |i| (n, i)))
        .collect();
    let per: Vec<Result<Vec<ThresholdRow>>> = jobs
        .par_iter()
        .map(|&(n, i)| {
            let cfg = GeneratorConfig {
                n,
                seed: plan.base.seed.wrapping_add(i as u64),
                ..plan.base.clone()
            };
            let (rep, g0) = gen_attribute_pool(&cfg)?;
            let altruists = g0.altruists();
            let pairs = n - altruists.len();
            let mut rows = Vec::new();
            for t in 0..=t_max {
                let start = Instant::now();
                let g = graph_at_threshold(&rep, &altruists, t);
                let (matched, _) = clear_pairs(&g, plan.cap)?;
                rows.push(ThresholdRow {
                    sweep: "sweep-threshold",
                    instance: i,
                    seed: cfg.seed,
                    n,
                    k: cfg.k,
                    t,
                    l: plan.cap,
                    matched,
                    fraction: if pairs == 0 {
                        0.0
                    } else {
                        matched as f64 / pairs as f64
                    },
                    wall_ms: budget.wall_ms(start),
                });
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per {
        rows.extend(r?);
    }
    rows.sort_by_key(|r| (r.n, r.instance, r.t));
    Ok(rows)
}

/// `(instance, n, t)` where the matched fraction drops from `t - 1`.
/// Rows must be sorted by size, instance then `t`.
pub fn threshold_drops(rows: &[ThresholdRow]) -> Vec<(usize, usize, usize)> {
    rows.windows(2)
        .filter(|w| {
            w[0].n == w[1].n && w[0].instance == w[1].instance && w[1].matched < w[0].matched
        })
        .map(|w| (w[1].instance, w[1].n, w[1].t))
        .collect()
}

/// Rows as CSV with the schema comment line first.
pub fn to_csv<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?;
    Ok(format!("{CSV_HEADER}\n{body}"))
}

#[cfg(test)]
mod tests {
    use super::natural_key;

    #[test]
    fn natural_order() {
        let mut ids = vec![
            "pool_n10_s1",
            "pool_n8_s2",
            "7",
            "pool_n8_s10",
            "12",
            "pool_n8_s1",
        ];
        ids.sort_by(|a, b| natural_key(a).cmp(&natural_key(b)));
        assert_eq!(
            ids,
            [
                "7",
                "12",
                "pool_n8_s1",
                "pool_n8_s2",
                "pool_n8_s10",
                "pool_n10_s1"
            ]
        );
    }
}

//! The `typed-exchange` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use typed_exchange_core::clearing::{
    apply_flip_plan, clear_by_types, enumerate_type_walks, flip_and_clear, model_altruists,
    realize_cover, Caps,
};
use typed_exchange_core::forge::{
    decode_assignment, gen_attribute_pool, gen_blood_pool, gen_gadget, gen_witness_graph,
    reduce_3sat, GeneratorConfig, ThreeSatFormula,
};
use typed_exchange_core::oracle::{max_cycle_cover_bruteforce, MAX_COVER_VERTICES};
use typed_exchange_core::represent::{
    decode_external_model, encode, min_violations, solve, RepresentationProblem, SolveStatus,
};
use typed_exchange_core::{ConstrainedPairs, TypeSpace};

use crate::budget::Deadline;
use crate::formats::{
    parse_3sat, parse_costs, parse_model, parse_pairs, write_3sat, write_atomic, write_attributes,
    write_dimacs, write_edge_list, write_pairs, write_varmap, CoverReport,
};
use crate::sweep::{
    effective_seed, generate_instances, load_graph, load_instances, read_graph_file, sweep_k,
    sweep_min_k, sweep_threshold, to_csv, with_jobs, GraphFile, SweepBudget, ThresholdSweep,
};

/// Process exit codes.
pub mod exit {
    pub const SAT: u8 = 0;
    pub const UNSAT: u8 = 1;
    pub const TIMEOUT: u8 = 2;
    pub const PARSE: u8 = 3;
    pub const FAILURE: u8 = 4;
    pub const ORACLE_MISMATCH: u8 = 5;
}

/// The exact oracle disagreed with the type-space clearing.
#[derive(Debug, Error)]
#[error("oracle mismatch: type clearing matched {fast}, exhaustive packing matched {exact}")]
pub struct OracleMismatch {
    pub fast: usize,
    pub exact: usize,
}

/// Maps an error to its exit code.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<crate::formats::ParseError>().is_some() {
        exit::PARSE
    } else if err.downcast_ref::<OracleMismatch>().is_some() {
        exit::ORACLE_MISMATCH
    } else {
        exit::FAILURE
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "typed-exchange",
    version,
    about = "Attribute representations and type-space clearing for exchange graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct BudgetArgs {
    /// Wall-clock limit per solve, in milliseconds.
    #[arg(long)]
    pub budget_ms: Option<u64>,
    /// Conflict limit per solve; reproducible across runs.
    #[arg(long)]
    pub budget_conflicts: Option<u64>,
}

#[derive(Debug, Args, Clone)]
pub struct PoolArgs {
    /// Attribute width of generated pools.
    #[arg(long, default_value_t = 10)]
    pub bits: usize,
    /// Probability of each donor bit.
    #[arg(long, default_value_t = 0.1)]
    pub donor_p: f64,
    /// Probability of each patient bit.
    #[arg(long, default_value_t = 0.2)]
    pub patient_p: f64,
    /// Fraction of altruists.
    #[arg(long, default_value_t = 0.05)]
    pub altruists: f64,
    /// Base seed; `TYPED_EXCHANGE_SEED` overrides it.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl PoolArgs {
    fn config(&self, n: usize, t: usize) -> Result<GeneratorConfig> {
        let mut cfg = GeneratorConfig::new(n, effective_seed(self.seed)?).with_uniform_bits(
            self.bits,
            self.donor_p,
            self.patient_p,
        );
        cfg.t = t;
        cfg.altruist_fraction = self.altruists;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args, Clone)]
pub struct SweepArgs {
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write wall_ms as 0 so the CSV depends only on its inputs.
    #[arg(long)]
    pub deterministic: bool,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for a (k, t)-representation of an edge-list graph.
    Represent {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        t: usize,
        /// Constrained ordered pairs; every pair when absent.
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// Attribute file written on SAT.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the CNF here and its varmap next to it (`<path>.varmap`).
        #[arg(long)]
        emit_dimacs: Option<PathBuf>,
        /// Decode a model from an external solver instead of solving.
        #[arg(long)]
        import_model: Option<PathBuf>,
        /// Minimise wrongly reproduced pairs instead of deciding.
        #[arg(long)]
        min_violations: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Smallest width per graph, as CSV.
    MinK {
        /// Graph files or directories of `.edges` / `.attr` files.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long, default_value_t = 0)]
        t: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Satisfiability against width over many graphs, as CSV.
    SweepK {
        /// Graph files or directories; generated pools when absent.
        #[arg(long, num_args = 1..)]
        graphs: Vec<PathBuf>,
        /// Generated pools.
        #[arg(long, default_value_t = 30)]
        count: usize,
        /// Vertices per generated pool.
        #[arg(long, default_value_t = 15)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        t: usize,
        #[arg(long, default_value_t = 1)]
        k_from: usize,
        /// Largest width; the largest graph size when absent.
        #[arg(long)]
        k_to: Option<usize>,
        #[command(flatten)]
        pool: PoolArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Matched fraction against threshold on generated pools, as CSV.
    SweepThreshold {
        #[arg(long, value_delimiter = ',', default_values_t = [20, 40, 80])]
        sizes: Vec<usize>,
        /// Pools per size.
        #[arg(long, default_value_t = 5)]
        instances: usize,
        /// Largest threshold; the attribute width when absent.
        #[arg(long)]
        t_max: Option<usize>,
        /// Cycle cap.
        #[arg(short = 'L', long = "cap", default_value_t = 3)]
        cap: usize,
        #[command(flatten)]
        pool: PoolArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Maximum cycle packing through vertex types. Attribute files without
    /// altruists are typed by their vectors, anything else by neighbourhoods.
    Clear {
        graph: PathBuf,
        /// Cycle cap.
        #[arg(short = 'L', long = "cap", default_value_t = 3)]
        cap: usize,
        /// Separate cap for chains started by altruists.
        #[arg(long)]
        chain_cap: Option<usize>,
        /// Type switch costs (`cost a b value` lines); enables flipping.
        #[arg(long)]
        flip_costs: Option<PathBuf>,
        /// Cross-check the packed value with exhaustive search.
        #[arg(long)]
        oracle: bool,
        /// Print the vertex types as comment lines.
        #[arg(long)]
        show_types: bool,
        #[arg(long)]
        json: bool,
    },
    /// Build and solve the representation instance of a 3SAT formula.
    Reduce {
        formula: PathBuf,
        /// Where the instance files go; nothing is written when absent.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Let the solver choose the gadget's vectors instead of fixing them.
        #[arg(long)]
        no_pin: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Instance generators.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Random attribute pool (attribute file).
    Pool {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        t: usize,
        #[command(flatten)]
        pool: PoolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the induced edge list.
        #[arg(long)]
        edges: Option<PathBuf>,
    },
    /// Blood-type pool with uniform type distributions (attribute file).
    Blood {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        edges: Option<PathBuf>,
    },
    /// Graph needing width n at threshold 0 (edge list).
    Witness {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bit-fixing gadget (edge list, plus its constrained pairs).
    Gadget {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        pairs: Option<PathBuf>,
    },
    /// Random 3SAT formula (DIMACS).
    Formula {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            write_atomic(p, text.as_bytes()).with_context(|| format!("writing {}", p.display()))
        }
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn status_code(status: &SolveStatus) -> u8 {
    match status {
        SolveStatus::Sat(_) => exit::SAT,
        SolveStatus::Unsat => exit::UNSAT,
        SolveStatus::Timeout => exit::TIMEOUT,
    }
}

/// Runs a parsed command, writing reports to `out`. Returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Represent {
            graph,
            k,
            t,
            pairs,
            out: attr_out,
            emit_dimacs,
            import_model,
            min_violations: minimise,
            budget,
        } => {
            let g = load_graph(&graph)?;
            let constrained = match &pairs {
                Some(p) => {
                    let (n, c) = parse_pairs(&read(p)?)
                        .with_context(|| format!("parsing {}", p.display()))?;
                    if n != g.n() {
                        bail!("pair file is for {n} vertices, graph has {}", g.n());
                    }
                    c
                }
                None => ConstrainedPairs::All,
            };
            let problem = RepresentationProblem::new(g, constrained, k, t)?;
            let altruists = problem.graph.altruists();
            if let Some(path) = &emit_dimacs {
                let enc = encode(&problem)?;
                write_atomic(path, write_dimacs(&enc.cnf).as_bytes())?;
                let mut side = path.clone().into_os_string();
                side.push(".varmap");
                write_atomic(Path::new(&side), write_varmap(&enc).as_bytes())?;
            }
            let deadline = Deadline::after_ms(budget.budget_ms);
            let solver_budget = deadline.budget(budget.budget_conflicts);
            if minimise {
                let res = min_violations(&problem, &solver_budget)?;
                writeln!(out, "violations: {}", res.xi_count)?;
                writeln!(out, "conservative: {}", res.conservative)?;
                emit(
                    out,
                    attr_out.as_deref(),
                    &write_attributes(&res.rep, &altruists),
                )?;
                return Ok(if res.conservative {
                    exit::TIMEOUT
                } else {
                    exit::SAT
                });
            }
            let status = match &import_model {
                Some(path) => {
                    let enc = encode(&problem)?;
                    let model = parse_model(&read(path)?, enc.var_count() as usize)
                        .with_context(|| format!("parsing {}", path.display()))?;
                    match model {
                        Some(m) => SolveStatus::Sat(
                            decode_external_model(&problem, &enc, &m)
                                .context("imported model rejected")?,
                        ),
                        None => SolveStatus::Unsat,
                    }
                }
                None => {
                    let res = solve(&problem, &solver_budget)?;
                    writeln!(
                        out,
                        "decisions: {} conflicts: {} propagations: {}",
                        res.stats.decisions, res.stats.conflicts, res.stats.propagations
                    )?;
                    res.status
                }
            };
            writeln!(out, "status: {}", status.label())?;
            if let SolveStatus::Sat(rep) = &status {
                emit(out, attr_out.as_deref(), &write_attributes(rep, &altruists))?;
            }
            Ok(status_code(&status))
        }
        Command::MinK {
            paths,
            t,
            budget,
            sweep,
        } => {
            let instances = load_instances(&paths)?;
            let b = sweep_budget(budget, &sweep);
            let rows = with_jobs(sweep.jobs, || sweep_min_k(&instances, t, b))??;
            emit(out, sweep.out.as_deref(), &to_csv(&rows)?)?;
            Ok(exit::SAT)
        }
        Command::SweepK {
            graphs,
            count,
            n,
            t,
            k_from,
            k_to,
            pool,
            budget,
            sweep,
        } => {
            let instances = if graphs.is_empty() {
                generate_instances(&pool.config(n, 0)?, count)?
            } else {
                load_instances(&graphs)?
            };
            let top =
                k_to.unwrap_or_else(|| instances.iter().map(|i| i.graph.n()).max().unwrap_or(1));
            let ks: Vec<usize> = (k_from.max(1)..=top).collect();
            let b = sweep_budget(budget, &sweep);
            let rows = with_jobs(sweep.jobs, || sweep_k(&instances, t, &ks, b))??;
            emit(out, sweep.out.as_deref(), &to_csv(&rows)?)?;
            Ok(exit::SAT)
        }
        Command::SweepThreshold {
            sizes,
            instances,
            t_max,
            cap,
            pool,
            sweep,
        } => {
            let plan = ThresholdSweep {
                base: pool.config(0, 0)?,
                sizes,
                instances,
                t_max,
                cap,
            };
            let b = SweepBudget {
                deterministic: sweep.deterministic,
                ..SweepBudget::default()
            };
            let rows = with_jobs(sweep.jobs, || sweep_threshold(&plan, b))??;
            emit(out, sweep.out.as_deref(), &to_csv(&rows)?)?;
            Ok(exit::SAT)
        }
        Command::Clear {
            graph,
            cap,
            chain_cap,
            flip_costs,
            oracle,
            show_types,
            json,
        } => {
            let caps = match chain_cap {
                Some(c) => Caps::with_chain_cap(cap, c)?,
                None => Caps::new(cap)?,
            };
            let ts = match read_graph_file(&graph)? {
                GraphFile::Attributes(a) if a.altruists.is_empty() => {
                    TypeSpace::from_attributes(&a.rep)
                }
                file => TypeSpace::from_graph(&model_altruists(&file.graph()))?,
            };
            let walks = enumerate_type_walks(&ts, caps)?;
            let (ts_used, clearing, plan) = match &flip_costs {
                Some(path) => {
                    let costs = parse_costs(&read(path)?, ts.len())
                        .with_context(|| format!("parsing {}", path.display()))?;
                    let outcome = flip_and_clear(&ts, &walks, &costs)?;
                    let flipped = apply_flip_plan(&ts, &outcome.plan)?;
                    (flipped, outcome.clearing, Some(outcome.plan))
                }
                None => {
                    let c = clear_by_types(&ts, &walks)?;
                    (ts.clone(), c, None)
                }
            };
            let packed = ts_used.induced_graph();
            let cover = realize_cover(&packed, &ts_used, &walks, &clearing.multiplicities)?;
            cover.validate(&packed, &caps)?;
            if oracle {
                if packed.n() > 10 {
                    eprintln!("oracle skipped: {} vertices (limit 10)", packed.n());
                } else {
                    debug_assert!(packed.n() <= MAX_COVER_VERTICES);
                    let exact = max_cycle_cover_bruteforce(&packed, caps, false)?;
                    if exact.value != cover.value {
                        return Err(OracleMismatch {
                            fast: cover.value,
                            exact: exact.value,
                        }
                        .into());
                    }
                }
            }
            if show_types {
                for (ty, members) in ts.members().iter().enumerate() {
                    let vs: Vec<String> = members.iter().map(usize::to_string).collect();
                    writeln!(out, "# type {ty}: {}", vs.join(" "))?;
                }
            }
            let report = CoverReport::new(&cover, plan.as_ref());
            let text = if json {
                report.to_json()
            } else {
                report.to_text()
            };
            out.write_all(text.as_bytes())?;
            Ok(exit::SAT)
        }
        Command::Reduce {
            formula,
            out_dir,
            no_pin,
            budget,
        } => {
            let f = parse_3sat(&read(&formula)?)
                .with_context(|| format!("parsing {}", formula.display()))?;
            let inst = reduce_3sat(&f)?;
            let problem = if no_pin {
                inst.problem.clone()
            } else {
                inst.pinned_problem()
            };
            writeln!(
                out,
                "vertices: {} k: {} t: {}",
                problem.graph.n(),
                problem.k,
                problem.t
            )?;
            if let Some(dir) = &out_dir {
                std::fs::create_dir_all(dir)?;
                write_atomic(
                    &dir.join("reduction.edges"),
                    write_edge_list(&problem.graph).as_bytes(),
                )?;
                write_atomic(
                    &dir.join("reduction.pairs"),
                    write_pairs(problem.graph.n(), &problem.constrained).as_bytes(),
                )?;
            }
            let deadline = Deadline::after_ms(budget.budget_ms);
            let res = solve(&problem, &deadline.budget(budget.budget_conflicts))?;
            writeln!(out, "status: {}", res.status.label())?;
            if let SolveStatus::Sat(rep) = &res.status {
                let assignment = decode_assignment(&inst, rep)?;
                let xs: Vec<String> = assignment
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| format!("x{}={}", i + 1, u8::from(b)))
                    .collect();
                writeln!(out, "assignment: {}", xs.join(" "))?;
                if let Some(dir) = &out_dir {
                    write_atomic(
                        &dir.join("reduction.attr"),
                        write_attributes(rep, &[]).as_bytes(),
                    )?;
                }
            }
            Ok(status_code(&res.status))
        }
        Command::Gen(g) => {
            run_gen(g, out)?;
            Ok(exit::SAT)
        }
    }
}

fn sweep_budget(budget: BudgetArgs, sweep: &SweepArgs) -> SweepBudget {
    SweepBudget {
        ms: budget.budget_ms,
        conflicts: budget.budget_conflicts,
        deterministic: sweep.deterministic,
    }
}

fn run_gen(cmd: GenCommand, out: &mut dyn Write) -> Result<()> {
    match cmd {
        GenCommand::Pool {
            n,
            t,
            pool,
            out: path,
            edges,
        } => {
            let (rep, g) = gen_attribute_pool(&pool.config(n, t)?)?;
            emit(
                out,
                path.as_deref(),
                &write_attributes(&rep, &g.altruists()),
            )?;
            if let Some(e) = edges {
                write_atomic(&e, write_edge_list(&g).as_bytes())?;
            }
        }
        GenCommand::Blood {
            n,
            seed,
            out: path,
            edges,
        } => {
            let (rep, g) = gen_blood_pool(n, [0.25; 4], [0.25; 4], effective_seed(seed)?)?;
            emit(out, path.as_deref(), &write_attributes(&rep, &[]))?;
            if let Some(e) = edges {
                write_atomic(&e, write_edge_list(&g).as_bytes())?;
            }
        }
        GenCommand::Witness { n, out: path } => {
            emit(
                out,
                path.as_deref(),
                &write_edge_list(&gen_witness_graph(n)?),
            )?;
        }
        GenCommand::Gadget {
            k,
            out: path,
            pairs,
        } => {
            let gadget = gen_gadget(k)?;
            emit(out, path.as_deref(), &write_edge_list(&gadget.graph))?;
            if let Some(p) = pairs {
                write_atomic(&p, write_pairs(gadget.n(), &gadget.constrained).as_bytes())?;
            }
        }
        GenCommand::Formula {
            vars,
            clauses,
            seed,
            out: path,
        } => {
            let f = ThreeSatFormula::random(vars, clauses, effective_seed(seed)?)?;
            emit(out, path.as_deref(), &write_3sat(&f))?;
        }
    }
    Ok(())
}

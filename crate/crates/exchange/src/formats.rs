//! Text formats: edge lists, attribute files, DIMACS CNF with its varmap
//! sidecar, solver models, constrained-pair files, flip costs, and the
//! cover / flip-plan reports.
//!
//! Every writer is byte-deterministic. Readers report the 1-based line of
//! the first problem.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;
use typed_exchange_core::clearing::{CycleCover, FlipCostMatrix, FlipPlan};
use typed_exchange_core::forge::ThreeSatFormula;
use typed_exchange_core::represent::{AuxRole, CnfEncoding};
use typed_exchange_core::sat::Cnf;
use typed_exchange_core::{
    AttributeRepresentation, BitVector, CompatibilityGraph, ConstrainedPairs,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

type Parsed<T> = Result<T, ParseError>;

/// Non-blank lines with comments (`#` or `c ` prefixed) removed, numbered
/// from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        let comment = l.starts_with('#') || l == "c" || l.starts_with("c ");
        (!l.is_empty() && !comment).then_some((i + 1, l))
    })
}

fn num<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Parsed<T> {
    let tok = tok.ok_or_else(|| ParseError::new(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| ParseError::new(line, format!("bad {what} `{tok}`")))
}

fn no_more<'a>(line: usize, mut toks: impl Iterator<Item = &'a str>) -> Parsed<()> {
    match toks.next() {
        Some(t) => Err(ParseError::new(line, format!("unexpected token `{t}`"))),
        None => Ok(()),
    }
}

fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    what: &str,
) -> Parsed<(usize, &'a str)> {
    lines
        .next()
        .ok_or_else(|| ParseError::new(1, format!("missing {what} header")))
}

/// Edge list: header `n m`, then `i j` per directed edge and optional
/// `altruist i` lines.
pub fn parse_edge_list(text: &str) -> Parsed<CompatibilityGraph> {
    let mut lines = content_lines(text);
    let (hl, h) = header(&mut lines, "`n m`")?;
    let mut toks = h.split_whitespace();
    let n: usize = num(hl, toks.next(), "vertex count")?;
    let m: usize = num(hl, toks.next(), "edge count")?;
    no_more(hl, toks)?;
    let mut g = CompatibilityGraph::empty(n);
    let mut edges = 0;
    for (ln, l) in lines {
        let mut toks = l.split_whitespace();
        if l.starts_with("altruist") {
            toks.next();
            let i: usize = num(ln, toks.next(), "altruist index")?;
            no_more(ln, toks)?;
            g.set_altruist(i, true)
                .map_err(|e| ParseError::new(ln, e.to_string()))?;
            continue;
        }
        let i: usize = num(ln, toks.next(), "source vertex")?;
        let j: usize = num(ln, toks.next(), "target vertex")?;
        no_more(ln, toks)?;
        if i < n && j < n && g.has_edge(i, j) {
            return Err(ParseError::new(ln, format!("duplicate edge {i} {j}")));
        }
        g.add_edge(i, j)
            .map_err(|e| ParseError::new(ln, e.to_string()))?;
        edges += 1;
    }
    if edges != m {
        return Err(ParseError::new(
            hl,
            format!("header declares {m} edges, found {edges}"),
        ));
    }
    Ok(g)
}

pub fn write_edge_list(g: &CompatibilityGraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for (i, j) in g.edges() {
        writeln!(out, "{i} {j}").unwrap();
    }
    for a in g.altruists() {
        writeln!(out, "altruist {a}").unwrap();
    }
    out
}

fn parse_bits(line: usize, tok: &str, prefix: &str, k: usize) -> Parsed<BitVector> {
    let s = tok
        .strip_prefix(prefix)
        .ok_or_else(|| ParseError::new(line, format!("expected `{prefix}<bits>`, got `{tok}`")))?;
    if s.len() != k {
        return Err(ParseError::new(
            line,
            format!("expected {k} bits, got {}", s.len()),
        ));
    }
    let bits = s
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(ParseError::new(line, format!("bad bit `{c}`"))),
        })
        .collect::<Parsed<Vec<bool>>>()?;
    Ok(BitVector::from_bits(&bits))
}

/// A parsed attribute file: the vectors plus any `altruist i` lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeFile {
    pub rep: AttributeRepresentation,
    pub altruists: Vec<usize>,
}

impl AttributeFile {
    /// The graph the vectors induce, altruists flagged.
    pub fn graph(&self) -> CompatibilityGraph {
        let mut g = typed_exchange_core::build_graph_from_attributes(&self.rep);
        for &a in &self.altruists {
            g.set_altruist(a, true).expect("checked on parse");
        }
        g
    }
}

/// Attribute file: header `n k t`, then one `d:<bits> p:<bits>` line per
/// vertex; bit 0 is the first character.
pub fn parse_attributes(text: &str) -> Parsed<AttributeFile> {
    let mut lines = content_lines(text);
    let (hl, h) = header(&mut lines, "`n k t`")?;
    let mut toks = h.split_whitespace();
    let n: usize = num(hl, toks.next(), "vertex count")?;
    let k: usize = num(hl, toks.next(), "width")?;
    let t: usize = num(hl, toks.next(), "threshold")?;
    no_more(hl, toks)?;
    let (mut donor, mut patient, mut altruists) = (Vec::new(), Vec::new(), Vec::new());
    for (ln, l) in lines {
        let mut toks = l.split_whitespace();
        if l.starts_with("altruist") {
            toks.next();
            let i: usize = num(ln, toks.next(), "altruist index")?;
            no_more(ln, toks)?;
            if i >= n {
                return Err(ParseError::new(ln, format!("altruist {i} out of range")));
            }
            altruists.push(i);
            continue;
        }
        let d = parse_bits(ln, toks.next().unwrap_or(""), "d:", k)?;
        let p = parse_bits(ln, toks.next().unwrap_or(""), "p:", k)?;
        no_more(ln, toks)?;
        donor.push(d);
        patient.push(p);
    }
    if donor.len() != n {
        return Err(ParseError::new(
            hl,
            format!("header declares {n} vertices, found {}", donor.len()),
        ));
    }
    let rep = AttributeRepresentation::new(k, t, donor, patient)
        .map_err(|e| ParseError::new(hl, e.to_string()))?;
    altruists.sort_unstable();
    altruists.dedup();
    Ok(AttributeFile { rep, altruists })
}

pub fn write_attributes(rep: &AttributeRepresentation, altruists: &[usize]) -> String {
    let mut out = format!("{} {} {}\n", rep.n(), rep.k(), rep.t());
    for i in 0..rep.n() {
        writeln!(out, "d:{} p:{}", rep.donor(i), rep.patient(i)).unwrap();
    }
    for a in altruists {
        writeln!(out, "altruist {a}").unwrap();
    }
    out
}

pub fn write_dimacs(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.var_count(), cnf.clauses().len());
    for c in cnf.clauses() {
        for l in c {
            write!(out, "{l} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

/// Standard `p cnf V C` input. Clauses may span lines; each ends at `0`.
pub fn parse_dimacs(text: &str) -> Parsed<Cnf> {
    let mut lines = content_lines(text).filter(|(_, l)| !l.starts_with('%'));
    let (hl, h) = header(&mut lines, "`p cnf`")?;
    let mut toks = h.split_whitespace();
    if toks.next() != Some("p") || toks.next() != Some("cnf") {
        return Err(ParseError::new(hl, "expected `p cnf V C`"));
    }
    let vars: u32 = num(hl, toks.next(), "variable count")?;
    let count: usize = num(hl, toks.next(), "clause count")?;
    no_more(hl, toks)?;
    let mut clauses = Vec::with_capacity(count);
    let mut cur = Vec::new();
    let mut last = hl;
    for (ln, l) in lines {
        last = ln;
        for tok in l.split_whitespace() {
            let lit: i32 = num(ln, Some(tok), "literal")?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut cur));
            } else if lit.unsigned_abs() > vars {
                return Err(ParseError::new(
                    ln,
                    format!("literal {lit} exceeds {vars} variables"),
                ));
            } else {
                cur.push(lit);
            }
        }
    }
    if !cur.is_empty() {
        return Err(ParseError::new(last, "clause not terminated by 0"));
    }
    if clauses.len() != count {
        return Err(ParseError::new(
            hl,
            format!("header declares {count} clauses, found {}", clauses.len()),
        ));
    }
    Ok(Cnf::from_parts(vars, clauses))
}

/// A 3SAT formula in DIMACS form; every clause must have exactly three
/// literals.
pub fn parse_3sat(text: &str) -> Parsed<ThreeSatFormula> {
    let cnf = parse_dimacs(text)?;
    let mut clauses = Vec::with_capacity(cnf.clauses().len());
    for (i, c) in cnf.clauses().iter().enumerate() {
        let c: [i32; 3] = c.as_slice().try_into().map_err(|_| {
            ParseError::new(
                0,
                format!("clause {} has {} literals, expected 3", i + 1, c.len()),
            )
        })?;
        clauses.push(c);
    }
    ThreeSatFormula::new(cnf.var_count() as usize, clauses)
        .map_err(|e| ParseError::new(0, e.to_string()))
}

pub fn write_3sat(f: &ThreeSatFormula) -> String {
    let cnf = Cnf::from_parts(
        f.n_vars() as u32,
        f.clauses().iter().map(|c| c.to_vec()).collect(),
    );
    write_dimacs(&cnf)
}

/// Sidecar naming every variable of an encoding: `d i q v`, `p i q v`,
/// `z i j q v`, `c i j q v`, `xi i j v`. Counter registers are not listed.
pub fn write_varmap(enc: &CnfEncoding) -> String {
    let vm = &enc.varmap;
    let mut out = format!("# n {} k {} t {}\n", vm.n(), vm.k(), enc.t);
    for i in 0..vm.n() {
        for q in 0..vm.k() {
            writeln!(out, "d {i} {q} {}", vm.donor(i, q)).unwrap();
        }
    }
    for i in 0..vm.n() {
        for q in 0..vm.k() {
            writeln!(out, "p {i} {q} {}", vm.patient(i, q)).unwrap();
        }
    }
    let mut aux: Vec<(AuxRole, i32)> = vm.aux_entries().collect();
    aux.sort_by_key(|&(_, v)| v);
    for (role, v) in aux {
        match role {
            AuxRole::Witness { i, j, q } => writeln!(out, "z {i} {j} {q} {v}"),
            AuxRole::Conflict { i, j, q } => writeln!(out, "c {i} {j} {q} {v}"),
            AuxRole::Violation { i, j } => writeln!(out, "xi {i} {j} {v}"),
        }
        .unwrap();
    }
    out
}

/// Donor and patient variables read back from a sidecar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sidecar {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    donor: Vec<Vec<i32>>,
    patient: Vec<Vec<i32>>,
}

impl Sidecar {
    /// Representation read off a model (`model[v - 1]` is variable `v`).
    pub fn decode(&self, model: &[bool]) -> AttributeRepresentation {
        let read = |rows: &[Vec<i32>]| -> Vec<BitVector> {
            rows.iter()
                .map(|r| {
                    let bits: Vec<bool> = r
                        .iter()
                        .map(|&v| model.get(v as usize - 1).copied().unwrap_or(false))
                        .collect();
                    BitVector::from_bits(&bits)
                })
                .collect()
        };
        AttributeRepresentation::new(self.k, self.t, read(&self.donor), read(&self.patient))
            .expect("sidecar rows have width k")
    }
}

pub fn parse_varmap(text: &str) -> Parsed<Sidecar> {
    let mut shape = None;
    for (ln, l) in text.lines().enumerate() {
        if let Some(rest) = l.trim().strip_prefix("# n ") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() != 5 || toks[1] != "k" || toks[3] != "t" {
                return Err(ParseError::new(ln + 1, "expected `# n N k K t T`"));
            }
            shape = Some((
                num(ln + 1, Some(toks[0]), "n")?,
                num(ln + 1, Some(toks[2]), "k")?,
                num(ln + 1, Some(toks[4]), "t")?,
            ));
            break;
        }
    }
    let (n, k, t): (usize, usize, usize) =
        shape.ok_or_else(|| ParseError::new(1, "missing `# n N k K t T` line"))?;
    let mut donor = vec![vec![0i32; k]; n];
    let mut patient = vec![vec![0i32; k]; n];
    for (ln, l) in content_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.first().copied() {
            Some(kind @ ("d" | "p")) => {
                if toks.len() != 4 {
                    return Err(ParseError::new(ln, "expected `d|p i q var`"));
                }
                let i: usize = num(ln, Some(toks[1]), "vertex")?;
                let q: usize = num(ln, Some(toks[2]), "bit")?;
                let v: i32 = num(ln, Some(toks[3]), "variable")?;
                if i >= n || q >= k || v <= 0 {
                    return Err(ParseError::new(ln, "entry out of range"));
                }
                if kind == "d" {
                    donor[i][q] = v;
                } else {
                    patient[i][q] = v;
                }
            }
            Some("z" | "c" | "xi") => {}
            Some(other) => return Err(ParseError::new(ln, format!("unknown entry `{other}`"))),
            None => {}
        }
    }
    if donor.iter().chain(&patient).flatten().any(|&v| v == 0) {
        return Err(ParseError::new(
            1,
            "sidecar does not name every donor and patient bit",
        ));
    }
    Ok(Sidecar {
        n,
        k,
        t,
        donor,
        patient,
    })
}

/// Solver output: competition style (`s SATISFIABLE`, `v ...` lines),
/// MiniSat style (`SAT` then literals) or bare literals. Returns `None`
/// for an UNSAT answer; otherwise a model over `vars` variables where
/// unlisted variables are false.
pub fn parse_model(text: &str, vars: usize) -> Parsed<Option<Vec<bool>>> {
    let mut model = vec![false; vars];
    for (ln, l) in content_lines(text) {
        let upper = l.to_ascii_uppercase();
        if upper.contains("UNSAT") {
            return Ok(None);
        }
        if upper == "SAT" || upper.starts_with("S ") {
            continue;
        }
        let body = l.strip_prefix("v ").unwrap_or(l);
        for tok in body.split_whitespace() {
            let lit: i64 = num(ln, Some(tok), "literal")?;
            if lit == 0 {
                continue;
            }
            let v = lit.unsigned_abs() as usize;
            if v > vars {
                return Err(ParseError::new(
                    ln,
                    format!("variable {v} beyond the encoding's {vars}"),
                ));
            }
            model[v - 1] = lit > 0;
        }
    }
    Ok(Some(model))
}

/// Constrained ordered pairs: header `n m`, then `i j` lines.
pub fn parse_pairs(text: &str) -> Parsed<(usize, ConstrainedPairs)> {
    let mut lines = content_lines(text);
    let (hl, h) = header(&mut lines, "`n m`")?;
    let mut toks = h.split_whitespace();
    let n: usize = num(hl, toks.next(), "vertex count")?;
    let m: usize = num(hl, toks.next(), "pair count")?;
    no_more(hl, toks)?;
    let mut pairs = BTreeSet::new();
    for (ln, l) in lines {
        let mut toks = l.split_whitespace();
        let i: usize = num(ln, toks.next(), "first vertex")?;
        let j: usize = num(ln, toks.next(), "second vertex")?;
        no_more(ln, toks)?;
        if i >= n || j >= n || i == j {
            return Err(ParseError::new(ln, format!("invalid pair {i} {j}")));
        }
        pairs.insert((i, j));
    }
    if pairs.len() != m {
        return Err(ParseError::new(
            hl,
            format!("header declares {m} pairs, found {}", pairs.len()),
        ));
    }
    Ok((n, ConstrainedPairs::only(pairs)))
}

pub fn write_pairs(n: usize, pairs: &ConstrainedPairs) -> String {
    let list = pairs.pairs(n);
    let mut out = format!("{n} {}\n", list.len());
    for (i, j) in list {
        writeln!(out, "{i} {j}").unwrap();
    }
    out
}

/// Flip costs over `types` types: `cost a b value` lines, `inf` allowed.
/// Unlisted switches are forbidden.
pub fn parse_costs(text: &str, types: usize) -> Parsed<FlipCostMatrix> {
    let mut m = FlipCostMatrix::forbidden(types);
    for (ln, l) in content_lines(text) {
        let mut toks = l.split_whitespace();
        if toks.next() != Some("cost") {
            return Err(ParseError::new(ln, "expected `cost a b value`"));
        }
        let a: usize = num(ln, toks.next(), "source type")?;
        let b: usize = num(ln, toks.next(), "target type")?;
        let c: f64 = num(ln, toks.next(), "cost")?;
        no_more(ln, toks)?;
        if a >= types || b >= types {
            return Err(ParseError::new(
                ln,
                format!("type out of range (have {types})"),
            ));
        }
        m.set(a, b, c)
            .map_err(|e| ParseError::new(ln, e.to_string()))?;
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverReport {
    pub cycles: Vec<Vec<usize>>,
    pub value: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flip: Option<FlipReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlipReport {
    pub switches: Vec<FlipEntry>,
    pub cost: f64,
    pub net: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlipEntry {
    pub from: usize,
    pub to: usize,
    pub count: usize,
}

impl CoverReport {
    pub fn new(cover: &CycleCover, plan: Option<&FlipPlan>) -> Self {
        Self {
            cycles: cover.cycles.clone(),
            value: cover.value,
            flip: plan.map(|p| FlipReport {
                switches: p
                    .switches
                    .iter()
                    .map(|&(from, to, count)| FlipEntry { from, to, count })
                    .collect(),
                cost: p.cost,
                net: p.net_value,
            }),
        }
    }

    /// `flip a -> b: s`, `cost: C`, `net: N` (when flipping), then
    /// `cycle: ...` lines and `value: V`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(f) = &self.flip {
            for e in &f.switches {
                writeln!(out, "flip {} -> {}: {}", e.from, e.to, e.count).unwrap();
            }
            writeln!(out, "cost: {}", f.cost).unwrap();
            writeln!(out, "net: {}", f.net).unwrap();
        }
        for c in &self.cycles {
            let vs: Vec<String> = c.iter().map(usize::to_string).collect();
            writeln!(out, "cycle: {}", vs.join(" ")).unwrap();
        }
        writeln!(out, "value: {}", self.value).unwrap();
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data") + "\n"
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed run never leaves a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

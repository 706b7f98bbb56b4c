//! Source-problem types and their text formats.

use std::collections::{BTreeSet, HashMap};

use super::GenError;
use crate::format::tokenized;

fn syntax(line: usize, msg: impl Into<String>) -> GenError {
    GenError::Syntax { line, msg: msg.into() }
}

fn number<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T, GenError> {
    tok.parse().map_err(|_| syntax(line, format!("invalid number `{tok}`")))
}

/// Directed graph on nodes `0..nodes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self, GenError> {
        let mut seen = BTreeSet::new();
        for &(u, v) in &edges {
            if u >= nodes || v >= nodes {
                return Err(GenError::Malformed(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(GenError::Malformed(format!("self-loop on node {u}")));
            }
            if !seen.insert((u, v)) {
                return Err(GenError::Malformed(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Graph { nodes, edges })
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == v).count()
    }
}

/// `digraph <nodes>` followed by one `<u> <v>` line per edge (0-based).
pub fn parse_digraph(text: &str) -> Result<Graph, GenError> {
    let mut lines = tokenized(text);
    let nodes = match lines.next() {
        Some((l, t)) if t.len() == 2 && t[0] == "digraph" => number(l, t[1])?,
        Some((l, _)) => return Err(syntax(l, "expected `digraph <nodes>`")),
        None => return Err(syntax(1, "empty input")),
    };
    let mut edges = Vec::new();
    for (l, t) in lines {
        if t.len() != 2 {
            return Err(syntax(l, "expected `<u> <v>`"));
        }
        edges.push((number(l, t[0])?, number(l, t[1])?));
    }
    Graph::new(nodes, edges)
}

/// CNF over variables `1..=num_vars`; literals are signed as in DIMACS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self, GenError> {
        for c in &clauses {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > num_vars {
                    return Err(GenError::Malformed(format!("literal {l} out of range")));
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
    }
}

pub fn parse_dimacs(text: &str) -> Result<CnfFormula, GenError> {
    let mut header = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let l = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "p" {
            if toks.len() != 4 || toks[1] != "cnf" || header.is_some() {
                return Err(syntax(l, "expected a single `p cnf <vars> <clauses>`"));
            }
            header = Some((number::<usize>(l, toks[2])?, number::<usize>(l, toks[3])?));
            continue;
        }
        if header.is_none() {
            return Err(syntax(l, "clause before `p cnf` header"));
        }
        for t in toks {
            match number::<i64>(l, t)? {
                0 => clauses.push(std::mem::take(&mut current)),
                lit => current.push(lit),
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| syntax(1, "missing `p cnf` header"))?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != count {
        return Err(GenError::Malformed(format!("header declares {count} clauses, found {}", clauses.len())));
    }
    CnfFormula::new(vars, clauses)
}

/// Two equal-sized sets of boolean vectors of a common dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OvInstance {
    pub a: Vec<Vec<bool>>,
    pub b: Vec<Vec<bool>>,
}

impl OvInstance {
    pub fn new(a: Vec<Vec<bool>>, b: Vec<Vec<bool>>) -> Result<Self, GenError> {
        if a.len() != b.len() {
            return Err(GenError::Malformed("sets A and B differ in size".into()));
        }
        let d = a.first().map_or(0, Vec::len);
        if a.iter().chain(&b).any(|v| v.len() != d) {
            return Err(GenError::Malformed("vectors differ in dimension".into()));
        }
        Ok(OvInstance { a, b })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn d(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }
}

/// `ov <n> <d>` then n rows of A and n rows of B; a row is `d` bits, either
/// whitespace-separated or run together (`0110`).
pub fn parse_ov(text: &str) -> Result<OvInstance, GenError> {
    let mut lines = tokenized(text);
    let (n, d): (usize, usize) = match lines.next() {
        Some((l, t)) if t.len() == 3 && t[0] == "ov" => (number(l, t[1])?, number(l, t[2])?),
        Some((l, _)) => return Err(syntax(l, "expected `ov <n> <d>`")),
        None => return Err(syntax(1, "empty input")),
    };
    let mut rows = Vec::new();
    for (l, t) in lines {
        let bits: String = t.concat();
        let row = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(syntax(l, format!("invalid bit `{c}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != d {
            return Err(syntax(l, format!("expected {d} bits, found {}", row.len())));
        }
        rows.push(row);
    }
    if rows.len() != 2 * n {
        return Err(GenError::Malformed(format!("expected {} rows, found {}", 2 * n, rows.len())));
    }
    let b = rows.split_off(n);
    OvInstance::new(rows, b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemOp {
    Read,
    Write,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemEvent {
    pub id: u64,
    pub thread: String,
    pub op: MemOp,
    pub register: String,
}

/// Reads and writes in program order (per thread, listing order) with every
/// read mapped to the write it observes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VscReadInstance {
    pub events: Vec<MemEvent>,
    /// (write id, read id)
    pub rf: Vec<(u64, u64)>,
}

impl VscReadInstance {
    pub fn new(events: Vec<MemEvent>, rf: Vec<(u64, u64)>) -> Result<Self, GenError> {
        let mut by_id = HashMap::new();
        for e in &events {
            if by_id.insert(e.id, e).is_some() {
                return Err(GenError::Malformed(format!("duplicate event id {}", e.id)));
            }
        }
        let mut read_seen = BTreeSet::new();
        for &(w, r) in &rf {
            let (Some(we), Some(re)) = (by_id.get(&w), by_id.get(&r)) else {
                return Err(GenError::Malformed(format!("rf ({w}, {r}) names a missing event")));
            };
            if we.op != MemOp::Write || re.op != MemOp::Read {
                return Err(GenError::Malformed(format!("rf ({w}, {r}) must go from a write to a read")));
            }
            if we.register != re.register {
                return Err(GenError::Malformed(format!("rf ({w}, {r}) crosses registers")));
            }
            if !read_seen.insert(r) {
                return Err(GenError::Malformed(format!("read {r} has two rf sources")));
            }
        }
        if let Some(e) = events.iter().find(|e| e.op == MemOp::Read && !read_seen.contains(&e.id)) {
            return Err(GenError::Malformed(format!("read {} has no rf source", e.id)));
        }
        Ok(VscReadInstance { events, rf })
    }
}

/// Instance-format file with `kind mem`, `event <id> <thread> r|w <register>`
/// and `rf <write> <read>` lines.
pub fn parse_vsc(text: &str) -> Result<VscReadInstance, GenError> {
    let mut lines = tokenized(text);
    match lines.next() {
        Some((_, t)) if t == ["vchk", "v1"] => {}
        Some((l, _)) => return Err(syntax(l, "expected header `vchk v1`")),
        None => return Err(syntax(1, "empty input")),
    }
    let mut kind_seen = false;
    let mut events = Vec::new();
    let mut rf = Vec::new();
    for (l, t) in lines {
        match t.as_slice() {
            ["kind", "mem"] if !kind_seen => kind_seen = true,
            ["kind", ..] => return Err(syntax(l, "expected a single `kind mem`")),
            ["event", id, thread, op, reg] => {
                let op = match *op {
                    "r" => MemOp::Read,
                    "w" => MemOp::Write,
                    other => return Err(syntax(l, format!("expected r or w, found `{other}`"))),
                };
                events.push(MemEvent {
                    id: number(l, id)?,
                    thread: thread.to_string(),
                    op,
                    register: reg.to_string(),
                });
            }
            ["rf", w, r] => rf.push((number(l, w)?, number(l, r)?)),
            _ => return Err(syntax(l, format!("unexpected line `{}`", t.join(" ")))),
        }
    }
    if !kind_seen {
        return Err(syntax(1, "missing `kind mem`"));
    }
    VscReadInstance::new(events, rf)
}

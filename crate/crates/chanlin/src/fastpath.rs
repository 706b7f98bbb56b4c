//! Polynomial special cases: all-synchronous instances and acyclic communication
//! topologies (solved pairwise through 2SAT).

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, VecDeque};

use crate::frontier::validate_rf;
use crate::model::{classify_channels, ChannelClass, EventId, Instance, Op, RawEvent, ReadsFrom};
use crate::topology::communication_topology;
use crate::twosat::{solve_2sat, Lit, TwoSatFormula, TwoSatResult};
use crate::verdict::{SolveError, Verdict};

/// Matched synchronous pairs, with an edge u→v when an event of u immediately
/// precedes (in its thread) an event of v.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SendReceiveGraph {
    /// (send, receive) as dense indices, ordered by send.
    pub nodes: Vec<(usize, usize)>,
    /// Node-index pairs, sorted, without duplicates.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SyncGraphError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    /// The instance cannot be consistent.
    #[error("{0}")]
    Inconsistent(String),
}

pub fn build_send_receive_graph(inst: &Instance) -> Result<SendReceiveGraph, SyncGraphError> {
    let rf = inst.rf.as_ref().ok_or(SolveError::MissingRf)?;
    if let Some(c) = inst.channels.iter().find(|c| !c.cap.is_sync()) {
        return Err(SolveError::Refused(format!("channel {} is not synchronous", c.name)).into());
    }
    let classes = classify_channels(inst);
    validate_rf(inst, rf, &classes).map_err(SyncGraphError::Inconsistent)?;

    let nodes = rf.pairs();
    let mut node_of = vec![usize::MAX; inst.n()];
    for (i, &(s, r)) in nodes.iter().enumerate() {
        node_of[s] = i;
        node_of[r] = i;
    }
    let mut edges = BTreeSet::new();
    for seq in &inst.po {
        for w in seq.windows(2) {
            let (u, v) = (node_of[w[0]], node_of[w[1]]);
            if u != v {
                edges.insert((u, v));
            }
        }
    }
    Ok(SendReceiveGraph {
        nodes,
        edges: edges.into_iter().collect(),
    })
}

/// All-synchronous instances: consistent iff the send-receive graph is acyclic.
pub fn solve_sync(inst: &Instance) -> Result<Verdict, SolveError> {
    let g = match build_send_receive_graph(inst) {
        Ok(g) => g,
        Err(SyncGraphError::Solve(e)) => return Err(e),
        Err(SyncGraphError::Inconsistent(reason)) => return Ok(Verdict::inconsistent(Some(reason), 0)),
    };
    let k = g.nodes.len();
    let mut out = vec![Vec::new(); k];
    let mut indeg = vec![0usize; k];
    for &(u, v) in &g.edges {
        out[u].push(v);
        indeg[v] += 1;
    }
    let mut ready: BinaryHeap<Reverse<usize>> = (0..k).filter(|&u| indeg[u] == 0).map(Reverse).collect();
    let mut witness = Vec::with_capacity(inst.n());
    while let Some(Reverse(u)) = ready.pop() {
        witness.extend([g.nodes[u].0, g.nodes[u].1]);
        for &v in &out[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.push(Reverse(v));
            }
        }
    }
    Ok(if witness.len() == inst.n() {
        Verdict::consistent(witness, 0)
    } else {
        Verdict::inconsistent(Some("send-receive graph has a cycle".into()), 0)
    })
}

/// 2SAT encoding of a two-thread instance together with its variable table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoSatEncoding {
    pub formula: TwoSatFormula,
    /// Variable v means "event .0 precedes event .1" (dense indices of the encoded instance).
    pub variables: Vec<(usize, usize)>,
}

impl TwoSatEncoding {
    /// Variables as event-id pairs.
    pub fn variable_ids(&self, inst: &Instance) -> Vec<(EventId, EventId)> {
        self.variables
            .iter()
            .map(|&(e, f)| (inst.events[e].id, inst.events[f].id))
            .collect()
    }
}

#[derive(Clone, Copy)]
enum L {
    Const(bool),
    Var(Lit),
}

impl L {
    fn not(self) -> L {
        match self {
            L::Const(b) => L::Const(!b),
            L::Var(l) => L::Var(l.negate()),
        }
    }
}

/// Encodes a VCh-rf instance over at most two threads as a 2SAT formula.
///
/// One variable per ordered cross-thread pair; same-thread pairs are fixed by
/// program order and folded away. Channels must be synchronous, capacity-1 or
/// effectively unbounded.
pub fn encode_2sat(inst: &Instance) -> Result<TwoSatEncoding, SolveError> {
    let rf = inst.rf.as_ref().ok_or(SolveError::MissingRf)?;
    if inst.t() > 2 {
        return Err(SolveError::Refused(format!("{} threads; the 2SAT encoding needs at most two", inst.t())));
    }
    let classes = classify_channels(inst);
    for (ch, class) in classes.iter().enumerate() {
        if let ChannelClass::Bounded(c) = class {
            if *c >= 2 {
                return Err(SolveError::Refused(format!(
                    "channel {} has capacity {c} and more sends than that",
                    inst.channels[ch].name
                )));
            }
        }
    }

    let pos = inst.positions();
    let thr: Vec<usize> = inst.events.iter().map(|e| e.thread).collect();
    let empty = Vec::new();
    let (a, b) = (
        inst.po.first().unwrap_or(&empty),
        inst.po.get(1).unwrap_or(&empty),
    );
    let mut var_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut variables = Vec::new();
    for &e in a {
        for &f in b {
            for pair in [(e, f), (f, e)] {
                var_of.insert(pair, variables.len());
                variables.push(pair);
            }
        }
    }
    let lit = |e: usize, f: usize| -> L {
        if thr[e] == thr[f] {
            L::Const(pos[e] < pos[f])
        } else {
            L::Var(Lit::pos(var_of[&(e, f)]))
        }
    };
    let pred = |e: usize| (pos[e] > 0).then(|| inst.po[thr[e]][pos[e] - 1]);
    let succ = |e: usize| inst.po[thr[e]].get(pos[e] + 1).copied();

    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut add = |ls: &[L]| {
        let mut c = Vec::with_capacity(2);
        for l in ls {
            match *l {
                L::Const(true) => return,
                L::Const(false) => {}
                L::Var(v) => c.push(v),
            }
        }
        c.sort();
        c.dedup();
        if c.len() == 2 && c[0].var == c[1].var {
            return;
        }
        clauses.push(c);
    };

    // Exactly one direction per cross pair.
    for &e in a {
        for &f in b {
            add(&[lit(e, f).not(), lit(f, e).not()]);
            add(&[lit(e, f), lit(f, e)]);
        }
    }
    // Program order pairs are constants and vanish.
    let pairs = rf.pairs();
    for &(s, r) in &pairs {
        add(&[lit(s, r)]);
    }
    let by_channel = inst.channel_events();
    for (ch, evs) in by_channel.iter().enumerate() {
        let sends: Vec<usize> = evs.iter().copied().filter(|&e| inst.events[e].op == Op::Snd).collect();
        let (matched, unmatched): (Vec<usize>, Vec<usize>) = sends.iter().partition(|&&s| rf.dst[s].is_some());
        for &s in &matched {
            for &u in &unmatched {
                add(&[lit(s, u)]);
            }
        }
        // FIFO: two matched sends are ordered like their receives.
        for &e in &matched {
            for &f in &matched {
                if e == f {
                    continue;
                }
                let (e2, f2) = (rf.dst[e].unwrap(), rf.dst[f].unwrap());
                add(&[lit(e, f).not(), lit(e2, f2)]);
                add(&[lit(e, f), lit(e2, f2).not()]);
            }
        }
        match classes[ch] {
            ChannelClass::Bounded(1) => {
                for &e in &matched {
                    let r = rf.dst[e].unwrap();
                    for &other in &sends {
                        if other != e {
                            add(&[lit(e, other).not(), lit(r, other)]);
                        }
                    }
                }
            }
            ChannelClass::Sync => {
                for &s in &matched {
                    let r = rf.dst[s].unwrap();
                    if let Some(next) = succ(s) {
                        add(&[lit(r, next)]);
                    }
                    if let Some(prev) = pred(r) {
                        add(&[lit(prev, s)]);
                    }
                }
            }
            _ => {}
        }
    }
    // Transitivity through program-order neighbours.
    for &(e, f) in &variables {
        let x = lit(e, f);
        if let Some(p) = pred(e) {
            add(&[x.not(), lit(p, f)]);
        }
        if let Some(q) = succ(f) {
            add(&[x.not(), lit(e, q)]);
        }
    }

    clauses.sort();
    clauses.dedup();
    Ok(TwoSatEncoding {
        formula: TwoSatFormula {
            num_vars: variables.len(),
            clauses,
        },
        variables,
    })
}

/// Restriction of `inst` to threads `a`, `b` and the given channels, with program
/// order induced. Returns the projection and, per projected event, its index in `inst`.
pub fn project(inst: &Instance, a: usize, b: usize, channels: &[usize]) -> (Instance, Vec<usize>) {
    let keep_ch: BTreeSet<usize> = channels.iter().copied().collect();
    let kept: Vec<usize> = inst.po[a]
        .iter()
        .chain(&inst.po[b])
        .copied()
        .filter(|&e| keep_ch.contains(&inst.events[e].channel))
        .collect();
    let raw: Vec<RawEvent> = kept.iter().map(|&e| inst.raw_event(e)).collect();
    let chans = channels.iter().map(|&c| inst.channels[c].clone()).collect();
    let rf = inst.rf.as_ref().map(|rf| {
        kept.iter()
            .filter_map(|&e| rf.dst[e].map(|r| (inst.events[e].id, inst.events[r].id)))
            .collect()
    });
    let proj = Instance::build(inst.kind, chans, raw, rf).expect("projection of a valid instance is valid");
    // Canonical order of the projection is (thread, po), which is exactly `kept`.
    (proj, kept)
}

/// Acyclic topologies with capacities in {0, 1, unbounded}: solve every pair of
/// communicating threads independently and merge the orders.
pub fn solve_acyclic(inst: &Instance) -> Result<Verdict, SolveError> {
    let rf = inst.rf.as_ref().ok_or(SolveError::MissingRf)?;
    let classes = classify_channels(inst);
    if let Some(ch) = classes.iter().position(|c| matches!(c, ChannelClass::Bounded(c) if *c >= 2)) {
        return Err(SolveError::Refused(format!(
            "channel {} has capacity {}",
            inst.channels[ch].name, inst.channels[ch].cap
        )));
    }
    let topo = communication_topology(inst);
    if !topo.acyclic {
        return Err(SolveError::Refused("communication topology has a cycle".into()));
    }
    if let Err(reason) = validate_rf(inst, rf, &classes) {
        return Ok(Verdict::inconsistent(Some(reason), 0));
    }
    for &ch in &topo.private_channels {
        if let Err(reason) = replay_private_channel(inst, rf, ch) {
            return Ok(Verdict::inconsistent(Some(reason), 0));
        }
    }

    let chan_threads = inst.channel_threads();
    let mut extra: Vec<(usize, usize)> = Vec::new();
    let mut total_clauses = 0;
    for &(a, b) in &topo.edges {
        let shared: Vec<usize> = (0..inst.m()).filter(|&c| chan_threads[c] == [a, b]).collect();
        let (proj, back) = project(inst, a, b, &shared);
        let enc = encode_2sat(&proj)?;
        total_clauses += enc.formula.clauses.len();
        match solve_2sat(&enc.formula) {
            TwoSatResult::Unsat => {
                let mut v = Verdict::inconsistent(
                    Some(format!(
                        "threads {} and {} cannot be ordered",
                        inst.threads[a], inst.threads[b]
                    )),
                    0,
                );
                v.clauses = Some(total_clauses);
                return Ok(v);
            }
            TwoSatResult::Satisfiable(assign) => {
                for (v, &(e, f)) in enc.variables.iter().enumerate() {
                    if assign[v] {
                        extra.push((back[e], back[f]));
                    }
                }
            }
        }
    }

    let witness = merge_orders(inst, rf, &classes, &extra)
        .ok_or_else(|| SolveError::Refused("pairwise orders could not be merged".into()))?;
    let mut v = Verdict::consistent(witness, 0);
    v.clauses = Some(total_clauses);
    Ok(v)
}

/// A channel used by one thread is fully ordered by program order; replay it.
fn replay_private_channel(inst: &Instance, rf: &ReadsFrom, ch: usize) -> Result<(), String> {
    let cap = inst.channels[ch].cap;
    let name = &inst.channels[ch].name;
    if cap.is_sync() {
        return Err(format!("synchronous channel {name} is used by a single thread"));
    }
    let mut queue = VecDeque::new();
    for seq in &inst.po {
        for &e in seq {
            let ev = &inst.events[e];
            if ev.channel != ch {
                continue;
            }
            match ev.op {
                Op::Snd => {
                    if !cap.admits(queue.len() as u64 + 1) {
                        return Err(format!("channel {name} overflows"));
                    }
                    queue.push_back(e);
                }
                Op::Rcv => {
                    if queue.pop_front() != rf.src[e] {
                        return Err(format!("receive {} cannot observe its rf source", ev.id));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Topological order of po plus `extra`, lowest thread first, with every
/// synchronous receive emitted right after its send.
///
/// Each matched synchronous pair is contracted into one unit before sorting, so
/// a send is only emitted once its receive is ready too.
fn merge_orders(inst: &Instance, rf: &ReadsFrom, classes: &[ChannelClass], extra: &[(usize, usize)]) -> Option<Vec<usize>> {
    let n = inst.n();
    let pos = inst.positions();
    let mut unit: Vec<usize> = (0..n).collect();
    let mut partner = vec![None; n];
    for (s, ev) in inst.events.iter().enumerate() {
        if ev.op == Op::Snd && classes[ev.channel] == ChannelClass::Sync {
            let r = rf.dst[s]?;
            unit[r] = s;
            partner[s] = Some(r);
        }
    }
    let mut out = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    let po_edges = inst.po.iter().flat_map(|seq| seq.windows(2).map(|w| (w[0], w[1])));
    for (e, f) in po_edges.chain(extra.iter().copied()) {
        let (u, v) = (unit[e], unit[f]);
        if u != v {
            out[u].push(v);
            indeg[v] += 1;
        }
    }
    let key = |e: usize| (inst.events[e].thread, pos[e]);
    let mut ready: BinaryHeap<Reverse<((usize, usize), usize)>> = (0..n)
        .filter(|&e| unit[e] == e && indeg[e] == 0)
        .map(|e| Reverse((key(e), e)))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, u))) = ready.pop() {
        order.push(u);
        order.extend(partner[u]);
        for &v in &out[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.push(Reverse((key(v), v)));
            }
        }
    }
    (order.len() == n).then_some(order)
}

//! Saturated happens-before order for instances with reads-from.
//!
//! Orderings that every concretization must respect are inferred from program
//! order and rf by four closure rules:
//!
//! 1. on one channel, two matched sends are ordered iff their receives are;
//! 2. matched sends precede unmatched sends on the same channel;
//! 3. on a synchronous channel, anything before the receive is before the send,
//!    and anything after the send is after the receive;
//! 4. on a capacity-1 channel, a send after a matched send is after its receive.
//!
//! The order is kept as per-thread vector clocks, recomputed in rounds until no
//! rule contributes a new edge.

use std::collections::HashMap;
use std::collections::HashSet;
use std::collections::VecDeque;

use crate::model::{classify_channels, ChannelClass, Instance, Op, ReadsFrom};

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct SaturatedOrder {
    t: usize,
    thread: Vec<u32>,
    pos: Vec<u32>,
    /// `need[e*t + τ]`: how many leading events of τ are ordered before e.
    need: Vec<u32>,
    /// `succ_index[e*t + τ]`: smallest position in τ ordered after e, or NONE.
    succ_index: Vec<u32>,
    pub cyclic: bool,
    pub rounds: usize,
    pub edges_added: usize,
}

impl SaturatedOrder {
    /// Is `e` ordered strictly before `f`?
    pub fn query(&self, e: usize, f: usize) -> bool {
        let s = self.succ_index[e * self.t + self.thread[f] as usize];
        s != NONE && s <= self.pos[f]
    }

    /// Every predecessor of `e` lies within the executed prefix `counts`.
    pub fn ready(&self, e: usize, counts: &[u32]) -> bool {
        let row = &self.need[e * self.t..(e + 1) * self.t];
        row.iter().zip(counts).all(|(&need, &have)| need <= have)
    }

    /// Number of leading events of thread `tau` ordered before `e`.
    pub fn need(&self, e: usize, tau: usize) -> u32 {
        self.need[e * self.t + tau]
    }

    /// Smallest position in `tau` ordered after `e`.
    pub fn successor_position(&self, e: usize, tau: usize) -> Option<u32> {
        let s = self.succ_index[e * self.t + tau];
        (s != NONE).then_some(s)
    }
}

struct Graph {
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
    set: HashSet<(usize, usize)>,
}

impl Graph {
    fn add(&mut self, a: usize, b: usize) -> bool {
        if !self.set.insert((a, b)) {
            return false;
        }
        self.out[a].push(b);
        self.inn[b].push(a);
        true
    }
}

/// Computes the least order closed under the four rules.
///
/// Receives without an rf source take part only through program order.
pub fn saturate(inst: &Instance) -> SaturatedOrder {
    let empty;
    let rf = match &inst.rf {
        Some(rf) => rf,
        None => {
            empty = ReadsFrom::empty(inst.n());
            &empty
        }
    };
    let n = inst.n();
    let t = inst.t();
    let classes = classify_channels(inst);
    let pos: Vec<u32> = inst.positions().into_iter().map(|p| p as u32).collect();
    let thread: Vec<u32> = inst.events.iter().map(|e| e.thread as u32).collect();
    let chan_threads = inst.channel_threads();

    // Matched sends / rf-receives per (thread, channel), in program order.
    let mut matched_sends: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut rf_rcvs: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for seq in &inst.po {
        for &e in seq {
            let ev = &inst.events[e];
            let key = (ev.thread, ev.channel);
            match ev.op {
                Op::Snd if rf.dst[e].is_some() => matched_sends.entry(key).or_default().push(e),
                Op::Rcv if rf.src[e].is_some() => rf_rcvs.entry(key).or_default().push(e),
                _ => {}
            }
        }
    }
    // Latest event in `list` whose position is below `limit`.
    let latest_below = |list: Option<&Vec<usize>>, limit: u32| -> Option<usize> {
        let list = list?;
        let k = list.partition_point(|&e| pos[e] < limit);
        (k > 0).then(|| list[k - 1])
    };

    let mut g = Graph {
        out: vec![Vec::new(); n],
        inn: vec![Vec::new(); n],
        set: HashSet::new(),
    };
    for (s, r) in rf.pairs() {
        g.add(s, r);
    }
    // Rule 2 is static: the last matched send of each thread precedes each unmatched send.
    for (e, ev) in inst.events.iter().enumerate() {
        if ev.op != Op::Snd || rf.dst[e].is_some() {
            continue;
        }
        for &tau in &chan_threads[ev.channel] {
            if let Some(s) = latest_below(matched_sends.get(&(tau, ev.channel)), u32::MAX) {
                if s != e {
                    g.add(s, e);
                }
            }
        }
    }

    let pairs = rf.pairs();
    let sends: Vec<usize> = (0..n).filter(|&e| inst.events[e].op == Op::Snd).collect();
    let mut need = vec![0u32; n * t];
    let mut succ = vec![NONE; n * t];
    let mut rounds = 0;
    let mut edges_added = 0;

    loop {
        rounds += 1;
        let Some(order) = topo_order(inst, &g, &pos) else {
            return SaturatedOrder {
                t,
                thread,
                pos,
                need,
                succ_index: succ,
                cyclic: true,
                rounds,
                edges_added,
            };
        };
        compute_clocks(inst, &g, &order, &pos, &thread, &mut need, &mut succ);

        let implied = |a: usize, b: usize| need[b * t + thread[a] as usize] > pos[a];
        let mut fresh = Vec::new();
        let propose = |a: usize, b: usize, fresh: &mut Vec<(usize, usize)>| {
            if a != b && !implied(a, b) {
                fresh.push((a, b));
            }
        };

        for &(s2, r2) in &pairs {
            let ch = inst.events[s2].channel;
            for &tau in &chan_threads[ch] {
                let limit = need[s2 * t + tau];
                if let Some(s1) = latest_below(matched_sends.get(&(tau, ch)), limit) {
                    if s1 != s2 {
                        propose(rf.dst[s1].unwrap(), r2, &mut fresh);
                    }
                }
                let limit = need[r2 * t + tau];
                if let Some(r1) = latest_below(rf_rcvs.get(&(tau, ch)), limit) {
                    if r1 != r2 {
                        propose(rf.src[r1].unwrap(), s2, &mut fresh);
                    }
                }
            }
            if classes[ch] == ChannelClass::Sync {
                for tau in 0..t {
                    let p = need[r2 * t + tau];
                    if p > 0 {
                        let before = inst.po[tau][p as usize - 1];
                        if before != s2 {
                            propose(before, s2, &mut fresh);
                        }
                    }
                    let q = succ[s2 * t + tau];
                    if q != NONE {
                        let after = inst.po[tau][q as usize];
                        if after != r2 {
                            propose(r2, after, &mut fresh);
                        }
                    }
                }
            }
        }
        for &s2 in &sends {
            let ch = inst.events[s2].channel;
            if classes[ch] != ChannelClass::Bounded(1) {
                continue;
            }
            for &tau in &chan_threads[ch] {
                let limit = need[s2 * t + tau];
                if let Some(s1) = latest_below(matched_sends.get(&(tau, ch)), limit) {
                    if s1 != s2 {
                        propose(rf.dst[s1].unwrap(), s2, &mut fresh);
                    }
                }
            }
        }

        let mut added = 0;
        for (a, b) in fresh {
            if g.add(a, b) {
                added += 1;
            }
        }
        edges_added += added;
        if added == 0 {
            return SaturatedOrder {
                t,
                thread,
                pos,
                need,
                succ_index: succ,
                cyclic: false,
                rounds,
                edges_added,
            };
        }
    }
}

/// Kahn's algorithm over program order plus the extra edges; `None` on a cycle.
fn topo_order(inst: &Instance, g: &Graph, pos: &[u32]) -> Option<Vec<usize>> {
    let n = inst.n();
    let mut indeg: Vec<usize> = (0..n)
        .map(|e| g.inn[e].len() + usize::from(pos[e] > 0))
        .collect();
    let mut queue: VecDeque<usize> = (0..n).filter(|&e| indeg[e] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(e) = queue.pop_front() {
        order.push(e);
        let ev = &inst.events[e];
        let next = inst.po[ev.thread].get(pos[e] as usize + 1).copied();
        for f in next.into_iter().chain(g.out[e].iter().copied()) {
            indeg[f] -= 1;
            if indeg[f] == 0 {
                queue.push_back(f);
            }
        }
    }
    (order.len() == n).then_some(order)
}

fn compute_clocks(
    inst: &Instance,
    g: &Graph,
    order: &[usize],
    pos: &[u32],
    thread: &[u32],
    need: &mut [u32],
    succ: &mut [u32],
) {
    let t = inst.t();
    need.fill(0);
    succ.fill(NONE);
    let join_max = |need: &mut [u32], e: usize, f: usize| {
        for tau in 0..t {
            need[e * t + tau] = need[e * t + tau].max(need[f * t + tau]);
        }
        let slot = &mut need[e * t + thread[f] as usize];
        *slot = (*slot).max(pos[f] + 1);
    };
    for &e in order {
        let tau = thread[e] as usize;
        if pos[e] > 0 {
            join_max(need, e, inst.po[tau][pos[e] as usize - 1]);
        }
        for &f in &g.inn[e] {
            join_max(need, e, f);
        }
    }
    let join_min = |succ: &mut [u32], e: usize, f: usize| {
        for tau in 0..t {
            succ[e * t + tau] = succ[e * t + tau].min(succ[f * t + tau]);
        }
        let slot = &mut succ[e * t + thread[f] as usize];
        *slot = (*slot).min(pos[f]);
    };
    for &e in order.iter().rev() {
        let tau = thread[e] as usize;
        if let Some(&next) = inst.po[tau].get(pos[e] as usize + 1) {
            join_min(succ, e, next);
        }
        for &f in &g.out[e] {
            join_min(succ, e, f);
        }
    }
}

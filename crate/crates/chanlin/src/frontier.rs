//! Frontier-graph search.
//!
//! A node records how many events each thread has executed, the contents of
//! every asynchronous channel and at most one synchronous send awaiting its
//! receive. The instance is consistent iff a node with every thread finished
//! and no pending handshake is reachable from the empty node.

use std::collections::{HashSet, VecDeque};

use crate::model::{classify_channels, ChannelClass, Instance, Op, ReadsFrom};
use crate::saturation::{saturate, SaturatedOrder};
use crate::verdict::{SolveError, Verdict};

const NO_PENDING: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontierNode {
    pub counts: Vec<u32>,
    /// Per channel, pending send events (front = oldest). Always empty for synchronous channels.
    pub queues: Vec<VecDeque<u32>>,
    pub pending_sync: Option<u32>,
}

impl FrontierNode {
    pub fn source(inst: &Instance) -> Self {
        FrontierNode {
            counts: vec![0; inst.t()],
            queues: vec![VecDeque::new(); inst.m()],
            pending_sync: None,
        }
    }
}

/// Canonical byte encoding: counts, then each queue as length-prefixed ids, then the pending send.
pub fn node_key(node: &FrontierNode) -> Vec<u8> {
    let queued: usize = node.queues.iter().map(VecDeque::len).sum();
    let mut key = Vec::with_capacity(4 * (node.counts.len() + node.queues.len() + queued + 1));
    for &c in &node.counts {
        key.extend_from_slice(&c.to_le_bytes());
    }
    for q in &node.queues {
        key.extend_from_slice(&(q.len() as u32).to_le_bytes());
        for &id in q {
            key.extend_from_slice(&id.to_le_bytes());
        }
    }
    key.extend_from_slice(&node.pending_sync.unwrap_or(NO_PENDING).to_le_bytes());
    key
}

enum Undo {
    Appended(usize),
    Popped(usize, u32),
    SetPending,
    ClearedPending(u32),
}

#[derive(Clone, Copy)]
enum Matching<'a> {
    Values,
    ReadsFrom(&'a ReadsFrom),
}

struct Search<'a> {
    inst: &'a Instance,
    classes: Vec<ChannelClass>,
    matching: Matching<'a>,
    order: Option<&'a SaturatedOrder>,
}

impl Search<'_> {
    /// Fires `e` if an edge labelled `e` leaves `node`.
    fn apply(&self, node: &mut FrontierNode, e: usize) -> Option<Undo> {
        let ev = &self.inst.events[e];
        let ch = ev.channel;
        let id = e as u32;
        let class = self.classes[ch];
        let undo = match (class, ev.op) {
            (ChannelClass::Sync, Op::Snd) => {
                if node.pending_sync.is_some() {
                    return None;
                }
                node.pending_sync = Some(id);
                Undo::SetPending
            }
            (ChannelClass::Sync, Op::Rcv) => {
                let s = node.pending_sync? as usize;
                let sv = &self.inst.events[s];
                if sv.channel != ch || sv.thread == ev.thread || !self.matches(s, e) {
                    return None;
                }
                node.pending_sync = None;
                Undo::ClearedPending(s as u32)
            }
            (_, Op::Snd) => {
                if node.pending_sync.is_some() {
                    return None;
                }
                if let ChannelClass::Bounded(c) = class {
                    if node.queues[ch].len() as u64 >= c {
                        return None;
                    }
                }
                node.queues[ch].push_back(id);
                Undo::Appended(ch)
            }
            (_, Op::Rcv) => {
                if node.pending_sync.is_some() {
                    return None;
                }
                let &front = node.queues[ch].front()?;
                if !self.matches(front as usize, e) {
                    return None;
                }
                node.queues[ch].pop_front();
                Undo::Popped(ch, front)
            }
        };
        node.counts[ev.thread] += 1;
        Some(undo)
    }

    fn undo(&self, node: &mut FrontierNode, e: usize, undo: Undo) {
        node.counts[self.inst.events[e].thread] -= 1;
        match undo {
            Undo::Appended(ch) => {
                node.queues[ch].pop_back();
            }
            Undo::Popped(ch, id) => node.queues[ch].push_front(id),
            Undo::SetPending => node.pending_sync = None,
            Undo::ClearedPending(s) => node.pending_sync = Some(s),
        }
    }

    fn matches(&self, s: usize, r: usize) -> bool {
        match self.matching {
            Matching::Values => self.inst.events[s].value == self.inst.events[r].value,
            Matching::ReadsFrom(rf) => rf.src[r] == Some(s),
        }
    }

    fn is_sink(&self, node: &FrontierNode) -> bool {
        node.pending_sync.is_none()
            && node
                .counts
                .iter()
                .zip(&self.inst.po)
                .all(|(&c, seq)| c as usize == seq.len())
    }

    /// Depth-first reachability with an explicit stack; threads tried in ascending order.
    fn run(&self) -> Verdict {
        let inst = self.inst;
        let t = inst.t();
        let mut node = FrontierNode::source(inst);
        let mut visited: HashSet<Vec<u8>> = HashSet::new();
        visited.insert(node_key(&node));
        let mut explored = 1u64;
        let mut path: Vec<(usize, Undo)> = Vec::new();
        let mut cursor: Vec<usize> = vec![0];

        loop {
            if self.is_sink(&node) {
                return Verdict::consistent(path.iter().map(|&(e, _)| e).collect(), explored);
            }
            let depth = cursor.len() - 1;
            let mut advanced = false;
            while cursor[depth] < t {
                let tau = cursor[depth];
                cursor[depth] += 1;
                let Some(&e) = inst.po[tau].get(node.counts[tau] as usize) else {
                    continue;
                };
                if let Some(order) = self.order {
                    if !order.ready(e, &node.counts) {
                        continue;
                    }
                }
                let Some(undo) = self.apply(&mut node, e) else {
                    continue;
                };
                if visited.insert(node_key(&node)) {
                    explored += 1;
                    path.push((e, undo));
                    cursor.push(0);
                    advanced = true;
                    break;
                }
                self.undo(&mut node, e, undo);
            }
            if !advanced {
                cursor.pop();
                match path.pop() {
                    Some((e, undo)) => self.undo(&mut node, e, undo),
                    None => return Verdict::inconsistent(None, explored),
                }
            }
        }
    }
}

/// Decides consistency from values alone.
pub fn solve_vch(inst: &Instance) -> Result<Verdict, SolveError> {
    if let Some(e) = inst.events.iter().find(|e| e.value.is_none()) {
        return Err(SolveError::MissingValue(e.id));
    }
    Ok(Search {
        inst,
        classes: classify_channels(inst),
        matching: Matching::Values,
        order: None,
    }
    .run())
}

/// Values carry no rf to saturate over, so this is `solve_vch`.
pub fn solve_vch_saturated(inst: &Instance) -> Result<Verdict, SolveError> {
    solve_vch(inst)
}

/// Decides consistency against the instance's reads-from relation.
pub fn solve_vchrf(inst: &Instance) -> Result<Verdict, SolveError> {
    let rf = inst.rf.as_ref().ok_or(SolveError::MissingRf)?;
    let classes = classify_channels(inst);
    if let Err(reason) = validate_rf(inst, rf, &classes) {
        return Ok(Verdict::inconsistent(Some(reason), 0));
    }
    Ok(Search {
        inst,
        classes,
        matching: Matching::ReadsFrom(rf),
        order: None,
    }
    .run())
}

/// As `solve_vchrf`, rejecting early on a cyclic saturated order and otherwise
/// expanding only events whose saturated predecessors have all executed.
pub fn solve_vchrf_saturated(inst: &Instance) -> Result<Verdict, SolveError> {
    let rf = inst.rf.as_ref().ok_or(SolveError::MissingRf)?;
    let classes = classify_channels(inst);
    if let Err(reason) = validate_rf(inst, rf, &classes) {
        return Ok(Verdict::inconsistent(Some(reason), 0));
    }
    let order = saturate(inst);
    if order.cyclic {
        return Ok(Verdict::inconsistent(Some("saturated order is cyclic".into()), 0));
    }
    Ok(Search {
        inst,
        classes,
        matching: Matching::ReadsFrom(rf),
        order: Some(&order),
    }
    .run())
}

/// Structural conditions every rf-consistent instance meets; the error names the first failure.
pub fn validate_rf(inst: &Instance, rf: &ReadsFrom, classes: &[ChannelClass]) -> Result<(), String> {
    let mut unmatched = vec![0u64; inst.m()];
    for (e, ev) in inst.events.iter().enumerate() {
        let sync = classes[ev.channel] == ChannelClass::Sync;
        match ev.op {
            Op::Rcv => {
                let Some(s) = rf.src[e] else {
                    return Err(format!("receive {} has no rf source", ev.id));
                };
                let sv = &inst.events[s];
                if sv.channel != ev.channel {
                    return Err(format!("rf pair ({}, {}) spans two channels", sv.id, ev.id));
                }
                if sync && sv.thread == ev.thread {
                    return Err(format!("synchronous rf pair ({}, {}) within one thread", sv.id, ev.id));
                }
            }
            Op::Snd => {
                if rf.dst[e].is_none() {
                    if sync {
                        return Err(format!("synchronous send {} is never received", ev.id));
                    }
                    unmatched[ev.channel] += 1;
                }
            }
        }
    }
    for (ch, &u) in unmatched.iter().enumerate() {
        if !inst.channels[ch].cap.admits(u) {
            return Err(format!(
                "channel {} ends with {u} unreceived messages, above its capacity",
                inst.channels[ch].name
            ));
        }
    }
    Ok(())
}

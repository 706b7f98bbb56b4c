//! Exhaustive interleaving enumeration, the reference answer for small instances.

use crate::model::{Instance, Op, ReadsFrom};
use crate::verdict::{SolveError, Verdict};

pub const DEFAULT_BOUND: usize = 12;

/// Searches all program-order-respecting interleavings for a valid one.
///
/// With `rf` the receives must observe exactly their rf sources; without it,
/// matching is by value. Returns the lexicographically first witness when
/// threads are ranked by token.
pub fn brute_force(inst: &Instance, rf: Option<&ReadsFrom>) -> Result<Verdict, SolveError> {
    brute_force_bounded(inst, rf, DEFAULT_BOUND)
}

pub fn brute_force_bounded(inst: &Instance, rf: Option<&ReadsFrom>, bound: usize) -> Result<Verdict, SolveError> {
    if inst.n() > bound {
        return Err(SolveError::TooLarge { n: inst.n(), bound });
    }
    let mut st = State {
        inst,
        rf,
        next: vec![0; inst.t()],
        sent: vec![Vec::new(); inst.m()],
        received: vec![0; inst.m()],
        pending: None,
        prefix: Vec::with_capacity(inst.n()),
        explored: 0,
    };
    Ok(if st.extend() {
        Verdict::consistent(st.prefix, st.explored)
    } else {
        Verdict::inconsistent(None, st.explored)
    })
}

struct State<'a> {
    inst: &'a Instance,
    rf: Option<&'a ReadsFrom>,
    next: Vec<usize>,
    /// Sends on each channel, in execution order.
    sent: Vec<Vec<usize>>,
    received: Vec<usize>,
    pending: Option<usize>,
    prefix: Vec<usize>,
    explored: u64,
}

impl State<'_> {
    fn extend(&mut self) -> bool {
        self.explored += 1;
        if self.prefix.len() == self.inst.n() {
            return self.pending.is_none();
        }
        for tau in 0..self.inst.t() {
            let Some(&e) = self.inst.po[tau].get(self.next[tau]) else {
                continue;
            };
            if !self.admissible(e) {
                continue;
            }
            let saved_pending = self.pending;
            self.push(e);
            if self.extend() {
                return true;
            }
            self.pop(e, saved_pending);
        }
        false
    }

    fn observes(&self, s: usize, r: usize) -> bool {
        let (vs, vr) = (self.inst.events[s].value, self.inst.events[r].value);
        match self.rf {
            Some(rf) => rf.src[r] == Some(s) && (vs.is_none() || vr.is_none() || vs == vr),
            None => vs == vr,
        }
    }

    fn admissible(&self, e: usize) -> bool {
        let ev = &self.inst.events[e];
        let cap = self.inst.channels[ev.channel].cap;
        if let Some(s) = self.pending {
            let sv = &self.inst.events[s];
            return ev.op == Op::Rcv && ev.channel == sv.channel && ev.thread != sv.thread && self.observes(s, e);
        }
        if cap.is_sync() {
            return ev.op == Op::Snd;
        }
        let in_flight = (self.sent[ev.channel].len() - self.received[ev.channel]) as u64;
        match ev.op {
            Op::Snd => cap.admits(in_flight + 1),
            Op::Rcv => {
                in_flight > 0 && self.observes(self.sent[ev.channel][self.received[ev.channel]], e)
            }
        }
    }

    fn push(&mut self, e: usize) {
        let ev = &self.inst.events[e];
        self.next[ev.thread] += 1;
        self.prefix.push(e);
        let sync = self.inst.channels[ev.channel].cap.is_sync();
        match ev.op {
            Op::Snd => {
                self.sent[ev.channel].push(e);
                if sync {
                    self.pending = Some(e);
                }
            }
            Op::Rcv => {
                self.received[ev.channel] += 1;
                self.pending = None;
            }
        }
    }

    fn pop(&mut self, e: usize, saved_pending: Option<usize>) {
        let ev = &self.inst.events[e];
        self.next[ev.thread] -= 1;
        self.prefix.pop();
        match ev.op {
            Op::Snd => {
                self.sent[ev.channel].pop();
            }
            Op::Rcv => self.received[ev.channel] -= 1,
        }
        self.pending = saved_pending;
    }
}

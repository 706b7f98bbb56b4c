//! Well-formedness of concrete traces and abstraction back to (po, rf).

use std::collections::VecDeque;

use crate::model::{Instance, Op, ReadsFrom};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// A receive on an empty channel, or a send into a full one.
    Capacity,
    /// A synchronous send not immediately received (or a receive not immediately after its send).
    Sync,
    /// A receive observing a different value than the one at the channel's head.
    Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind:?} violation at trace position {position}")]
pub struct Violation {
    pub kind: ViolationKind,
    /// 1-based position in the trace of the first offending event.
    pub position: usize,
}

/// Checks the capacity, synchronous-handshake and value constraints in one pass.
///
/// Values are compared only when both sides carry one.
pub fn check_well_formed(inst: &Instance, trace: &[usize]) -> Result<(), Violation> {
    let mut queues: Vec<VecDeque<Option<usize>>> = vec![VecDeque::new(); inst.m()];
    let fail = |kind, i: usize| Err(Violation { kind, position: i + 1 });

    for (i, &e) in trace.iter().enumerate() {
        let ev = &inst.events[e];
        let cap = inst.channels[ev.channel].cap;
        if cap.is_sync() {
            match ev.op {
                Op::Snd => {
                    let ok = trace.get(i + 1).is_some_and(|&f| {
                        let fv = &inst.events[f];
                        fv.op == Op::Rcv
                            && fv.channel == ev.channel
                            && fv.thread != ev.thread
                            && values_agree(ev.value, fv.value)
                    });
                    if !ok {
                        return fail(ViolationKind::Sync, i);
                    }
                }
                Op::Rcv => {
                    let ok = i > 0 && {
                        let pv = &inst.events[trace[i - 1]];
                        pv.op == Op::Snd && pv.channel == ev.channel && pv.thread != ev.thread
                    };
                    if !ok {
                        return fail(ViolationKind::Sync, i);
                    }
                }
            }
            continue;
        }
        let q = &mut queues[ev.channel];
        match ev.op {
            Op::Snd => {
                if !cap.admits(q.len() as u64 + 1) {
                    return fail(ViolationKind::Capacity, i);
                }
                q.push_back(ev.value);
            }
            Op::Rcv => match q.pop_front() {
                None => return fail(ViolationKind::Capacity, i),
                Some(v) if !values_agree(v, ev.value) => return fail(ViolationKind::Value, i),
                Some(_) => {}
            },
        }
    }
    Ok(())
}

fn values_agree(a: Option<usize>, b: Option<usize>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => a == b,
        _ => true,
    }
}

/// Per-thread order of `trace` and the i-th-send-to-i-th-receive matching.
pub fn derive_abstract(inst: &Instance, trace: &[usize]) -> (Vec<Vec<usize>>, ReadsFrom) {
    let mut po = vec![Vec::new(); inst.t()];
    let mut rf = ReadsFrom::empty(inst.n());
    let mut pending: Vec<VecDeque<usize>> = vec![VecDeque::new(); inst.m()];
    for &e in trace {
        let ev = &inst.events[e];
        po[ev.thread].push(e);
        match ev.op {
            Op::Snd => pending[ev.channel].push_back(e),
            Op::Rcv => {
                if let Some(s) = pending[ev.channel].pop_front() {
                    rf.link(s, e);
                }
            }
        }
    }
    (po, rf)
}

/// Abstracts a `kind trace` instance into its execution with derived rf.
pub fn abstract_trace(inst: &Instance) -> Instance {
    let trace = inst.source_order();
    let (_, rf) = derive_abstract(inst, &trace);
    let mut out = inst.as_abstract();
    out.rf = Some(rf);
    out
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("witness is not a permutation of the instance events")]
    NotPermutation,
    #[error("witness reorders thread {0}")]
    ProgramOrder(String),
    #[error(transparent)]
    IllFormed(#[from] Violation),
    #[error("witness induces a different reads-from relation")]
    ReadsFrom,
}

/// Full concretization check: permutation, program order, well-formedness and rf.
pub fn verify_witness(inst: &Instance, witness: &[usize]) -> Result<(), WitnessError> {
    let mut seen = vec![false; inst.n()];
    if witness.len() != inst.n() {
        return Err(WitnessError::NotPermutation);
    }
    for &e in witness {
        if e >= inst.n() || std::mem::replace(&mut seen[e], true) {
            return Err(WitnessError::NotPermutation);
        }
    }
    let (po, rf) = derive_abstract(inst, witness);
    for (t, seq) in po.iter().enumerate() {
        if *seq != inst.po[t] {
            return Err(WitnessError::ProgramOrder(inst.threads[t].clone()));
        }
    }
    check_well_formed(inst, witness)?;
    if let Some(expected) = &inst.rf {
        if rf != *expected {
            return Err(WitnessError::ReadsFrom);
        }
    }
    Ok(())
}

use std::collections::{BTreeMap, HashMap};

use super::builder::Builder;
use super::sources::{MemOp, VscReadInstance};
use super::GenError;
use crate::model::{Capacity, EventId, Instance};

/// VCh-rf instance over capacity-1 channels that is consistent iff the memory
/// execution `v` is sequentially consistent.
///
/// Every memory event becomes an atomic block guarded by channel `lock`. A
/// write on `x` sends one token on each of `x`'s channels and immediately
/// consumes the tokens none of its readers will take; the i-th reader (by
/// event id) of a write receives on the i-th channel.
pub fn from_vsc_read(v: &VscReadInstance) -> Result<Instance, GenError> {
    let v = VscReadInstance::new(v.events.clone(), v.rf.clone())?;

    // Readers of each write, ordered by id; the reader's slot number.
    let mut readers: HashMap<u64, Vec<u64>> = HashMap::new();
    for &(w, r) in &v.rf {
        readers.entry(w).or_default().push(r);
    }
    let mut slot: HashMap<u64, (u64, usize)> = HashMap::new();
    for (w, rs) in readers.iter_mut() {
        rs.sort_unstable();
        for (i, &r) in rs.iter().enumerate() {
            slot.insert(r, (*w, i + 1));
        }
    }
    let mut width: BTreeMap<&str, usize> = BTreeMap::new();
    for e in &v.events {
        let w = width.entry(&e.register).or_insert(0);
        if e.op == MemOp::Write {
            *w = (*w).max(readers.get(&e.id).map_or(0, Vec::len));
        }
    }

    let ch = |x: &str, i: usize| format!("ch_{x}_{i}");
    let mut b = Builder::default();
    for (x, &m) in &width {
        for i in 1..=m {
            b.channel(ch(x, i), Capacity::Finite(1));
        }
    }
    b.channel("lock", Capacity::Finite(1));

    let mut write_sends: HashMap<(u64, usize), EventId> = HashMap::new();
    let mut read_rcvs: Vec<(u64, usize, EventId)> = Vec::new();
    for e in &v.events {
        let t = e.thread.as_str();
        let x = e.register.as_str();
        let lock = b.snd(t, "lock");
        match e.op {
            MemOp::Write => {
                let m = width[x];
                let p = readers.get(&e.id).map_or(0, Vec::len);
                let sends: Vec<EventId> = (1..=m).map(|i| b.snd(t, &ch(x, i))).collect();
                for i in p + 1..=m {
                    let r = b.rcv(t, &ch(x, i));
                    b.rf(sends[i - 1], r);
                }
                for i in 1..=p {
                    write_sends.insert((e.id, i), sends[i - 1]);
                }
            }
            MemOp::Read => {
                let (w, i) = slot[&e.id];
                read_rcvs.push((w, i, b.rcv(t, &ch(x, i))));
            }
        }
        let r = b.rcv(t, "lock");
        b.rf(lock, r);
    }
    for (w, i, r) in read_rcvs {
        b.rf(write_sends[&(w, i)], r);
    }
    Ok(b.finish(true))
}

//! Domain model: events, executions, capacities and reads-from.
//!
//! Events are stored densely. Index `i` refers to `Instance::events[i]`; the dense
//! order is canonical (threads sorted by token, then program order) so two
//! instances describing the same execution compare equal regardless of the
//! order lines appeared in their source file.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

pub type EventId = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Snd,
    Rcv,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op::Snd => "snd",
            Op::Rcv => "rcv",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Capacity {
    Finite(u64),
    Inf,
}

impl Capacity {
    pub fn is_sync(self) -> bool {
        self == Capacity::Finite(0)
    }

    /// True when `count` messages fit.
    pub fn admits(self, count: u64) -> bool {
        match self {
            Capacity::Finite(c) => count <= c,
            Capacity::Inf => true,
        }
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(c) => write!(f, "{c}"),
            Capacity::Inf => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelClass {
    Sync,
    Bounded(u64),
    EffectivelyUnbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Channel {
    pub name: String,
    pub cap: Capacity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub id: EventId,
    /// Index into `Instance::threads`.
    pub thread: usize,
    pub op: Op,
    /// Index into `Instance::channels`.
    pub channel: usize,
    /// Index into `Instance::values`.
    pub value: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Abstract,
    Trace,
}

/// Partial injective matching between sends and receives, indexed by dense event index.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ReadsFrom {
    /// For a receive: its send.
    pub src: Vec<Option<usize>>,
    /// For a send: its receive.
    pub dst: Vec<Option<usize>>,
}

impl ReadsFrom {
    pub fn empty(n: usize) -> Self {
        ReadsFrom {
            src: vec![None; n],
            dst: vec![None; n],
        }
    }

    /// Pairs ordered by send index.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.dst
            .iter()
            .enumerate()
            .filter_map(|(s, r)| r.map(|r| (s, r)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.dst.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn link(&mut self, s: usize, r: usize) {
        self.dst[s] = Some(r);
        self.src[r] = Some(s);
    }

    pub fn unlink(&mut self, s: usize) {
        if let Some(r) = self.dst[s].take() {
            self.src[r] = None;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub kind: Kind,
    /// Declaration order.
    pub channels: Vec<Channel>,
    /// Sorted by token.
    pub threads: Vec<String>,
    /// Interned value tokens, first-use order over the canonical event order.
    pub values: Vec<String>,
    /// Canonical order: by thread, then program order.
    pub events: Vec<Event>,
    /// Program order per thread, as dense indices. `po[t]` is a contiguous range.
    pub po: Vec<Vec<usize>>,
    /// Global order for `kind trace`.
    pub trace: Option<Vec<usize>>,
    pub rf: Option<ReadsFrom>,
}

/// Builder-friendly description of an event before interning.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawEvent {
    pub id: EventId,
    pub thread: String,
    pub op: Op,
    pub channel: String,
    pub value: Option<String>,
}

impl RawEvent {
    pub fn new(id: EventId, thread: &str, op: Op, channel: &str, value: Option<&str>) -> Self {
        RawEvent {
            id,
            thread: thread.to_string(),
            op,
            channel: channel.to_string(),
            value: value.map(str::to_string),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("duplicate event id {0}")]
    DuplicateEvent(EventId),
    #[error("duplicate channel `{0}`")]
    DuplicateChannel(String),
    #[error("channel `{0}` has no capacity declaration")]
    UndeclaredChannel(String),
    #[error("rf endpoint {0} does not exist")]
    RfMissing(EventId),
    #[error("rf endpoint op mismatch")]
    RfOpMismatch,
    #[error("rf endpoints {0} and {1} are on different channels")]
    RfChannelMismatch(EventId, EventId),
    #[error("rf endpoint {0} used twice")]
    RfNotInjective(EventId),
    #[error("rf pair ({0}, {1}) carries different values")]
    RfValueMismatch(EventId, EventId),
}

impl Instance {
    pub fn empty() -> Self {
        Instance {
            kind: Kind::Abstract,
            channels: Vec::new(),
            threads: Vec::new(),
            values: Vec::new(),
            events: Vec::new(),
            po: Vec::new(),
            trace: None,
            rf: None,
        }
    }

    /// Builds an instance from events listed in source order.
    ///
    /// For `Kind::Abstract` the per-thread order of `events` is program order;
    /// for `Kind::Trace` the whole list is the trace. `rf` pairs are event ids
    /// and `None` means "no reads-from" (a plain VCh instance).
    pub fn build(
        kind: Kind,
        channels: Vec<Channel>,
        events: Vec<RawEvent>,
        rf: Option<Vec<(EventId, EventId)>>,
    ) -> Result<Instance, BuildError> {
        Self::build_indexed(kind, channels, events, rf).map_err(|(e, _)| e)
    }

    /// As `build`, but also reports which input item failed: `Some(i)` for the
    /// i-th event, `None` for channel or rf problems (the caller knows which rf).
    pub(crate) fn build_indexed(
        kind: Kind,
        channels: Vec<Channel>,
        events: Vec<RawEvent>,
        rf: Option<Vec<(EventId, EventId)>>,
    ) -> Result<Instance, (BuildError, BuildSite)> {
        let mut chan_ix: HashMap<&str, usize> = HashMap::new();
        for (i, c) in channels.iter().enumerate() {
            if chan_ix.insert(c.name.as_str(), i).is_some() {
                return Err((BuildError::DuplicateChannel(c.name.clone()), BuildSite::Channel(i)));
            }
        }
        let mut seen = HashMap::new();
        for (i, e) in events.iter().enumerate() {
            if seen.insert(e.id, i).is_some() {
                return Err((BuildError::DuplicateEvent(e.id), BuildSite::Event(i)));
            }
            if !chan_ix.contains_key(e.channel.as_str()) {
                return Err((BuildError::UndeclaredChannel(e.channel.clone()), BuildSite::Event(i)));
            }
        }

        let mut thread_names: Vec<String> = events.iter().map(|e| e.thread.clone()).collect();
        thread_names.sort();
        thread_names.dedup();
        let thread_ix: HashMap<&str, usize> = thread_names
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i))
            .collect();

        // Stable bucket by thread keeps program order.
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); thread_names.len()];
        for (i, e) in events.iter().enumerate() {
            buckets[thread_ix[e.thread.as_str()]].push(i);
        }
        let mut dense_of_src = vec![0usize; events.len()];
        let mut order = Vec::with_capacity(events.len());
        let mut po = Vec::with_capacity(buckets.len());
        for b in &buckets {
            let mut seq = Vec::with_capacity(b.len());
            for &src in b {
                dense_of_src[src] = order.len();
                seq.push(order.len());
                order.push(src);
            }
            po.push(seq);
        }

        let mut values: Vec<String> = Vec::new();
        let mut value_ix: HashMap<String, usize> = HashMap::new();
        let mut dense = Vec::with_capacity(events.len());
        for &src in &order {
            let e = &events[src];
            let value = e.value.as_ref().map(|v| {
                *value_ix.entry(v.clone()).or_insert_with(|| {
                    values.push(v.clone());
                    values.len() - 1
                })
            });
            dense.push(Event {
                id: e.id,
                thread: thread_ix[e.thread.as_str()],
                op: e.op,
                channel: chan_ix[e.channel.as_str()],
                value,
            });
        }

        let trace = match kind {
            Kind::Trace => Some((0..events.len()).map(|src| dense_of_src[src]).collect()),
            Kind::Abstract => None,
        };

        let rf = match rf {
            None => None,
            Some(pairs) => {
                let mut out = ReadsFrom::empty(dense.len());
                for (k, &(s, r)) in pairs.iter().enumerate() {
                    let site = BuildSite::Rf(k);
                    let si = *seen.get(&s).ok_or((BuildError::RfMissing(s), site))?;
                    let ri = *seen.get(&r).ok_or((BuildError::RfMissing(r), site))?;
                    let (si, ri) = (dense_of_src[si], dense_of_src[ri]);
                    let (es, er) = (&dense[si], &dense[ri]);
                    if es.op != Op::Snd || er.op != Op::Rcv {
                        return Err((BuildError::RfOpMismatch, site));
                    }
                    if es.channel != er.channel {
                        return Err((BuildError::RfChannelMismatch(s, r), site));
                    }
                    if out.dst[si].is_some() {
                        return Err((BuildError::RfNotInjective(s), site));
                    }
                    if out.src[ri].is_some() {
                        return Err((BuildError::RfNotInjective(r), site));
                    }
                    if let (Some(a), Some(b)) = (es.value, er.value) {
                        if a != b {
                            return Err((BuildError::RfValueMismatch(s, r), site));
                        }
                    }
                    out.link(si, ri);
                }
                Some(out)
            }
        };

        Ok(Instance {
            kind,
            channels,
            threads: thread_names,
            values,
            events: dense,
            po,
            trace,
            rf,
        })
    }

    /// Number of events.
    pub fn n(&self) -> usize {
        self.events.len()
    }

    /// Number of threads.
    pub fn t(&self) -> usize {
        self.threads.len()
    }

    /// Number of declared channels (including ones no event touches).
    pub fn m(&self) -> usize {
        self.channels.len()
    }

    /// Largest finite capacity, or `Inf` if any channel is unbounded. `None` when there are no channels.
    pub fn k(&self) -> Option<Capacity> {
        self.channels.iter().map(|c| c.cap).max()
    }

    pub fn has_rf(&self) -> bool {
        self.rf.is_some()
    }

    pub fn has_all_values(&self) -> bool {
        self.events.iter().all(|e| e.value.is_some())
    }

    /// Position of each event within its thread.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.n()];
        for seq in &self.po {
            for (p, &e) in seq.iter().enumerate() {
                pos[e] = p;
            }
        }
        pos
    }

    pub fn event_index(&self) -> HashMap<EventId, usize> {
        self.events.iter().enumerate().map(|(i, e)| (e.id, i)).collect()
    }

    pub fn value_str(&self, e: usize) -> Option<&str> {
        self.events[e].value.map(|v| self.values[v].as_str())
    }

    pub fn raw_event(&self, e: usize) -> RawEvent {
        let ev = &self.events[e];
        RawEvent {
            id: ev.id,
            thread: self.threads[ev.thread].clone(),
            op: ev.op,
            channel: self.channels[ev.channel].name.clone(),
            value: self.value_str(e).map(str::to_string),
        }
    }

    /// Events per channel in canonical order.
    pub fn channel_events(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.m()];
        for (i, e) in self.events.iter().enumerate() {
            out[e.channel].push(i);
        }
        out
    }

    pub fn send_counts(&self) -> Vec<u64> {
        let mut out = vec![0; self.m()];
        for e in &self.events {
            if e.op == Op::Snd {
                out[e.channel] += 1;
            }
        }
        out
    }

    /// Rebuilds an instance with different events / rf, keeping channels.
    pub fn with_rf_pairs(&self, pairs: Option<Vec<(EventId, EventId)>>) -> Result<Instance, BuildError> {
        let events = self.source_order().into_iter().map(|e| self.raw_event(e)).collect();
        Instance::build(self.kind, self.channels.clone(), events, pairs)
    }

    /// Event order as it would appear in a file: the trace for `kind trace`, else canonical.
    pub fn source_order(&self) -> Vec<usize> {
        match &self.trace {
            Some(t) => t.clone(),
            None => (0..self.n()).collect(),
        }
    }

    /// Drops the global order, keeping program order and rf.
    pub fn as_abstract(&self) -> Instance {
        let mut out = self.clone();
        out.kind = Kind::Abstract;
        out.trace = None;
        out
    }

    /// Same events, no reads-from.
    pub fn without_rf(&self) -> Instance {
        let mut out = self.clone();
        out.rf = None;
        out
    }

    /// Same execution with all values erased. Value interning is reset.
    pub fn without_values(&self) -> Instance {
        let mut out = self.clone();
        out.values.clear();
        for e in &mut out.events {
            e.value = None;
        }
        out
    }

    /// rf pairs as event ids, ordered by send.
    pub fn rf_id_pairs(&self) -> Option<Vec<(EventId, EventId)>> {
        self.rf.as_ref().map(|rf| {
            rf.pairs()
                .into_iter()
                .map(|(s, r)| (self.events[s].id, self.events[r].id))
                .collect()
        })
    }

    /// Threads touching each channel, sorted.
    pub fn channel_threads(&self) -> Vec<Vec<usize>> {
        let mut sets: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); self.m()];
        for e in &self.events {
            sets[e.channel].insert(e.thread);
        }
        sets.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Map from value token to index, for callers constructing instances.
    pub fn value_index(&self) -> BTreeMap<&str, usize> {
        self.values.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect()
    }
}

/// Where a build error originated, so the parser can attach a line number.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum BuildSite {
    Channel(usize),
    Event(usize),
    Rf(usize),
}

/// Classifies every declared channel.
pub fn classify_channels(inst: &Instance) -> Vec<ChannelClass> {
    let sends = inst.send_counts();
    inst.channels
        .iter()
        .zip(sends)
        .map(|(c, s)| match c.cap {
            Capacity::Finite(0) => ChannelClass::Sync,
            Capacity::Inf => ChannelClass::EffectivelyUnbounded,
            Capacity::Finite(k) if s <= k => ChannelClass::EffectivelyUnbounded,
            Capacity::Finite(k) => ChannelClass::Bounded(k),
        })
        .collect()
}

//! Instance generators: random positive executions, the rf mutation fuzzer and
//! known-answer reductions from classic hard problems.

mod builder;
mod hamiltonian;
mod one_in_three;
mod ov;
mod sources;
mod t3m5;
mod vsc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use hamiltonian::from_hamiltonian;
pub use one_in_three::from_one_in_three_two_threads;
pub use ov::from_orthogonal_vectors;
pub use sources::{parse_dimacs, parse_digraph, parse_ov, parse_vsc, CnfFormula, Graph, MemEvent, MemOp, OvInstance, VscReadInstance};
pub use t3m5::from_3sat_t3_m5;
pub use vsc::from_vsc_read;

use crate::model::{Capacity, Channel, Instance, Kind, Op, RawEvent};
use crate::wellformed::abstract_trace;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("instance has no reads-from pairs to mutate")]
    NoRf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomParams {
    pub events: usize,
    pub threads: usize,
    pub channels: usize,
    /// Each channel's capacity is drawn from this menu.
    pub capacities: Vec<Capacity>,
    /// Number of distinct message values.
    pub values: usize,
    pub seed: u64,
}

impl RandomParams {
    pub fn new(events: usize, threads: usize, channels: usize, seed: u64) -> Self {
        RandomParams {
            events,
            threads,
            channels,
            capacities: vec![Capacity::Finite(0), Capacity::Finite(1), Capacity::Finite(2), Capacity::Inf],
            values: 2,
            seed,
        }
    }
}

/// Simulates a random well-formed execution and abstracts it (values and rf kept).
///
/// Returns the instance and the simulated trace, which witnesses consistency.
/// Produces `events` events unless only synchronous handshakes remain with one
/// slot left, in which case it stops one short.
pub fn random_positive(p: &RandomParams) -> Result<(Instance, Vec<usize>), GenError> {
    if p.events == 0 {
        let empty = Instance::empty().with_rf_pairs(Some(Vec::new())).expect("empty rf is valid");
        return Ok((empty, Vec::new()));
    }
    if p.threads == 0 || p.channels == 0 || p.capacities.is_empty() || p.values == 0 {
        return Err(GenError::InvalidParams("threads, channels, capacities and values must be non-empty".into()));
    }
    if p.threads == 1 && p.capacities.contains(&Capacity::Finite(0)) {
        return Err(GenError::InvalidParams("synchronous channels need at least two threads".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let channels: Vec<Channel> = (0..p.channels)
        .map(|c| Channel {
            name: format!("c{}", c + 1),
            cap: *p.capacities.choose(&mut rng).unwrap(),
        })
        .collect();
    let thread = |t: usize| format!("t{}", t + 1);
    let value = |v: usize| format!("v{v}");

    #[derive(Clone, Copy)]
    enum Action {
        Send(usize, usize),
        Recv(usize, usize),
        Handshake(usize, usize, usize),
    }
    let mut queues: Vec<std::collections::VecDeque<usize>> = vec![Default::default(); p.channels];
    let mut events: Vec<RawEvent> = Vec::with_capacity(p.events);
    while events.len() < p.events {
        let left = p.events - events.len();
        let mut actions = Vec::new();
        for (c, ch) in channels.iter().enumerate() {
            if ch.cap.is_sync() {
                if left >= 2 {
                    for a in 0..p.threads {
                        for b in 0..p.threads {
                            if a != b {
                                actions.push(Action::Handshake(c, a, b));
                            }
                        }
                    }
                }
                continue;
            }
            for t in 0..p.threads {
                if ch.cap.admits(queues[c].len() as u64 + 1) {
                    actions.push(Action::Send(c, t));
                }
                if !queues[c].is_empty() {
                    actions.push(Action::Recv(c, t));
                }
            }
        }
        let Some(&action) = actions.choose(&mut rng) else {
            break;
        };
        let mut push = |t: usize, op: Op, c: usize, v: usize| {
            let id = events.len() as u64 + 1;
            events.push(RawEvent::new(id, &thread(t), op, &channels[c].name, Some(&value(v))));
        };
        match action {
            Action::Send(c, t) => {
                let v = rng.gen_range(0..p.values);
                queues[c].push_back(v);
                push(t, Op::Snd, c, v);
            }
            Action::Recv(c, t) => {
                let v = queues[c].pop_front().unwrap();
                push(t, Op::Rcv, c, v);
            }
            Action::Handshake(c, a, b) => {
                let v = rng.gen_range(0..p.values);
                push(a, Op::Snd, c, v);
                push(b, Op::Rcv, c, v);
            }
        }
    }
    let trace = Instance::build(Kind::Trace, channels, events, None).expect("simulated events are well-typed");
    let witness = trace.trace.clone().unwrap();
    Ok((abstract_trace(&trace), witness))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MutationReport {
    pub rounds: usize,
    pub applied: usize,
    pub skipped: usize,
}

/// Default number of mutation rounds for an instance of `n` events.
pub fn default_rounds(n: usize) -> usize {
    n.div_ceil(20).max(5)
}

/// Perturbs the reads-from relation.
///
/// Each round picks an rf pair (s1, r1) and another send s2 on the same
/// channel. A matched s2 swaps receives with s1; an unmatched s2 takes over r1
/// and leaves s1 unmatched. Rounds without an alternative send are skipped.
/// Values are dropped once any round applies, since they would contradict the
/// new pairing.
pub fn mutate_rf(inst: &Instance, seed: u64, rounds: Option<usize>) -> Result<(Instance, MutationReport), GenError> {
    let mut rf = match &inst.rf {
        Some(rf) if !rf.is_empty() => rf.clone(),
        _ => return Err(GenError::NoRf),
    };
    let rounds = rounds.unwrap_or_else(|| default_rounds(inst.n()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let by_channel = inst.channel_events();
    let mut report = MutationReport {
        rounds,
        applied: 0,
        skipped: 0,
    };
    for _ in 0..rounds {
        let pairs = rf.pairs();
        let &(s1, r1) = pairs.choose(&mut rng).unwrap();
        let ch = inst.events[s1].channel;
        let others: Vec<usize> = by_channel[ch]
            .iter()
            .copied()
            .filter(|&e| e != s1 && inst.events[e].op == Op::Snd)
            .collect();
        let Some(&s2) = others.choose(&mut rng) else {
            report.skipped += 1;
            continue;
        };
        match rf.dst[s2] {
            Some(r2) => {
                rf.link(s1, r2);
                rf.link(s2, r1);
            }
            None => {
                rf.unlink(s1);
                rf.link(s2, r1);
            }
        }
        report.applied += 1;
    }
    if report.applied == 0 {
        return Ok((inst.clone(), report));
    }
    let mut out = inst.without_values();
    out.rf = Some(rf);
    Ok((out, report))
}

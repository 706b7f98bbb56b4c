//! Shared test support: random instance sources and brute-force oracles for
//! the source problems of the reductions. Nothing here calls library solvers.
#![allow(dead_code)]

use std::collections::HashMap;

use chanlin::generators::{mutate_rf, random_positive, CnfFormula, Graph, MemEvent, MemOp, OvInstance, RandomParams, VscReadInstance};
use chanlin::{Capacity, Channel, Instance, Kind, Op, RawEvent};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const CAPS: [Capacity; 4] = [Capacity::Finite(0), Capacity::Finite(1), Capacity::Finite(2), Capacity::Inf];

pub fn fixture(name: &str) -> Instance {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    chanlin::parse_instance(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// Random capacity menu, biased towards single-class menus so that the
/// all-synchronous and small-capacity fast paths get exercised.
fn cap_menu(r: &mut ChaCha8Rng, threads: usize) -> Vec<Capacity> {
    let mut menu: Vec<Capacity> = match r.gen_range(0..4) {
        0 => vec![*CAPS.choose(r).unwrap()],
        1 => CAPS.to_vec(),
        _ => CAPS.iter().copied().filter(|_| r.gen_bool(0.5)).collect(),
    };
    if threads == 1 {
        menu.retain(|c| !c.is_sync());
    }
    if menu.is_empty() {
        menu.push(Capacity::Finite(1));
    }
    menu
}

/// Events with random threads, channels, ops and values; rf pairs a random
/// subset of sends with receives on the same channel.
pub fn random_abstract(seed: u64, max_n: usize, max_t: usize, max_m: usize) -> Instance {
    let mut r = rng(seed);
    let n = r.gen_range(0..=max_n);
    let t = r.gen_range(1..=max_t);
    let m = r.gen_range(1..=max_m);
    let menu = cap_menu(&mut r, t);
    let channels: Vec<Channel> = (0..m)
        .map(|c| Channel {
            name: format!("c{c}"),
            cap: *menu.choose(&mut r).unwrap(),
        })
        .collect();
    let events: Vec<RawEvent> = (0..n)
        .map(|i| {
            let op = if r.gen_bool(0.5) { Op::Snd } else { Op::Rcv };
            let v = format!("v{}", r.gen_range(0..2));
            RawEvent::new(i as u64 + 1, &format!("t{}", r.gen_range(0..t)), op, &format!("c{}", r.gen_range(0..m)), Some(&v))
        })
        .collect();
    let mut pairs = Vec::new();
    for c in 0..m {
        let name = format!("c{c}");
        let mut sends: Vec<u64> = events.iter().filter(|e| e.channel == name && e.op == Op::Snd).map(|e| e.id).collect();
        let mut recvs: Vec<u64> = events.iter().filter(|e| e.channel == name && e.op == Op::Rcv).map(|e| e.id).collect();
        sends.shuffle(&mut r);
        recvs.shuffle(&mut r);
        pairs.extend(sends.into_iter().zip(recvs));
    }
    let with_values = Instance::build(Kind::Abstract, channels, events, None).unwrap();
    let rf = with_values.without_values().with_rf_pairs(Some(pairs)).unwrap();
    // Keep values for VCh checks; `rf` is checked separately via `rf_view`.
    let mut out = with_values;
    out.rf = rf.rf;
    out
}

/// The rf-only view of an instance: values are dropped so only rf constrains matching.
pub fn rf_view(inst: &Instance) -> Instance {
    inst.without_values()
}

/// The value-only view.
pub fn value_view(inst: &Instance) -> Instance {
    inst.without_rf()
}

pub fn random_params(seed: u64, n: usize, max_t: usize, max_m: usize) -> RandomParams {
    let mut r = rng(seed ^ 0x5eed);
    let threads = r.gen_range(1..=max_t);
    let channels = r.gen_range(1..=max_m);
    let capacities = cap_menu(&mut r, threads);
    RandomParams {
        events: n,
        threads,
        channels,
        capacities,
        values: r.gen_range(1..=3),
        seed,
    }
}

/// Case `i` of the small mixed suite: a third each of simulated positives,
/// their rf mutations, and unconstrained random instances.
pub fn mixed_case(i: u64) -> Instance {
    let mut r = rng(i.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let n = r.gen_range(0..=8);
    match i % 3 {
        0 => random_positive(&random_params(i, n, 3, 3)).unwrap().0,
        1 => {
            let pos = random_positive(&random_params(i, n, 3, 3)).unwrap().0;
            match mutate_rf(&pos, i, Some(r.gen_range(1..=3))) {
                Ok((m, _)) => m,
                Err(_) => pos,
            }
        }
        _ => random_abstract(i, 8, 3, 3),
    }
}

// ---- Hamiltonian cycles ----

pub fn has_hamiltonian_cycle(g: &Graph) -> bool {
    let n = g.nodes;
    if n < 2 {
        return false;
    }
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in &g.edges {
        adj[u][v] = true;
    }
    fn extend(adj: &[Vec<bool>], path: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let n = adj.len();
        let last = *path.last().unwrap();
        if path.len() == n {
            return adj[last][path[0]];
        }
        for v in 0..n {
            if !used[v] && adj[last][v] {
                used[v] = true;
                path.push(v);
                if extend(adj, path, used) {
                    return true;
                }
                path.pop();
                used[v] = false;
            }
        }
        false
    }
    let mut used = vec![false; n];
    used[0] = true;
    extend(&adj, &mut vec![0], &mut used)
}

pub fn random_digraph(seed: u64, max_nodes: usize) -> Graph {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_nodes);
    let p = r.gen_range(0.2..0.8);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges.shuffle(&mut r);
    Graph::new(n, edges).unwrap()
}

// ---- CNF ----

fn assignments(nv: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << nv).map(move |m| (0..nv).map(|i| m >> i & 1 == 1).collect())
}

fn lit_true(l: i64, a: &[bool]) -> bool {
    a[l.unsigned_abs() as usize - 1] == (l > 0)
}

pub fn satisfiable(f: &CnfFormula) -> bool {
    assignments(f.num_vars).any(|a| f.clauses.iter().all(|c| c.iter().any(|&l| lit_true(l, &a))))
}

pub fn one_in_three_satisfiable(f: &CnfFormula) -> bool {
    assignments(f.num_vars).any(|a| {
        f.clauses
            .iter()
            .all(|c| c.iter().filter(|&&l| lit_true(l, &a)).count() == 1)
    })
}

/// All 3-literal clauses over three distinct variables among `1..=nv`.
pub fn distinct_variable_clauses(nv: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for a in 1..=nv as i64 {
        for b in a + 1..=nv as i64 {
            for c in b + 1..=nv as i64 {
                for signs in 0..8 {
                    let s = |bit: i64, x: i64| if signs >> bit & 1 == 1 { -x } else { x };
                    out.push(vec![s(0, a), s(1, b), s(2, c)]);
                }
            }
        }
    }
    out
}

/// Every set of at most `max_clauses` clauses drawn from `pool`.
pub fn clause_subsets(pool: &[Vec<i64>], max_clauses: usize) -> Vec<Vec<Vec<i64>>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<(usize, Vec<Vec<i64>>)> = vec![(0, Vec::new())];
    for _ in 0..max_clauses {
        let mut next = Vec::new();
        for (start, set) in &frontier {
            for (i, c) in pool.iter().enumerate().skip(*start) {
                let mut s = set.clone();
                s.push(c.clone());
                out.push(s.clone());
                next.push((i + 1, s));
            }
        }
        frontier = next;
    }
    out
}

pub fn random_cnf(seed: u64, max_vars: usize, max_clauses: usize) -> CnfFormula {
    let mut r = rng(seed);
    let nv = r.gen_range(1..=max_vars);
    let nc = r.gen_range(1..=max_clauses);
    let clauses = (0..nc)
        .map(|_| {
            (0..3)
                .map(|_| {
                    let v = r.gen_range(1..=nv as i64);
                    if r.gen_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    CnfFormula::new(nv, clauses).unwrap()
}

// ---- Orthogonal vectors ----

pub fn has_orthogonal_pair(ov: &OvInstance) -> bool {
    for a in &ov.a {
        for b in &ov.b {
            let dot: usize = a.iter().zip(b).map(|(&x, &y)| usize::from(x) * usize::from(y)).sum();
            if dot == 0 {
                return true;
            }
        }
    }
    false
}

pub fn random_ov(seed: u64, max_n: usize, max_d: usize) -> OvInstance {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_n);
    let d = r.gen_range(1..=max_d);
    let vector = |r: &mut ChaCha8Rng| loop {
        let v: Vec<bool> = (0..d).map(|_| r.gen_bool(0.5)).collect();
        if v.iter().any(|&x| x) {
            break v;
        }
    };
    let a = (0..n).map(|_| vector(&mut r)).collect();
    let b = (0..n).map(|_| vector(&mut r)).collect();
    OvInstance::new(a, b).unwrap()
}

// ---- Sequential consistency of memory executions ----

/// Tries every po-respecting interleaving; a read must see the most recent
/// write to its register, which must be its rf source.
pub fn sequentially_consistent(v: &VscReadInstance) -> bool {
    let mut threads: Vec<&str> = Vec::new();
    for e in &v.events {
        if !threads.contains(&e.thread.as_str()) {
            threads.push(&e.thread);
        }
    }
    let per_thread: Vec<Vec<&MemEvent>> = threads
        .iter()
        .map(|t| v.events.iter().filter(|e| e.thread == *t).collect())
        .collect();
    let source: HashMap<u64, u64> = v.rf.iter().map(|&(w, r)| (r, w)).collect();

    fn go(
        per_thread: &[Vec<&MemEvent>],
        next: &mut [usize],
        last_write: &mut HashMap<String, u64>,
        source: &HashMap<u64, u64>,
    ) -> bool {
        if next.iter().zip(per_thread).all(|(&i, t)| i == t.len()) {
            return true;
        }
        for t in 0..per_thread.len() {
            let Some(e) = per_thread[t].get(next[t]) else {
                continue;
            };
            let prev = last_write.get(&e.register).copied();
            match e.op {
                MemOp::Read => {
                    if prev != source.get(&e.id).copied() {
                        continue;
                    }
                }
                MemOp::Write => {
                    last_write.insert(e.register.clone(), e.id);
                }
            }
            next[t] += 1;
            if go(per_thread, next, last_write, source) {
                return true;
            }
            next[t] -= 1;
            match prev {
                Some(w) => last_write.insert(e.register.clone(), w),
                None => last_write.remove(&e.register),
            };
        }
        false
    }
    go(&per_thread, &mut vec![0; threads.len()], &mut HashMap::new(), &source)
}

pub fn random_vsc(seed: u64, max_events: usize) -> VscReadInstance {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_events);
    let t = r.gen_range(1..=3);
    let regs = r.gen_range(1..=2);
    let mut events: Vec<MemEvent> = (0..n)
        .map(|i| MemEvent {
            id: i as u64 + 1,
            thread: format!("t{}", r.gen_range(0..t)),
            op: if r.gen_bool(0.5) { MemOp::Read } else { MemOp::Write },
            register: format!("r{}", r.gen_range(0..regs)),
        })
        .collect();
    let mut rf = Vec::new();
    for i in 0..n {
        if events[i].op != MemOp::Read {
            continue;
        }
        let writes: Vec<u64> = events
            .iter()
            .filter(|w| w.op == MemOp::Write && w.register == events[i].register)
            .map(|w| w.id)
            .collect();
        match writes.choose(&mut r) {
            Some(&w) => rf.push((w, events[i].id)),
            None => events[i].op = MemOp::Write,
        }
    }
    VscReadInstance::new(events, rf).unwrap()
}

use super::builder::Builder;
use super::sources::Graph;
use crate::model::{Capacity, Instance, Op};

const VALUE: &str = "v";

/// Same-value VCh instance that is consistent iff `g` has a Hamiltonian cycle.
///
/// Graphs with fewer than two nodes or with a node lacking in- or out-edges
/// cannot have a cycle; they map to a fixed two-event inconsistent instance.
pub fn from_hamiltonian(g: &Graph) -> Instance {
    let nv = g.nodes;
    let ne = g.edges.len();
    let degenerate = nv < 2 || (0..nv).any(|v| g.out_degree(v) == 0 || g.in_degree(v) == 0);
    let mut b = Builder::default();
    if degenerate {
        b.channel("c", Capacity::Inf);
        b.event("t", Op::Rcv, "c", Some(VALUE));
        b.event("t", Op::Snd, "c", Some(VALUE));
        return b.finish(false);
    }

    let ch = |v: usize| format!("ch{v}");
    let chp = |v: usize| format!("chp{v}");
    for v in 0..nv {
        b.channel(ch(v), Capacity::Finite((g.out_degree(v) + g.in_degree(v)) as u64));
    }
    for v in 0..nv {
        b.channel(chp(v), Capacity::Finite(g.in_degree(v) as u64));
    }
    b.channel("lock", Capacity::Finite(1));
    b.channel("alpha", Capacity::Finite(nv as u64));
    b.channel("cnt", Capacity::Finite(ne as u64));

    let mut ev = |t: &str, op: Op, c: &str| {
        b.event(t, op, c, Some(VALUE));
    };

    for v in 0..nv {
        let t = format!("n{v}");
        ev(&t, Op::Rcv, "alpha");
        for &(_, w) in g.edges.iter().filter(|e| e.0 == v) {
            ev(&t, Op::Snd, &ch(v));
            ev(&t, Op::Snd, &chp(w));
            ev(&t, Op::Snd, "cnt");
        }
    }
    for &(u, v) in &g.edges {
        let t = format!("e{u}_{v}");
        ev(&t, Op::Snd, "lock");
        ev(&t, Op::Rcv, &ch(u));
        ev(&t, Op::Rcv, "cnt");
        ev(&t, Op::Rcv, &chp(v));
        ev(&t, Op::Snd, &ch(v));
        ev(&t, Op::Rcv, "lock");
    }

    ev("init", Op::Snd, "lock");
    for _ in 0..nv {
        ev("init", Op::Snd, "cnt");
    }
    ev("init", Op::Snd, &ch(0));
    for v in 0..nv {
        ev("init", Op::Snd, &chp(v));
    }
    ev("init", Op::Rcv, "lock");

    ev("free", Op::Snd, "lock");
    for _ in 0..ne {
        ev("free", Op::Snd, "cnt");
    }
    ev("free", Op::Rcv, &ch(0));
    for _ in 0..ne {
        ev("free", Op::Rcv, "cnt");
    }
    ev("free", Op::Rcv, "lock");
    for _ in 0..nv {
        ev("free", Op::Snd, "alpha");
    }
    b.finish(false)
}

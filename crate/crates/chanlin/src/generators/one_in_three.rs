use super::builder::Builder;
use super::sources::CnfFormula;
use super::GenError;
use crate::model::{Capacity, Instance, Op};

/// Two-thread VCh instance over unbounded channels, consistent iff the
/// positive 3CNF `f` has an assignment making exactly one literal per clause
/// true.
pub fn from_one_in_three_two_threads(f: &CnfFormula) -> Result<Instance, GenError> {
    for (j, c) in f.clauses.iter().enumerate() {
        if c.len() != 3 || c.iter().any(|&l| l <= 0) {
            return Err(GenError::Malformed(format!("clause {} is not three positive literals", j + 1)));
        }
        if c[0] == c[1] || c[0] == c[2] || c[1] == c[2] {
            return Err(GenError::Malformed(format!("clause {} repeats a variable", j + 1)));
        }
    }
    let nc = f.clauses.len();
    let mut b = Builder::default();
    for name in ["l1", "l2", "alpha"] {
        b.channel(name, Capacity::Inf);
    }
    let clause = |j: usize| format!("c{j}");
    for j in 1..=nc {
        b.channel(clause(j), Capacity::Inf);
    }

    for (p, thread) in [(true, "top"), (false, "bot")] {
        let mut ev = |op: Op, ch: &str, value: &str| {
            b.event(thread, op, ch, Some(value));
        };
        let (own, other) = if p { ("l1", "l2") } else { ("l2", "l1") };
        let truth = if p { "T" } else { "F" };
        for i in 1..=f.num_vars {
            let v = |q: usize| format!("vi_{i}_{q}");
            let (mine, theirs, lock) = if p { (3, 4, 1) } else { (4, 3, 2) };
            ev(Op::Snd, "alpha", &v(mine));
            ev(Op::Rcv, "alpha", &v(theirs));
            ev(Op::Snd, own, &v(lock));
            ev(Op::Snd, other, &v(lock));
            ev(Op::Rcv, other, &v(lock));
            for (k, _) in f.clauses.iter().enumerate().filter(|(_, c)| c.contains(&(i as i64))) {
                ev(Op::Snd, &clause(k + 1), truth);
            }
            ev(Op::Rcv, own, &v(lock));
        }
        for j in 1..=nc {
            let w = |q: usize| format!("wj_{j}_{q}");
            let c = clause(j);
            let (mine, theirs, lock) = if p { (4, 5, 1) } else { (5, 4, 2) };
            ev(Op::Snd, "alpha", &w(mine));
            ev(Op::Rcv, "alpha", &w(theirs));
            ev(Op::Snd, own, &w(lock));
            ev(Op::Snd, other, &w(lock));
            ev(Op::Rcv, other, &w(lock));
            if p {
                ev(Op::Rcv, &c, "T");
                ev(Op::Rcv, &c, "F");
                ev(Op::Rcv, own, &w(lock));
            } else {
                ev(Op::Rcv, &c, "F");
                ev(Op::Rcv, &c, "T");
                ev(Op::Rcv, own, &w(lock));
                ev(Op::Snd, "l2", &w(3));
                ev(Op::Snd, "l1", &w(3));
                ev(Op::Rcv, "l1", &w(3));
                ev(Op::Rcv, &c, "F");
                ev(Op::Rcv, &c, "T");
                ev(Op::Rcv, "l2", &w(3));
            }
        }
    }
    Ok(b.finish(false))
}

use super::builder::Builder;
use super::sources::CnfFormula;
use super::GenError;
use crate::model::{Capacity, EventId, Instance};

/// Three-thread, five-channel VCh-rf instance (unbounded channels) that is
/// consistent iff the 3CNF `f` is satisfiable.
///
/// Each clause's literals are taken in order of variable index. Clauses that
/// mention a variable twice are accepted; the variable's block then sends once
/// per occurrence.
pub fn from_3sat_t3_m5(f: &CnfFormula) -> Result<Instance, GenError> {
    if let Some(j) = f.clauses.iter().position(|c| c.len() != 3) {
        return Err(GenError::Malformed(format!("clause {} does not have three literals", j + 1)));
    }
    let nv = f.num_vars;
    if f.clauses.iter().flatten().any(|&l| l == 0 || l.unsigned_abs() as usize > nv) {
        return Err(GenError::Malformed("literal out of range".into()));
    }
    let mut b = Builder::default();
    for name in ["ch1", "ch2", "c1", "c2", "c3"] {
        b.channel(name, Capacity::Inf);
    }
    let clause_ch = ["c1", "c2", "c3"];

    // Most recent send of each variable's token on (ch1, ch2), per thread.
    let mut bot: Vec<(EventId, EventId)> = Vec::with_capacity(nv);
    let mut top: Vec<(EventId, EventId)> = Vec::with_capacity(nv);
    for _ in 0..nv {
        let s1 = b.snd("t1", "ch1");
        let s2 = b.snd("t1", "ch2");
        bot.push((s1, s2));
    }
    for _ in 0..nv {
        let s2 = b.snd("t2", "ch2");
        let s1 = b.snd("t2", "ch1");
        top.push((s1, s2));
    }

    for clause in &f.clauses {
        let mut lits = clause.clone();
        lits.sort_by_key(|l| l.unsigned_abs());
        let var_of = |q: usize| lits[q].unsigned_abs() as usize - 1;

        let mut bot_sends = [0; 3];
        for (p, prev) in bot.iter_mut().enumerate() {
            let s1 = b.snd("t1", "ch1");
            let r2 = b.rcv("t1", "ch2");
            b.rf(prev.1, r2);
            for q in (0..3).filter(|&q| var_of(q) == p) {
                bot_sends[q] = b.snd("t1", clause_ch[q]);
            }
            let r1 = b.rcv("t1", "ch1");
            b.rf(prev.0, r1);
            let s2 = b.snd("t1", "ch2");
            *prev = (s1, s2);
        }
        let mut top_sends = [0; 3];
        for (p, prev) in top.iter_mut().enumerate() {
            let s2 = b.snd("t2", "ch2");
            let r1 = b.rcv("t2", "ch1");
            b.rf(prev.0, r1);
            for q in (0..3).filter(|&q| var_of(q) == p) {
                top_sends[q] = b.snd("t2", clause_ch[q]);
            }
            let r2 = b.rcv("t2", "ch2");
            b.rf(prev.1, r2);
            let s1 = b.snd("t2", "ch1");
            *prev = (s1, s2);
        }

        // Thread r receives "true" on c_r and "false" on c_{r+1}.
        let mut rcv_true = [0; 3];
        let mut rcv_false = [0; 3];
        for (r, thread) in ["t1", "t2", "t3"].into_iter().enumerate() {
            rcv_true[r] = b.rcv(thread, clause_ch[r]);
            rcv_false[(r + 1) % 3] = b.rcv(thread, clause_ch[(r + 1) % 3]);
        }
        for q in 0..3 {
            let (t_src, f_src) = if lits[q] > 0 {
                (top_sends[q], bot_sends[q])
            } else {
                (bot_sends[q], top_sends[q])
            };
            b.rf(t_src, rcv_true[q]);
            b.rf(f_src, rcv_false[q]);
        }
    }
    Ok(b.finish(true))
}

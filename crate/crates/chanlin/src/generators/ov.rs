use super::builder::Builder;
use super::sources::OvInstance;
use super::GenError;
use crate::model::{Capacity, EventId, Instance};

/// Two-thread VCh-rf instance over unbounded channels, consistent iff some
/// `a ∈ A` and `b ∈ B` are orthogonal.
///
/// All-zero vectors are rejected: their per-coordinate blocks would be empty.
pub fn from_orthogonal_vectors(ov: &OvInstance) -> Result<Instance, GenError> {
    let n = ov.n();
    let d = ov.d();
    if n == 0 || d == 0 {
        return Err(GenError::InvalidParams("need at least one vector of positive dimension".into()));
    }
    if ov.b.len() != n || ov.a.iter().chain(&ov.b).any(|v| v.len() != d) {
        return Err(GenError::Malformed("dimension mismatch".into()));
    }
    if ov.a.iter().chain(&ov.b).any(|v| v.iter().all(|&x| !x)) {
        return Err(GenError::InvalidParams("all-zero vectors are not supported".into()));
    }
    let ch = |k: usize| format!("ch{}", k + 1);
    let ones = |v: &Vec<bool>| v.iter().enumerate().filter(|(_, &x)| x).map(|(k, _)| k).collect::<Vec<_>>();

    let mut b = Builder::default();
    for k in 0..d {
        b.channel(ch(k), Capacity::Inf);
    }
    for name in ["alpha", "beta", "gamma", "delta"] {
        b.channel(name, Capacity::Inf);
    }

    // Sends of each vector on its coordinate channels, and its alpha token.
    let mut a_ch: Vec<Vec<(usize, EventId)>> = Vec::with_capacity(n);
    let mut a_alpha = Vec::with_capacity(n);
    for v in &ov.a {
        a_ch.push(ones(v).into_iter().map(|k| (k, b.snd("A", &ch(k)))).collect());
        a_alpha.push(b.snd("A", "alpha"));
    }
    let mut b_ch: Vec<Vec<(usize, EventId)>> = vec![Vec::new(); n];
    let mut b_alpha = vec![0; n];
    for j in (0..n).rev() {
        b_alpha[j] = b.snd("B", "alpha");
        b_ch[j] = ones(&ov.b[j]).into_iter().map(|k| (k, b.snd("B", &ch(k)))).collect();
    }

    let recv_coords = |b: &mut Builder, thread: &str, sends: &[(usize, EventId)]| {
        for &(k, s) in sends {
            let r = b.rcv(thread, &ch(k));
            b.rf(s, r);
        }
    };
    let recv = |b: &mut Builder, thread: &str, channel: &str, s: EventId| {
        let r = b.rcv(thread, channel);
        b.rf(s, r);
    };

    // Thread A.
    let mut gamma = 0;
    let mut delta_rcv = 0;
    let mut prev_beta = 0;
    for i in 0..n {
        recv(&mut b, "A", "alpha", a_alpha[i]);
        if i == 0 {
            gamma = b.snd("A", "gamma");
        } else {
            recv(&mut b, "A", "beta", prev_beta);
        }
        if i + 1 < n {
            prev_beta = b.snd("A", "beta");
        } else {
            delta_rcv = b.rcv("A", "delta");
        }
        recv_coords(&mut b, "A", &a_ch[i]);
    }

    // Thread B visits the vectors in reverse.
    let mut b_beta = 0;
    for j in (0..n).rev() {
        recv_coords(&mut b, "B", &b_ch[j]);
        if j == n - 1 {
            let s = b.snd("B", "delta");
            b.rf(s, delta_rcv);
            b_beta = b.snd("B", "beta");
        }
        if j + 1 < n {
            recv(&mut b, "B", "alpha", b_alpha[j + 1]);
        }
        if j == 0 {
            recv(&mut b, "B", "beta", b_beta);
            recv(&mut b, "B", "gamma", gamma);
            recv(&mut b, "B", "alpha", b_alpha[0]);
        }
    }
    Ok(b.finish(true))
}

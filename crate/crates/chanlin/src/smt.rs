//! SMT-LIB (QF_LIA) encoding of rf-consistency, and a thin external-solver runner.
//!
//! Variables: `x_<id>` is the position of event `<id>`; `y_<ch>_snd_<i>` and
//! `y_<ch>_rcv_<i>` count sends and receives on `<ch>` among the first `i`
//! positions, for `0 ≤ i ≤ n`.

use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;

use crate::frontier::validate_rf;
use crate::model::{classify_channels, Capacity, Instance, Op};
use crate::saturation::saturate;
use crate::verdict::SolveError;

pub const SOLVER_ENV: &str = "CHANLIN_SMT_CMD";

fn is_simple_symbol(s: &str) -> bool {
    !s.is_empty()
        && !s.starts_with(|c: char| c.is_ascii_digit())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c))
}

/// Counter-variable name for a channel; names outside the simple-symbol
/// alphabet are quoted, falling back to the channel index when quoting cannot
/// represent them.
fn counter(inst: &Instance, ch: usize, op: Op, i: usize) -> String {
    let name = &inst.channels[ch].name;
    if is_simple_symbol(name) {
        format!("y_{name}_{op}_{i}")
    } else if !name.contains(['|', '\\']) {
        format!("|y_{name}_{op}_{i}|")
    } else {
        format!("|y_#{ch}_{op}_{i}|")
    }
}

/// Emits the encoding; satisfiable iff the instance is rf-consistent.
///
/// Instances that fail the structural rf checks (a receive with no source, an
/// unreceived synchronous send, ...) or, `with_saturation`, whose saturated
/// order is cyclic, get `(assert false)` and a comment naming the cause.
pub fn emit_smtlib(inst: &Instance, with_saturation: bool) -> Result<String, SolveError> {
    let rf = inst.rf.as_ref().ok_or(SolveError::MissingRf)?;
    let n = inst.n();
    let classes = classify_channels(inst);
    let x = |e: usize| format!("x_{}", inst.events[e].id);
    let mut out = String::new();
    out.push_str("(set-logic QF_LIA)\n");
    for e in 0..n {
        writeln!(out, "(declare-fun {} () Int)", x(e)).unwrap();
    }
    for ch in 0..inst.m() {
        for op in [Op::Snd, Op::Rcv] {
            for i in 0..=n {
                writeln!(out, "(declare-fun {} () Int)", counter(inst, ch, op, i)).unwrap();
            }
        }
    }

    if let Err(reason) = validate_rf(inst, rf, &classes) {
        writeln!(out, "; structurally inconsistent: {reason}").unwrap();
        out.push_str("(assert false)\n(check-sat)\n");
        return Ok(out);
    }
    let order = with_saturation.then(|| saturate(inst));
    if order.as_ref().is_some_and(|o| o.cyclic) {
        out.push_str("; saturated order is cyclic\n(assert false)\n(check-sat)\n");
        return Ok(out);
    }

    // Unique positions.
    for e in 0..n {
        writeln!(out, "(assert (and (<= 0 {0}) (<= {0} {1})))", x(e), n - 1).unwrap();
    }
    if n >= 2 {
        let all: Vec<String> = (0..n).map(x).collect();
        writeln!(out, "(assert (distinct {}))", all.join(" ")).unwrap();
    }

    // Program order and reads-from.
    for po in &inst.po {
        for w in po.windows(2) {
            writeln!(out, "(assert (< {} {}))", x(w[0]), x(w[1])).unwrap();
        }
    }
    let pairs = rf.pairs();
    for &(s, r) in &pairs {
        if inst.channels[inst.events[s].channel].cap.is_sync() {
            writeln!(out, "(assert (= (+ {} 1) {}))", x(s), x(r)).unwrap();
        } else {
            writeln!(out, "(assert (< {} {}))", x(s), x(r)).unwrap();
        }
    }

    // FIFO.
    for (i, &(s1, r1)) in pairs.iter().enumerate() {
        for &(s2, r2) in &pairs[i + 1..] {
            if inst.events[s1].channel != inst.events[s2].channel {
                continue;
            }
            writeln!(
                out,
                "(assert (or (and (< {a} {b}) (< {c} {d})) (and (> {a} {b}) (> {c} {d}))))",
                a = x(s1),
                b = x(s2),
                c = x(r1),
                d = x(r2)
            )
            .unwrap();
        }
    }
    for (s2, ev) in inst.events.iter().enumerate() {
        if ev.op != Op::Snd || rf.dst[s2].is_some() {
            continue;
        }
        for &(s1, _) in pairs.iter().filter(|p| inst.events[p.0].channel == ev.channel) {
            writeln!(out, "(assert (< {} {}))", x(s1), x(s2)).unwrap();
        }
    }

    // Capacity via prefix counters.
    let by_channel = inst.channel_events();
    for (ch, events) in by_channel.iter().enumerate() {
        for op in [Op::Snd, Op::Rcv] {
            let y = |i: usize| counter(inst, ch, op, i);
            writeln!(out, "(assert (= {} 0))", y(0)).unwrap();
            let mine: Vec<usize> = events.iter().copied().filter(|&e| inst.events[e].op == op).collect();
            for i in 0..n {
                let step = match mine.as_slice() {
                    [] => "0".to_string(),
                    [e] => format!("(ite (= {} {i}) 1 0)", x(*e)),
                    es => {
                        let terms: Vec<String> = es.iter().map(|&e| format!("(ite (= {} {i}) 1 0)", x(e))).collect();
                        format!("(+ {})", terms.join(" "))
                    }
                };
                writeln!(out, "(assert (= {} (+ {} {step})))", y(i + 1), y(i)).unwrap();
            }
        }
        // A synchronous send and its receive are adjacent, so one message
        // is briefly in flight between them.
        let bound = match inst.channels[ch].cap {
            Capacity::Inf => None,
            Capacity::Finite(c) => Some(c.max(1)),
        };
        for i in 0..=n {
            let (ys, yr) = (counter(inst, ch, Op::Snd, i), counter(inst, ch, Op::Rcv, i));
            match bound {
                Some(c) => writeln!(out, "(assert (and (<= {yr} {ys}) (<= {ys} (+ {yr} {c}))))").unwrap(),
                None => writeln!(out, "(assert (<= {yr} {ys}))").unwrap(),
            }
        }
    }

    if let Some(order) = &order {
        for e in 0..n {
            let own = inst.events[e].thread;
            for tau in (0..inst.t()).filter(|&tau| tau != own) {
                if let Some(p) = order.successor_position(e, tau) {
                    let f = inst.po[tau][p as usize];
                    writeln!(out, "(assert (< {} {}))", x(e), x(f)).unwrap();
                }
            }
        }
    }
    out.push_str("(check-sat)\n");
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverAnswer {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("empty solver command")]
    EmptyCommand,
    #[error("cannot run `{cmd}`: {source}")]
    Spawn {
        cmd: String,
        #[source]
        source: std::io::Error,
    },
    #[error("solver exited with {status}: {output}")]
    Failed { status: String, output: String },
    #[error("no sat/unsat/unknown in solver output: {0}")]
    Unparseable(String),
}

/// The solver command from `CHANLIN_SMT_CMD`, if set and non-empty.
pub fn solver_from_env() -> Option<String> {
    std::env::var(SOLVER_ENV).ok().filter(|s| !s.trim().is_empty())
}

/// Runs `cmd` on the encoding file. `{}` in the command is replaced by the
/// path; without it, the path is appended as the last argument.
pub fn run_external_solver(path: &Path, cmd: &str) -> Result<SolverAnswer, SolverError> {
    let path_str = path.to_string_lossy();
    let mut args: Vec<String> = cmd.split_whitespace().map(str::to_string).collect();
    if args.is_empty() {
        return Err(SolverError::EmptyCommand);
    }
    if args.iter().any(|a| a.contains("{}")) {
        for a in &mut args {
            *a = a.replace("{}", &path_str);
        }
    } else {
        args.push(path_str.into_owned());
    }
    let output = Command::new(&args[0])
        .args(&args[1..])
        .output()
        .map_err(|source| SolverError::Spawn {
            cmd: args[0].clone(),
            source,
        })?;
    let text = format!(
        "{}{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    if !output.status.success() {
        return Err(SolverError::Failed {
            status: output.status.to_string(),
            output: text.trim().to_string(),
        });
    }
    for tok in String::from_utf8_lossy(&output.stdout).split_whitespace() {
        match tok {
            "sat" => return Ok(SolverAnswer::Sat),
            "unsat" => return Ok(SolverAnswer::Unsat),
            "unknown" => return Ok(SolverAnswer::Unknown),
            _ => {}
        }
    }
    Err(SolverError::Unparseable(text.trim().to_string()))
}

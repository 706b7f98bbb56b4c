//! Line-oriented instance files.
//!
//! ```text
//! vchk v1
//! kind abstract            # or `trace`
//! channel ch cap 1         # or `cap inf`
//! event 1 t1 snd ch a
//! event 2 t2 rcv ch a
//! rf 1 2
//! ```

use std::fmt::Write as _;

use crate::model::{BuildError, BuildSite, Capacity, Channel, EventId, Instance, Kind, Op, RawEvent};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("expected header `vchk v1`")]
    Header,
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("{0}")]
    Syntax(String),
    #[error(transparent)]
    Build(#[from] BuildError),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        kind: ParseErrorKind::Syntax(msg.into()),
    }
}

/// Non-empty lines with comments stripped, as (1-based line number, tokens).
pub(crate) fn tokenized(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

/// Consumes the `vchk v1` header and returns the remaining lines.
pub(crate) fn expect_header<'a>(
    lines: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
) -> Result<(), ParseError> {
    match lines.next() {
        Some((_, toks)) if toks == ["vchk", "v1"] => Ok(()),
        Some((line, _)) => Err(ParseError {
            line,
            kind: ParseErrorKind::Header,
        }),
        None => Err(ParseError {
            line: 1,
            kind: ParseErrorKind::Header,
        }),
    }
}

pub(crate) fn parse_id(line: usize, tok: &str) -> Result<EventId, ParseError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("invalid event id `{tok}`")))
}

fn parse_cap(line: usize, tok: &str) -> Result<Capacity, ParseError> {
    if tok == "inf" {
        return Ok(Capacity::Inf);
    }
    tok.parse()
        .map(Capacity::Finite)
        .map_err(|_| syntax(line, format!("invalid capacity `{tok}`")))
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = tokenized(text);
    expect_header(&mut lines)?;

    let mut kind = None;
    let mut channels = Vec::new();
    let mut channel_lines = Vec::new();
    let mut events = Vec::new();
    let mut event_lines = Vec::new();
    let mut rf: Option<Vec<(EventId, EventId)>> = None;
    let mut rf_lines = Vec::new();

    for (line, toks) in lines {
        match toks[0] {
            "kind" => {
                if toks.len() != 2 {
                    return Err(syntax(line, "expected `kind abstract|trace`"));
                }
                if kind.is_some() {
                    return Err(syntax(line, "duplicate kind line"));
                }
                kind = Some(match toks[1] {
                    "abstract" => Kind::Abstract,
                    "trace" => Kind::Trace,
                    other => return Err(syntax(line, format!("unsupported kind `{other}`"))),
                });
            }
            "channel" => {
                if toks.len() != 4 || toks[2] != "cap" {
                    return Err(syntax(line, "expected `channel <name> cap <nat>|inf`"));
                }
                channels.push(Channel {
                    name: toks[1].to_string(),
                    cap: parse_cap(line, toks[3])?,
                });
                channel_lines.push(line);
            }
            "event" => {
                if !(toks.len() == 5 || toks.len() == 6) {
                    return Err(syntax(line, "expected `event <id> <thread> snd|rcv <channel> [<value>]`"));
                }
                let op = match toks[3] {
                    "snd" => Op::Snd,
                    "rcv" => Op::Rcv,
                    other => return Err(syntax(line, format!("expected snd or rcv, found `{other}`"))),
                };
                events.push(RawEvent {
                    id: parse_id(line, toks[1])?,
                    thread: toks[2].to_string(),
                    op,
                    channel: toks[4].to_string(),
                    value: toks.get(5).map(|v| v.to_string()),
                });
                event_lines.push(line);
            }
            "rf" => {
                if toks.len() != 3 {
                    return Err(syntax(line, "expected `rf <send-id> <rcv-id>`"));
                }
                let pair = (parse_id(line, toks[1])?, parse_id(line, toks[2])?);
                rf.get_or_insert_with(Vec::new).push(pair);
                rf_lines.push(line);
            }
            other => {
                return Err(ParseError {
                    line,
                    kind: ParseErrorKind::UnknownDirective(other.to_string()),
                })
            }
        }
    }

    Instance::build_indexed(kind.unwrap_or(Kind::Abstract), channels, events, rf).map_err(|(err, site)| {
        let line = match site {
            BuildSite::Channel(i) => channel_lines[i],
            BuildSite::Event(i) => event_lines[i],
            BuildSite::Rf(i) => rf_lines[i],
        };
        ParseError {
            line,
            kind: err.into(),
        }
    })
}

/// Deterministic text form; `parse_instance` inverts it.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::from("vchk v1\n");
    out.push_str(match inst.kind {
        Kind::Abstract => "kind abstract\n",
        Kind::Trace => "kind trace\n",
    });
    for c in &inst.channels {
        let _ = writeln!(out, "channel {} cap {}", c.name, c.cap);
    }
    for e in inst.source_order() {
        let ev = &inst.events[e];
        let _ = write!(
            out,
            "event {} {} {} {}",
            ev.id, inst.threads[ev.thread], ev.op, inst.channels[ev.channel].name
        );
        if let Some(v) = inst.value_str(e) {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    if let Some(pairs) = inst.rf_id_pairs() {
        for (s, r) in pairs {
            let _ = writeln!(out, "rf {s} {r}");
        }
    }
    out
}

/// Writes `witness` (dense indices) as a `kind trace` file over `inst`'s events.
pub fn serialize_witness(inst: &Instance, witness: &[usize]) -> String {
    let mut w = inst.clone();
    w.kind = Kind::Trace;
    w.trace = Some(witness.to_vec());
    serialize_instance(&w)
}

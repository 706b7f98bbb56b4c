use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use chanlin::fastpath::{solve_acyclic, solve_sync};
use chanlin::format::serialize_witness;
use chanlin::generators::{self, RandomParams};
use chanlin::oracle::brute_force;
use chanlin::smt::{emit_smtlib, run_external_solver, solver_from_env, SolverAnswer};
use chanlin::topology::communication_topology;
use chanlin::{
    classify_channels, parse_instance, serialize_instance, solve_vch, solve_vchrf, solve_vchrf_saturated, verify_witness,
    Capacity, ChannelClass, Instance, Kind, Op, SolveError, Verdict,
};

/// Consistency checking for message-passing executions over FIFO channels.
#[derive(Parser)]
#[command(name = "chanlin", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether an instance has a valid concretization.
    Check(CheckArgs),
    /// Write a random or reduction-derived instance.
    Generate(GenerateArgs),
    /// Perturb the reads-from relation of an instance.
    Mutate(MutateArgs),
    /// Write the SMT-LIB encoding of an instance.
    EmitSmt(EmitSmtArgs),
    /// Print structural statistics.
    Stats { input: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Auto,
    Frontier,
    FrontierRf,
    Sync,
    Acyclic,
    Brute,
}

#[derive(Args)]
struct CheckArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    algo: Algo,
    /// Skip saturation in the rf frontier search.
    #[arg(long)]
    no_saturation: bool,
    /// Write the witness trace here when consistent.
    #[arg(long)]
    witness: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Reduction {
    Ham,
    OneInThree,
    T3m5,
    Ov,
    Vsc,
}

#[derive(Args)]
struct GenerateArgs {
    /// `random` for a random positive instance.
    kind: Option<String>,
    #[arg(long, value_enum, conflicts_with = "kind")]
    reduction: Option<Reduction>,
    /// Source problem for --reduction.
    #[arg(long, requires = "reduction")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    events: usize,
    #[arg(long, default_value_t = 2)]
    threads: usize,
    #[arg(long, default_value_t = 2)]
    channels: usize,
    /// Comma-separated capacity menu, e.g. `0,1,2,inf`.
    #[arg(long, default_value = "0,1,2,inf")]
    caps: String,
    #[arg(long, default_value_t = 2)]
    values: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MutateArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EmitSmtArgs {
    input: PathBuf,
    #[arg(long)]
    with_saturation: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Solver command run on the encoding; defaults to $CHANLIN_SMT_CMD.
    #[arg(long)]
    solver: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Check(a) => check(a),
        Cmd::Generate(a) => generate(a).map(|()| true),
        Cmd::Mutate(a) => mutate(a).map(|()| true),
        Cmd::EmitSmt(a) => emit_smt(a).map(|()| true),
        Cmd::Stats { input } => stats(&input).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("invalid instance {}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Key-value report lines go to stdout, or stderr when stdout carries a payload.
fn report(to_stderr: bool, key: &str, value: impl std::fmt::Display) {
    if to_stderr {
        eprintln!("{key}: {value}");
    } else {
        println!("{key}: {value}");
    }
}

fn check(a: CheckArgs) -> Result<bool> {
    let inst = load(&a.input)?;
    if inst.kind == Kind::Trace {
        return check_trace(&inst);
    }
    let (name, verdict) = run_algo(&inst, a.algo, !a.no_saturation)?;
    println!("result: {}", verdict.outcome);
    println!("algorithm: {name}");
    println!("explored: {}", verdict.explored);
    if let Some(c) = verdict.clauses {
        println!("clauses: {c}");
    }
    if let Some(r) = &verdict.reason {
        println!("reason: {r}");
    }
    if let (Some(path), Some(w)) = (&a.witness, &verdict.witness) {
        fs::write(path, serialize_witness(&inst, w)).with_context(|| format!("cannot write {}", path.display()))?;
        println!("witness: {}", path.display());
    }
    Ok(verdict.is_consistent())
}

/// A trace file is its own witness: validate it against its abstraction.
fn check_trace(inst: &Instance) -> Result<bool> {
    let trace = inst.source_order();
    let abs = inst.as_abstract();
    let outcome = verify_witness(&abs, &trace);
    println!(
        "result: {}",
        if outcome.is_ok() { "consistent" } else { "inconsistent" }
    );
    println!("algorithm: trace");
    if let Err(e) = &outcome {
        println!("reason: {e}");
    }
    Ok(outcome.is_ok())
}

fn run_algo(inst: &Instance, algo: Algo, saturation: bool) -> Result<(&'static str, Verdict)> {
    let rf_search = |inst: &Instance| {
        if saturation {
            solve_vchrf_saturated(inst)
        } else {
            solve_vchrf(inst)
        }
    };
    let out = match algo {
        Algo::Frontier => ("frontier", solve_vch(inst)?),
        Algo::FrontierRf => ("frontier-rf", rf_search(inst)?),
        Algo::Sync => ("sync", solve_sync(inst)?),
        Algo::Acyclic => ("acyclic", solve_acyclic(inst)?),
        Algo::Brute => ("brute", brute_force(inst, inst.rf.as_ref())?),
        Algo::Auto => {
            if !inst.has_rf() {
                return Ok(("frontier", solve_vch(inst)?));
            }
            let classes = classify_channels(inst);
            let all_sync = !classes.is_empty() && classes.iter().all(|c| *c == ChannelClass::Sync);
            let attempt = if all_sync {
                Some(("sync", solve_sync(inst)))
            } else if communication_topology(inst).acyclic {
                Some(("acyclic", solve_acyclic(inst)))
            } else {
                None
            };
            match attempt {
                Some((name, Ok(v))) => (name, v),
                Some((_, Err(SolveError::Refused(_)))) | None => ("frontier-rf", rf_search(inst)?),
                Some((_, Err(e))) => return Err(e.into()),
            }
        }
    };
    Ok(out)
}

fn parse_caps(s: &str) -> Result<Vec<Capacity>> {
    s.split(',')
        .map(|t| match t.trim() {
            "inf" => Ok(Capacity::Inf),
            n => n.parse().map(Capacity::Finite).with_context(|| format!("invalid capacity `{n}`")),
        })
        .collect()
}

fn generate(a: GenerateArgs) -> Result<()> {
    let inst = match (a.reduction, a.kind.as_deref()) {
        (Some(r), _) => {
            let path = a.input.as_deref().context("--reduction needs --input")?;
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            match r {
                Reduction::Ham => generators::from_hamiltonian(&generators::parse_digraph(&text)?),
                Reduction::OneInThree => generators::from_one_in_three_two_threads(&generators::parse_dimacs(&text)?)?,
                Reduction::T3m5 => generators::from_3sat_t3_m5(&generators::parse_dimacs(&text)?)?,
                Reduction::Ov => generators::from_orthogonal_vectors(&generators::parse_ov(&text)?)?,
                Reduction::Vsc => generators::from_vsc_read(&generators::parse_vsc(&text)?)?,
            }
        }
        (None, Some("random")) => {
            let params = RandomParams {
                events: a.events,
                threads: a.threads,
                channels: a.channels,
                capacities: parse_caps(&a.caps)?,
                values: a.values,
                seed: a.seed,
            };
            generators::random_positive(&params)?.0
        }
        (None, Some(other)) => bail!("unknown generator `{other}`; use `random` or --reduction"),
        (None, None) => bail!("nothing to generate; use `random` or --reduction"),
    };
    write_out(a.output.as_deref(), &serialize_instance(&inst))?;
    let quiet = a.output.is_none();
    report(quiet, "n", inst.n());
    report(quiet, "t", inst.t());
    report(quiet, "m", inst.m());
    report(quiet, "k", inst.k().map_or("0".to_string(), |k| k.to_string()));
    Ok(())
}

fn mutate(a: MutateArgs) -> Result<()> {
    let inst = load(&a.input)?;
    let (out, rep) = generators::mutate_rf(&inst, a.seed, a.rounds)?;
    write_out(a.output.as_deref(), &serialize_instance(&out))?;
    let quiet = a.output.is_none();
    report(quiet, "rounds", rep.rounds);
    report(quiet, "applied", rep.applied);
    report(quiet, "skipped", rep.skipped);
    Ok(())
}

fn emit_smt(a: EmitSmtArgs) -> Result<()> {
    let inst = load(&a.input)?;
    let text = emit_smtlib(&inst, a.with_saturation)?;
    let solver = a.solver.clone().or_else(solver_from_env);
    let quiet = a.output.is_none() && solver.is_none();
    let declared = text.lines().filter(|l| l.starts_with("(declare-fun")).count();
    let asserts = text.lines().filter(|l| l.starts_with("(assert")).count();
    match (&a.output, &solver) {
        (Some(p), _) => fs::write(p, &text).with_context(|| format!("cannot write {}", p.display()))?,
        (None, None) => print!("{text}"),
        (None, Some(_)) => {}
    }
    report(quiet, "variables", declared);
    report(quiet, "assertions", asserts);
    if let Some(cmd) = solver {
        let path = match &a.output {
            Some(p) => p.clone(),
            None => {
                let p = std::env::temp_dir().join(format!("chanlin-{}.smt2", std::process::id()));
                fs::write(&p, &text).with_context(|| format!("cannot write {}", p.display()))?;
                p
            }
        };
        let answer = run_external_solver(&path, &cmd);
        if a.output.is_none() {
            let _ = fs::remove_file(&path);
        }
        let answer = match answer? {
            SolverAnswer::Sat => "sat",
            SolverAnswer::Unsat => "unsat",
            SolverAnswer::Unknown => "unknown",
        };
        println!("solver: {answer}");
    }
    Ok(())
}

fn stats(input: &Path) -> Result<()> {
    let inst = load(input)?;
    println!("n: {}", inst.n());
    println!("t: {}", inst.t());
    println!("m: {}", inst.m());
    println!("k: {}", inst.k().map_or("0".to_string(), |k| k.to_string()));
    for (c, class) in inst.channels.iter().zip(classify_channels(&inst)) {
        let class = match class {
            ChannelClass::Sync => "sync".to_string(),
            ChannelClass::EffectivelyUnbounded => "unbounded".to_string(),
            ChannelClass::Bounded(k) => format!("bounded({k})"),
        };
        println!("channel {}: {class}", c.name);
    }
    println!(
        "topology: {}",
        if communication_topology(&inst).acyclic { "acyclic" } else { "cyclic" }
    );
    let receives = inst.events.iter().filter(|e| e.op == Op::Rcv).count();
    match &inst.rf {
        Some(rf) => println!("rf: {}/{receives}", rf.len()),
        None => println!("rf: none"),
    }
    Ok(())
}

mod common;

use std::io::Write as _;

use chanlin::fastpath::{build_send_receive_graph, encode_2sat, solve_sync};
use chanlin::smt::{emit_smtlib, run_external_solver, SolverAnswer, SolverError};
use chanlin::twosat::{solve_2sat, Lit, TwoSatFormula, TwoSatResult};
use chanlin::{parse_instance, SolveError};
use common::*;
use proptest::prelude::*;

fn truth_table(f: &TwoSatFormula) -> bool {
    (0u32..1 << f.num_vars).any(|m| {
        let a: Vec<bool> = (0..f.num_vars).map(|i| m >> i & 1 == 1).collect();
        f.clauses.iter().all(|c| c.iter().any(|l| a[l.var] == l.positive))
    })
}

fn formula() -> impl Strategy<Value = TwoSatFormula> {
    (1usize..=12).prop_flat_map(|nv| {
        let lit = (0..nv, any::<bool>()).prop_map(|(var, positive)| Lit { var, positive });
        prop::collection::vec(prop::collection::vec(lit, 0..=2), 0..=3 * nv)
            .prop_map(move |clauses| TwoSatFormula { num_vars: nv, clauses })
    })
}

proptest! {
    #[test]
    fn twosat_matches_truth_table(f in formula()) {
        match solve_2sat(&f) {
            TwoSatResult::Satisfiable(a) => prop_assert!(f.eval(&a)),
            TwoSatResult::Unsat => prop_assert!(!truth_table(&f)),
        }
    }

    #[test]
    fn smt_declares_positions_and_counters(seed in any::<u64>(), n in 0usize..25) {
        let (inst, _) = chanlin::generators::random_positive(&random_params(seed, n, 3, 3)).unwrap();
        let text = emit_smtlib(&inst, true).unwrap();
        let declared = text.lines().filter(|l| l.starts_with("(declare-fun")).count();
        prop_assert_eq!(declared, inst.n() + inst.m() * (2 * inst.n() + 2));
        prop_assert!(text.ends_with("(check-sat)\n"));
        prop_assert!(!text.contains("(assert false)"));
    }
}

#[test]
fn twosat_contradiction() {
    let f = TwoSatFormula {
        num_vars: 1,
        clauses: vec![vec![Lit::pos(0)], vec![Lit::neg(0)]],
    };
    assert_eq!(solve_2sat(&f), TwoSatResult::Unsat);
    let empty_clause = TwoSatFormula {
        num_vars: 1,
        clauses: vec![vec![]],
    };
    assert_eq!(solve_2sat(&empty_clause), TwoSatResult::Unsat);
    assert!(matches!(solve_2sat(&TwoSatFormula::default()), TwoSatResult::Satisfiable(_)));
}

#[test]
fn twosat_encoding_needs_two_threads() {
    let inst = fixture("three_thread_cap2.vchk").without_values().with_rf_pairs(Some(vec![(1, 3), (2, 4)])).unwrap();
    assert!(matches!(encode_2sat(&inst), Err(SolveError::Refused(_))));
    let two = fixture("cap1_crossed_rf_inconsistent.vchk");
    let enc = encode_2sat(&two).unwrap();
    assert_eq!(enc.variable_ids(&two).len(), enc.formula.num_vars);
}

#[test]
fn send_receive_graph_of_three_synchronous_threads() {
    let inst = fixture("sync_three_threads.vchk");
    let g = build_send_receive_graph(&inst).unwrap();
    let ids: Vec<(u64, u64)> = g.nodes.iter().map(|&(s, r)| (inst.events[s].id, inst.events[r].id)).collect();
    assert_eq!(ids, [(1, 4), (3, 5), (6, 8), (7, 2)]);
    assert_eq!(g.edges, [(0, 1), (0, 3), (1, 2), (3, 1), (3, 2)]);
    assert!(solve_sync(&inst).unwrap().is_consistent());
}

#[test]
fn synchronous_cycle_is_rejected() {
    // Each thread sends first and receives second: no handshake can go first.
    let inst = parse_instance(
        "vchk v1\nkind abstract\nchannel c cap 0\nchannel d cap 0\n\
         event 1 a snd c\nevent 2 a rcv d\nevent 3 b snd d\nevent 4 b rcv c\nrf 1 4\nrf 3 2\n",
    )
    .unwrap();
    assert!(!solve_sync(&inst).unwrap().is_consistent());
}

#[test]
fn smt_requires_rf() {
    let inst = fixture("cap1_values_consistent.vchk");
    assert_eq!(emit_smtlib(&inst, false), Err(SolveError::MissingRf));
}

#[test]
fn smt_short_circuits_structural_failures() {
    let crossed = fixture("cap1_crossed_rf_inconsistent.vchk");
    let plain = emit_smtlib(&crossed, false).unwrap();
    assert!(!plain.contains("(assert false)"));
    let saturated = emit_smtlib(&crossed, true).unwrap();
    assert!(saturated.contains("(assert false)"));

    // A receive with no matching send can never happen.
    let orphan = parse_instance("vchk v1\nkind abstract\nchannel c cap 1\nevent 1 a snd c\nevent 2 b rcv c\nevent 3 b rcv c\nrf 1 2\n").unwrap();
    assert!(emit_smtlib(&orphan, false).unwrap().contains("(assert false)"));
}

#[test]
fn smt_quotes_unusual_channel_names() {
    let inst = parse_instance("vchk v1\nkind abstract\nchannel 9lives cap inf\nevent 1 a snd 9lives\nevent 2 b rcv 9lives\nrf 1 2\n").unwrap();
    let text = emit_smtlib(&inst, false).unwrap();
    assert!(text.contains("(declare-fun |y_9lives_snd_0| () Int)"));
    assert!(text.contains("(assert (< x_1 x_2))"));
}

#[test]
fn smt_capacity_bounds() {
    let sync = fixture("sync_three_threads.vchk");
    let text = emit_smtlib(&sync, false).unwrap();
    assert!(text.contains("(assert (= (+ x_1 1) x_4))"));
    assert!(text.contains("(+ y_ch1_rcv_0 1)"));

    let inf = parse_instance("vchk v1\nkind abstract\nchannel q cap inf\nevent 1 a snd q\nevent 2 b rcv q\nrf 1 2\n").unwrap();
    let text = emit_smtlib(&inf, false).unwrap();
    assert!(text.contains("(assert (<= y_q_rcv_1 y_q_snd_1))"));
    assert!(!text.contains("(assert (and (<= y_q_rcv"));
}

#[test]
fn external_solver_runner() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(b"(check-sat)\n").unwrap();
    let path = file.path();
    assert_eq!(run_external_solver(path, "echo sat").unwrap(), SolverAnswer::Sat);
    assert_eq!(run_external_solver(path, "echo unsat {}").unwrap(), SolverAnswer::Unsat);
    assert_eq!(run_external_solver(path, "echo unknown").unwrap(), SolverAnswer::Unknown);
    assert!(matches!(run_external_solver(path, "echo maybe"), Err(SolverError::Unparseable(_))));
    assert!(matches!(run_external_solver(path, "   "), Err(SolverError::EmptyCommand)));
    assert!(matches!(run_external_solver(path, "false"), Err(SolverError::Failed { .. })));
    assert!(matches!(
        run_external_solver(path, "/nonexistent/solver-binary"),
        Err(SolverError::Spawn { .. })
    ));
}

mod common;

use std::collections::HashSet;

use chanlin::generators::{
    default_rounds, from_3sat_t3_m5, from_hamiltonian, from_one_in_three_two_threads, from_orthogonal_vectors,
    from_vsc_read, mutate_rf, parse_digraph, parse_dimacs, parse_ov, parse_vsc, random_positive, CnfFormula, GenError,
    Graph, MemOp, OvInstance, RandomParams,
};
use chanlin::{solve_vch, solve_vchrf_saturated, verify_witness, Capacity, Instance, Op};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn rf_is_partial_matching(inst: &Instance) -> bool {
    let Some(rf) = &inst.rf else { return false };
    let pairs = rf.pairs();
    let sends: HashSet<usize> = pairs.iter().map(|p| p.0).collect();
    let recvs: HashSet<usize> = pairs.iter().map(|p| p.1).collect();
    sends.len() == pairs.len()
        && recvs.len() == pairs.len()
        && pairs.iter().all(|&(s, r)| {
            let (s, r) = (&inst.events[s], &inst.events[r]);
            s.op == Op::Snd && r.op == Op::Rcv && s.channel == r.channel
        })
}

// ---- random positives ----

#[test]
fn random_positive_rejects_bad_parameters() {
    let mut p = RandomParams::new(10, 1, 1, 0);
    assert!(matches!(random_positive(&p), Err(GenError::InvalidParams(_))));
    p.capacities = vec![Capacity::Inf];
    assert!(random_positive(&p).is_ok());
    p.values = 0;
    assert!(matches!(random_positive(&p), Err(GenError::InvalidParams(_))));
}

#[test]
fn random_positive_of_size_zero_is_empty() {
    let (inst, trace) = random_positive(&RandomParams::new(0, 2, 2, 1)).unwrap();
    assert_eq!(inst.n(), 0);
    assert!(trace.is_empty());
    assert!(inst.has_rf());
}

proptest! {
    #[test]
    fn random_positive_trace_is_a_witness(seed in any::<u64>(), n in 1usize..60) {
        let (inst, trace) = random_positive(&random_params(seed, n, 4, 3)).unwrap();
        prop_assert!(inst.n() == n || inst.n() + 1 == n);
        prop_assert!(inst.has_all_values());
        prop_assert!(rf_is_partial_matching(&inst));
        prop_assert!(verify_witness(&inst, &trace).is_ok());
    }

    #[test]
    fn random_positive_is_deterministic(seed in any::<u64>()) {
        let p = random_params(seed, 30, 3, 3);
        prop_assert_eq!(random_positive(&p).unwrap(), random_positive(&p).unwrap());
    }

    #[test]
    fn mutation_keeps_rf_a_partial_matching(seed in any::<u64>(), n in 2usize..60, rounds in 0usize..12) {
        let (inst, _) = random_positive(&random_params(seed, n, 3, 2)).unwrap();
        match mutate_rf(&inst, seed, Some(rounds)) {
            Err(e) => prop_assert_eq!(e, GenError::NoRf),
            Ok((m, report)) => {
                prop_assert_eq!(report.rounds, rounds);
                prop_assert_eq!(report.applied + report.skipped, rounds);
                prop_assert!(rf_is_partial_matching(&m));
                prop_assert_eq!(&m.po, &inst.po);
                if report.applied == 0 {
                    prop_assert_eq!(&m, &inst);
                } else {
                    prop_assert!(m.values.is_empty());
                }
                prop_assert_eq!(mutate_rf(&inst, seed, Some(rounds)).unwrap().0, m);
            }
        }
    }
}

#[test]
fn mutation_defaults_scale_with_size() {
    assert_eq!(default_rounds(20), 5);
    assert_eq!(default_rounds(100), 5);
    assert_eq!(default_rounds(101), 6);
    assert_eq!(default_rounds(200), 10);
    let (inst, _) = random_positive(&RandomParams::new(200, 3, 2, 4)).unwrap();
    let (_, report) = mutate_rf(&inst, 4, None).unwrap();
    assert_eq!(report.rounds, 10);
}

#[test]
fn mutation_needs_rf_pairs() {
    let inst = fixture("cap1_values_consistent.vchk");
    assert_eq!(mutate_rf(&inst, 0, None).unwrap_err(), GenError::NoRf);
}

// ---- reductions ----

#[test]
fn hamiltonian_instance_shape() {
    for seed in 0..50 {
        let g = random_digraph(seed, 6);
        let inst = from_hamiltonian(&g);
        let degenerate = g.nodes < 2 || (0..g.nodes).any(|v| g.in_degree(v) == 0 || g.out_degree(v) == 0);
        if degenerate {
            assert_eq!((inst.m(), inst.t()), (1, 1), "seed {seed}");
            assert!(!solve_vch(&inst).unwrap().is_consistent());
        } else {
            assert_eq!(inst.m(), 2 * g.nodes + 3, "seed {seed}");
            assert_eq!(inst.t(), g.nodes + g.edges.len() + 2, "seed {seed}");
        }
        assert_eq!(from_hamiltonian(&g), inst);
    }
}

#[test]
fn hamiltonian_small_graphs() {
    let ring = Graph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
    assert!(solve_vch(&from_hamiltonian(&ring)).unwrap().is_consistent());
    let path = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
    assert!(!solve_vch(&from_hamiltonian(&path)).unwrap().is_consistent());
    // Two disjoint 2-cycles: every node has in- and out-edges, but no tour.
    let split = Graph::new(4, vec![(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
    assert!(!solve_vch(&from_hamiltonian(&split)).unwrap().is_consistent());
}

#[test]
fn hamiltonian_matches_oracle_on_six_nodes() {
    for seed in 1000..1040 {
        let mut r = rng(seed);
        let g = random_digraph(r.gen(), 6);
        let got = solve_vch(&from_hamiltonian(&g)).unwrap().is_consistent();
        assert_eq!(got, has_hamiltonian_cycle(&g), "{g:?}");
    }
}

#[test]
fn three_sat_instance_shape() {
    let f = CnfFormula::new(3, vec![vec![1, -2, 3], vec![-1, 2, -3]]).unwrap();
    let inst = from_3sat_t3_m5(&f).unwrap();
    assert_eq!((inst.t(), inst.m()), (3, 5));
    assert!(inst.channels.iter().all(|c| c.cap == Capacity::Inf));
    assert!(rf_is_partial_matching(&inst));
    assert!(solve_vchrf_saturated(&inst).unwrap().is_consistent());
}

#[test]
fn three_sat_unsatisfiable_formula() {
    // All eight sign patterns over three variables.
    let clauses: Vec<Vec<i64>> = distinct_variable_clauses(3);
    let f = CnfFormula::new(3, clauses).unwrap();
    assert!(!satisfiable(&f));
    assert!(!solve_vchrf_saturated(&from_3sat_t3_m5(&f).unwrap()).unwrap().is_consistent());
}

#[test]
fn three_sat_rejects_wide_clauses() {
    let f = CnfFormula::new(4, vec![vec![1, 2, 3, 4]]).unwrap();
    assert!(from_3sat_t3_m5(&f).is_err());
}

#[test]
fn one_in_three_matches_oracle() {
    let pool: Vec<Vec<i64>> = distinct_variable_clauses(4)
        .into_iter()
        .filter(|c| c.iter().all(|&l| l > 0))
        .collect();
    let mut yes = 0;
    for clauses in clause_subsets(&pool, 3) {
        let f = CnfFormula::new(4, clauses).unwrap();
        let inst = from_one_in_three_two_threads(&f).unwrap();
        assert_eq!((inst.t(), inst.m()), (2, f.clauses.len() + 3));
        let expect = one_in_three_satisfiable(&f);
        assert_eq!(solve_vch(&inst).unwrap().is_consistent(), expect, "{f:?}");
        yes += usize::from(expect);
    }
    assert!(yes > 0);
}

#[test]
fn one_in_three_rejects_negative_or_repeated_literals() {
    for clause in [vec![1, -2, 3], vec![1, 1, 2], vec![1, 2]] {
        let f = CnfFormula::new(3, vec![clause]).unwrap();
        assert!(matches!(from_one_in_three_two_threads(&f), Err(GenError::Malformed(_))));
    }
}

#[test]
fn orthogonal_vectors_instance_shape() {
    let ov = OvInstance::new(vec![vec![false, true], vec![true, false]], vec![vec![false, true], vec![true, true]]).unwrap();
    let inst = from_orthogonal_vectors(&ov).unwrap();
    assert_eq!((inst.t(), inst.m()), (2, ov.d() + 4));
    assert!(solve_vchrf_saturated(&inst).unwrap().is_consistent());

    let none = OvInstance::new(vec![vec![true, true]], vec![vec![true, false]]).unwrap();
    assert!(!solve_vchrf_saturated(&from_orthogonal_vectors(&none).unwrap()).unwrap().is_consistent());
}

#[test]
fn orthogonal_vectors_rejects_zero_vectors() {
    let ov = OvInstance::new(vec![vec![false, false]], vec![vec![true, false]]).unwrap();
    assert!(from_orthogonal_vectors(&ov).is_err());
    assert!(from_orthogonal_vectors(&OvInstance::new(vec![], vec![]).unwrap()).is_err());
}

#[test]
fn orthogonal_vectors_larger_dimension() {
    for seed in 0..40 {
        let ov = random_ov(seed, 4, 5);
        let got = solve_vchrf_saturated(&from_orthogonal_vectors(&ov).unwrap()).unwrap();
        assert_eq!(got.is_consistent(), has_orthogonal_pair(&ov), "{ov:?}");
    }
}

#[test]
fn vsc_reduction_small_cases() {
    let text = "vchk v1\nkind mem\nevent 1 a w x\nevent 2 a r y\nevent 3 b w y\nevent 4 b r x\nrf 1 4\n";
    // A read must name the write it observes.
    assert!(matches!(parse_vsc(text), Err(GenError::Malformed(_))));
    let sb = parse_vsc("vchk v1\nkind mem\nevent 1 a w x\nevent 2 a r y\nevent 3 b w y\nevent 4 b r x\nevent 5 c w y\nrf 1 4\nrf 5 2\n")
        .unwrap();
    let expect = sequentially_consistent(&sb);
    assert!(expect);
    assert!(solve_vchrf_saturated(&from_vsc_read(&sb).unwrap()).unwrap().is_consistent());

    // Each thread reads the other's write before its own write happens.
    let cyc = parse_vsc("vchk v1\nkind mem\nevent 1 a r x\nevent 2 a w y\nevent 3 b r y\nevent 4 b w x\nrf 4 1\nrf 2 3\n").unwrap();
    assert!(!sequentially_consistent(&cyc));
    assert!(!solve_vchrf_saturated(&from_vsc_read(&cyc).unwrap()).unwrap().is_consistent());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reductions_are_deterministic(seed in any::<u64>()) {
        let g = random_digraph(seed, 5);
        prop_assert_eq!(from_hamiltonian(&g), from_hamiltonian(&g));
        let f = random_cnf(seed, 3, 4);
        prop_assert_eq!(from_3sat_t3_m5(&f).unwrap(), from_3sat_t3_m5(&f).unwrap());
        let ov = random_ov(seed, 3, 3);
        prop_assert_eq!(from_orthogonal_vectors(&ov).unwrap(), from_orthogonal_vectors(&ov).unwrap());
        let v = random_vsc(seed, 8);
        prop_assert_eq!(from_vsc_read(&v).unwrap(), from_vsc_read(&v).unwrap());
    }

    #[test]
    fn vsc_reduction_matches_oracle(seed in any::<u64>()) {
        let v = random_vsc(seed, 7);
        let inst = from_vsc_read(&v).unwrap();
        prop_assert!(inst.channels.iter().all(|c| c.cap == Capacity::Finite(1)));
        prop_assert_eq!(solve_vchrf_saturated(&inst).unwrap().is_consistent(), sequentially_consistent(&v));
    }
}

// ---- source parsers ----

#[test]
fn digraph_parsing() {
    let g = parse_digraph("digraph 3\n0 1\n1 2 # comment\n2 0\n").unwrap();
    assert_eq!(g.edges, [(0, 1), (1, 2), (2, 0)]);
    assert!(matches!(parse_digraph("graph 3\n"), Err(GenError::Syntax { line: 1, .. })));
    assert!(matches!(parse_digraph("digraph 2\n0 2\n"), Err(GenError::Malformed(_))));
    assert!(matches!(parse_digraph("digraph 2\n1 1\n"), Err(GenError::Malformed(_))));
    assert!(matches!(parse_digraph("digraph 2\n0 1\n0 1\n"), Err(GenError::Malformed(_))));
    assert!(matches!(parse_digraph("digraph 2\n0 x\n"), Err(GenError::Syntax { line: 2, .. })));
}

#[test]
fn dimacs_parsing() {
    let f = parse_dimacs("c example\np cnf 3 2\n1 -2 3 0\n-1 2\n-3 0\n%\n0\n").unwrap();
    assert_eq!(f.num_vars, 3);
    assert_eq!(f.clauses, [vec![1, -2, 3], vec![-1, 2, -3]]);
    assert!(f.eval(&[true, true, false]));
    assert!(matches!(parse_dimacs("1 2 0\n"), Err(GenError::Syntax { .. })));
    assert!(matches!(parse_dimacs("p cnf 2 2\n1 2 0\n"), Err(GenError::Malformed(_))));
    assert!(matches!(parse_dimacs("p cnf 2 1\n1 5 0\n"), Err(GenError::Malformed(_))));
}

#[test]
fn ov_parsing() {
    let ov = parse_ov("ov 2 2\n01\n1 0\n01\n11\n").unwrap();
    assert_eq!(ov.a, [vec![false, true], vec![true, false]]);
    assert_eq!(ov.b, [vec![false, true], vec![true, true]]);
    assert_eq!((ov.n(), ov.d()), (2, 2));
    assert!(matches!(parse_ov("ov 1 2\n012\n11\n"), Err(GenError::Syntax { line: 2, .. })));
    assert!(matches!(parse_ov("ov 1 2\n01\n"), Err(GenError::Malformed(_))));
    assert!(matches!(parse_ov("ov 1 2\n0a\n11\n"), Err(GenError::Syntax { .. })));
}

#[test]
fn vsc_parsing() {
    let v = parse_vsc("vchk v1\nkind mem\nevent 1 a w x\nevent 2 b r x\nrf 1 2\n").unwrap();
    assert_eq!(v.events.len(), 2);
    assert_eq!(v.events[1].op, MemOp::Read);
    assert_eq!(v.rf, [(1, 2)]);
    for bad in [
        "vchk v1\nevent 1 a w x\n",
        "vchk v1\nkind mem\nevent 1 a q x\n",
        "vchk v1\nkind mem\nevent 1 a w x\nevent 2 b r y\nrf 1 2\n",
        "vchk v1\nkind mem\nevent 1 a r x\nevent 2 b r x\nrf 1 2\n",
        "vchk v1\nkind mem\nevent 1 a w x\nevent 1 b r x\n",
    ] {
        assert!(parse_vsc(bad).is_err(), "{bad}");
    }
}

use mbqc::bell::{ghz_checks, hvm_exhaustive, mbqc_or, satisfies, HvmAssignment, OrMode};

#[test]
fn each_outcome_is_a_fair_coin() {
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let runs = mbqc_or(a, b, OrMode::AllBranches).unwrap();
        for i in 0..3 {
            let p1: f64 = runs.iter().filter(|r| r.s[i] == 1).map(|r| r.probability).sum();
            assert!((p1 - 0.5).abs() < 1e-10);
        }
        assert!(runs.iter().all(|r| r.q == [a, b, a ^ b]));
    }
}

#[test]
fn sampled_runs_follow_the_table() {
    for seed in 0..50 {
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let r = mbqc_or(a, b, OrMode::Sample(seed)).unwrap()[0];
            assert_eq!(r.o, a | b);
        }
    }
    assert_eq!(mbqc_or(1, 0, OrMode::Sample(4)).unwrap(), mbqc_or(1, 0, OrMode::Sample(4)).unwrap());
    assert!(mbqc_or(2, 0, OrMode::AllBranches).is_err());
}

#[test]
fn any_three_constraints_are_satisfiable() {
    for skip in 0..4 {
        let rest: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
        assert_eq!(hvm_exhaustive(&rest).unwrap(), 8);
    }
    assert_eq!(HvmAssignment::all().count(), 64);
    assert!(HvmAssignment::all().all(|v| (0..4).filter(|&c| satisfies(v, c)).count() <= 3));
}

#[test]
fn ghz_relation_to_the_cluster() {
    let r = ghz_checks().unwrap();
    assert!(r.cluster_fidelity > 1.0 - 1e-10);
    assert_eq!(r.rows[0].operator, "XXX");
}

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use mbqc::compiler::{compile, expected_size, grid_demo, verify, verify_pattern, Circuit, VerifyMode};
use mbqc::gates::{self, euler, hadamard, pauli_x, pauli_z, Gate, Mat2};
use mbqc::pattern::{
    cnot_pattern, compose, enumerate_branches, identity_pattern, rotation_pattern, run_pattern, temporal_rounds,
    tensor, three_link_pattern, AngleExpr, ByproductRule, MeasSpec, Measurement, MeasurementPattern,
    PatternParts, RunMode,
};
use mbqc::statevec::StateVector;
use mbqc::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn apply(m: &Mat2, s: &StateVector) -> StateVector {
    let mut out = s.clone();
    out.apply_1q(0, m).unwrap();
    out
}

fn cnot_matrix() -> Vec<Complex64> {
    // control = local bit 0, target = local bit 1
    let o = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    vec![o, z, z, z, z, z, z, o, z, z, o, z, z, o, z, z]
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn rotation_matches_euler_product_on_every_branch() {
    let mut r = rng(11);
    for _ in 0..20 {
        let (zeta, eta, xi) = (r.random_range(-PI..PI), r.random_range(-PI..PI), r.random_range(-PI..PI));
        let p = rotation_pattern(zeta, eta, xi);
        let input = StateVector::random(1, &mut r).unwrap();
        let want = apply(&euler(zeta, eta, xi), &input);
        let runs = enumerate_branches(&p, &input).unwrap();
        assert_eq!(runs.len(), 16);
        for run in runs {
            assert!((run.probability - 1.0 / 16.0).abs() < TOL);
            assert!(run.corrected().unwrap().fidelity(&want).unwrap() >= 1.0 - TOL);
        }
    }
}

#[test]
fn rotation_zero_is_identity() {
    let input = StateVector::random(1, &mut rng(2)).unwrap();
    for run in enumerate_branches(&rotation_pattern(0.0, 0.0, 0.0), &input).unwrap() {
        assert!(run.record.log.iter().all(|e| e.angle == Some(0.0) || e.angle == Some(-0.0)));
        assert!(run.corrected().unwrap().fidelity(&input).unwrap() >= 1.0 - TOL);
    }
}

#[test]
fn quarter_z_turn_on_the_zero_branch() {
    let input = StateVector::random(1, &mut rng(3)).unwrap();
    let p = rotation_pattern(0.0, FRAC_PI_2, 0.0);
    let zeros: BTreeMap<usize, u8> = (1..=4).map(|q| (q, 0)).collect();
    let run = run_pattern(&p, &input, RunMode::Branch(zeros)).unwrap();
    assert_eq!(run.byproduct.z | run.byproduct.x, 0);
    let want = apply(&gates::rz(FRAC_PI_2), &input);
    assert!(run.output.fidelity(&want).unwrap() >= 1.0 - TOL);
}

#[test]
fn three_link_variant() {
    let mut r = rng(4);
    let t: Vec<f64> = (0..3).map(|_| r.random_range(-PI..PI)).collect();
    let p = three_link_pattern(t[0], t[1], t[2]);
    assert_eq!(p.n_qubits(), 4);
    let input = StateVector::random(1, &mut r).unwrap();
    let phase = |x: f64| gates::rz(-x);
    let u = gates::mul(
        &hadamard(),
        &gates::mul(&phase(t[2]), &gates::mul(&hadamard(), &gates::mul(&phase(t[1]), &gates::mul(&hadamard(), &phase(t[0]))))),
    );
    let want = apply(&u, &input);
    for run in enumerate_branches(&p, &input).unwrap() {
        assert!(run.corrected().unwrap().fidelity(&want).unwrap() >= 1.0 - TOL);
    }
}

fn chain(angles: &[f64]) -> MeasurementPattern {
    let k = angles.len();
    MeasurementPattern::new(PatternParts {
        qubits: (1..=k + 1).collect(),
        inputs: vec![1],
        outputs: vec![k + 1],
        edges: (1..=k).map(|q| (q, q + 1)).collect(),
        measurements: angles
            .iter()
            .enumerate()
            .map(|(j, &a)| Measurement { qubit: j + 1, spec: MeasSpec::Equatorial(AngleExpr::fixed(a)) })
            .collect(),
        byproducts: vec![ByproductRule::default()],
        reference: vec![],
    })
    .unwrap()
}

#[test]
fn single_link_teleports_with_phase() {
    let mut r = rng(5);
    let phi = r.random_range(-PI..PI);
    let input = StateVector::random(1, &mut r).unwrap();
    for run in enumerate_branches(&chain(&[phi]), &input).unwrap() {
        let s = run.record.outcomes[&1];
        let mut m = gates::mul(&hadamard(), &gates::rz(-phi));
        if s == 1 {
            m = gates::mul(&m, &pauli_z());
        }
        assert!(run.output.fidelity(&apply(&m, &input)).unwrap() >= 1.0 - TOL);
    }
}

#[test]
fn two_links_without_adaptation() {
    let mut r = rng(6);
    let (p1, p2) = (r.random_range(-PI..PI), r.random_range(-PI..PI));
    let input = StateVector::random(1, &mut r).unwrap();
    let runs = enumerate_branches(&chain(&[p1, p2]), &input).unwrap();
    assert_eq!(runs.len(), 4);
    for run in runs {
        let (s1, s2) = (run.record.outcomes[&1], run.record.outcomes[&2]);
        let sign = if s1 == 1 { -1.0 } else { 1.0 };
        // X^{s2} Z^{s1} e^{i(−1)^{s1}φ₂X/2} e^{iφ₁Z/2}
        let mut m = gates::mul(&gates::rx(-sign * p2), &gates::rz(-p1));
        if s1 == 1 {
            m = gates::mul(&pauli_z(), &m);
        }
        if s2 == 1 {
            m = gates::mul(&pauli_x(), &m);
        }
        assert!(run.output.fidelity(&apply(&m, &input)).unwrap() >= 1.0 - TOL);
    }
}

#[test]
fn adaptation_negates_the_second_angle() {
    let p = rotation_pattern(0.3, 0.7, 1.1);
    let input = StateVector::random(1, &mut rng(7)).unwrap();
    let angle2 = |s1: u8| {
        let bits: BTreeMap<usize, u8> = [(1, s1), (2, 0), (3, 0), (4, 0)].into_iter().collect();
        let run = run_pattern(&p, &input, RunMode::Branch(bits)).unwrap();
        run.record.log.iter().find(|e| e.qubit == 2).unwrap().angle.unwrap()
    };
    assert!((angle2(0) + angle2(1)).abs() < 1e-15);
    assert!((angle2(0) + 1.1).abs() < 1e-15);
}

#[test]
fn cnot_branches() {
    let mut r = rng(8);
    for _ in 0..10 {
        let input = StateVector::random(2, &mut r).unwrap();
        let mut want = input.clone();
        want.apply_unitary(&[0, 1], &cnot_matrix()).unwrap();
        let runs = enumerate_branches(&cnot_pattern(), &input).unwrap();
        assert_eq!(runs.len(), 4);
        for run in runs {
            assert!((run.probability - 0.25).abs() < TOL);
            assert!(run.corrected().unwrap().fidelity(&want).unwrap() >= 1.0 - TOL);
            if run.record.outcomes.values().all(|&s| s == 0) {
                assert!(run.output.fidelity(&want).unwrap() >= 1.0 - TOL);
            }
        }
    }
    let zero = StateVector::zero(2).unwrap();
    for run in enumerate_branches(&cnot_pattern(), &zero).unwrap() {
        assert!(run.corrected().unwrap().fidelity(&zero).unwrap() >= 1.0 - TOL);
    }
}

#[test]
fn forced_forbidden_branch_is_an_error() {
    // Z measurement of |0⟩ cannot give 1.
    let p = MeasurementPattern::new(PatternParts {
        qubits: vec![0, 1],
        inputs: vec![0],
        outputs: vec![1],
        edges: vec![],
        measurements: vec![Measurement { qubit: 0, spec: MeasSpec::Z }],
        byproducts: vec![ByproductRule::default()],
        reference: vec![],
    })
    .unwrap();
    let bits: BTreeMap<usize, u8> = [(0, 1)].into_iter().collect();
    let r = run_pattern(&p, &StateVector::zero(1).unwrap(), RunMode::Branch(bits));
    assert!(matches!(r, Err(mbqc::Error::ForbiddenBranch(_))));
}

#[test]
fn rotation_after_rotation() {
    let mut r = rng(9);
    let a: Vec<f64> = (0..6).map(|_| r.random_range(-PI..PI)).collect();
    let p = compose(&rotation_pattern(a[0], a[1], a[2]), &rotation_pattern(a[3], a[4], a[5]), &[0]).unwrap();
    assert_eq!(p.n_qubits(), 9);
    let input = StateVector::random(1, &mut r).unwrap();
    let want = apply(&gates::mul(&euler(a[3], a[4], a[5]), &euler(a[0], a[1], a[2])), &input);
    let runs = enumerate_branches(&p, &input).unwrap();
    assert_eq!(runs.len(), 256);
    for run in runs {
        assert!(run.corrected().unwrap().fidelity(&want).unwrap() >= 1.0 - TOL);
    }
}

#[test]
fn zero_rotation_then_cnot_acts_as_cnot() {
    let front = tensor(&rotation_pattern(0.0, 0.0, 0.0), &identity_pattern(1).unwrap()).unwrap();
    let p = compose(&front, &cnot_pattern(), &[0, 1]).unwrap();
    let input = StateVector::random(2, &mut rng(10)).unwrap();
    let mut want = input.clone();
    want.apply_unitary(&[0, 1], &cnot_matrix()).unwrap();
    for run in enumerate_branches(&p, &input).unwrap() {
        assert!(run.corrected().unwrap().fidelity(&want).unwrap() >= 1.0 - TOL);
    }
}

#[test]
fn cnot_after_rotation_and_wire() {
    let mut r = rng(12);
    let a: Vec<f64> = (0..3).map(|_| r.random_range(-PI..PI)).collect();
    let front = tensor(&rotation_pattern(a[0], a[1], a[2]), &identity_pattern(1).unwrap()).unwrap();
    let p = compose(&front, &cnot_pattern(), &[0, 1]).unwrap();
    assert!(p.n_qubits() <= 13);
    for _ in 0..3 {
        let input = StateVector::random(2, &mut r).unwrap();
        let mut want = input.clone();
        want.apply_1q(0, &euler(a[0], a[1], a[2])).unwrap();
        want.apply_unitary(&[0, 1], &cnot_matrix()).unwrap();
        for run in enumerate_branches(&p, &input).unwrap() {
            assert!(run.corrected().unwrap().fidelity(&want).unwrap() >= 1.0 - TOL);
        }
    }
}

#[test]
fn reversed_wiring_swaps_roles() {
    // CNOT fed with crossed wires is a CNOT with control and target exchanged.
    let p = compose(&identity_pattern(2).unwrap(), &cnot_pattern(), &[1, 0]).unwrap();
    assert_eq!(p.reference(), &[Gate::Cnot { control: 1, target: 0 }]);
    let input = StateVector::random(2, &mut rng(13)).unwrap();
    let mut want = input.clone();
    want.apply_cnot(1, 0).unwrap();
    for run in enumerate_branches(&p, &input).unwrap() {
        assert!(run.corrected().unwrap().fidelity(&want).unwrap() >= 1.0 - TOL);
    }
    assert!(compose(&identity_pattern(2).unwrap(), &cnot_pattern(), &[1, 1]).is_err());
}

#[test]
fn mixed_circuit_verifies_exhaustively() {
    let c = Circuit::new(
        2,
        vec![
            Gate::Rot { q: 0, zeta: 0.3, eta: -1.2, xi: 2.2 },
            Gate::Cnot { control: 0, target: 1 },
            Gate::Rot { q: 1, zeta: 1.9, eta: 0.4, xi: -0.8 },
        ],
    )
    .unwrap();
    let p = compile(&c).unwrap();
    assert_eq!(p.n_qubits(), expected_size(&c));
    assert!(temporal_rounds(&p).unwrap().len() <= 2 * 4 + 1);
    let rep = verify(&c, 2, VerifyMode::Exhaustive, 5).unwrap();
    assert_eq!(rep.branches_verified, 2 * (1 << 10));
    assert!(rep.passes(1e-10), "min fidelity {}", rep.min_fidelity);
}

#[test]
fn hadamard_compiles() {
    let c = Circuit::new(2, vec![Gate::H { q: 1 }, Gate::Cnot { control: 1, target: 0 }, Gate::H { q: 1 }]).unwrap();
    let rep = verify(&c, 2, VerifyMode::Exhaustive, 3).unwrap();
    assert!(rep.passes(1e-10));
}

#[test]
fn sampled_verification() {
    let c = Circuit::parse("ROT 0 0.1 0.2 0.3\nCNOT 1 0\nROT 1 1 2 3\nCNOT 0 1\n").unwrap();
    let rep = verify(&c, 2, VerifyMode::Sampled { trials: 50, seed: 3 }, 4).unwrap();
    assert_eq!(rep.branches_verified, 100);
    assert!(rep.passes(1e-10));
    let again = verify(&c, 2, VerifyMode::Sampled { trials: 50, seed: 3 }, 4).unwrap();
    assert_eq!(rep, again);
}

#[test]
fn three_wire_circuit() {
    let c = Circuit::parse("CNOT 0 2\nROT 1 0.5 0.5 0.5\nCNOT 2 1\n").unwrap();
    let p = compile(&c).unwrap();
    assert_eq!(p.n_qubits(), expected_size(&c));
    assert!(verify(&c, 1, VerifyMode::Exhaustive, 8).unwrap().passes(1e-10));
}

#[test]
fn grid_embedding() {
    let demo = grid_demo(0.4, -0.9, 1.3).unwrap();
    assert_eq!((demo.rows, demo.cols), (2, 7));
    assert_eq!(demo.pattern.n_qubits(), 14);
    let rep = verify_pattern(&demo.pattern, &demo.circuit, 2, VerifyMode::Exhaustive, 1).unwrap();
    assert_eq!(rep.branches_verified, 2 * (1 << 12));
    assert!(rep.passes(1e-10), "min fidelity {}", rep.min_fidelity);
}

#[test]
fn sampling_is_reproducible() {
    let p = rotation_pattern(0.2, 0.4, 0.6);
    let input = StateVector::random(1, &mut rng(14)).unwrap();
    let a = run_pattern(&p, &input, RunMode::Sample(99)).unwrap();
    let b = run_pattern(&p, &input, RunMode::Sample(99)).unwrap();
    assert_eq!(a.record, b.record);
}

fn arb_gate(width: usize) -> impl Strategy<Value = Gate> {
    let angle = -PI..PI;
    prop_oneof![
        (0..width, angle.clone(), angle.clone(), angle).prop_map(|(q, zeta, eta, xi)| Gate::Rot { q, zeta, eta, xi }),
        (0..width, 1..width).prop_map(move |(c, d)| Gate::Cnot { control: c, target: (c + d) % width }),
        (0..width).prop_map(|q| Gate::H { q }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn compiled_circuits_match_the_oracle(gates in prop::collection::vec(arb_gate(2), 0..4), seed in any::<u64>()) {
        let c = Circuit::new(2, gates).unwrap();
        let p = compile(&c).unwrap();
        prop_assert_eq!(p.n_qubits(), expected_size(&c));
        let mode = if p.n_measured() <= 12 { VerifyMode::Exhaustive } else { VerifyMode::Sampled { trials: 64, seed } };
        let rep = verify_pattern(&p, &c, 1, mode, seed).unwrap();
        prop_assert!(rep.passes(1e-9), "min fidelity {}", rep.min_fidelity);
    }

    #[test]
    fn json_preserves_behaviour(gates in prop::collection::vec(arb_gate(2), 1..3)) {
        let c = Circuit::new(2, gates).unwrap();
        let p = compile(&c).unwrap();
        let back = MeasurementPattern::from_json(&p.to_json()).unwrap();
        prop_assert_eq!(&back, &p);
    }
}

use std::f64::consts::PI;

use mbqc::aklt::{
    brick_wall, build_aklt, check_reduction_consistency, percolation_mc, povm_element, reduce_to_graph,
    rotation_basis, same_axis_probability, sample_povm, spin_matrices, wire_step, AkltState, Axis, AxisModel,
    Boundary, LogicalQubit, PovmMode, PovmOutcome, SpinKind, WireBasis, WireLabel,
};
use mbqc::stabilizer::{contract_edge, reduce_multigraph, Graph, Multigraph};
use mbqc::statevec::StateVector;
use mbqc::{Complex64, Error};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn all_outcomes(n: usize) -> Vec<PovmOutcome> {
    (0..3usize.pow(n as u32))
        .map(|mut k| {
            PovmOutcome(
                (0..n)
                    .map(|_| {
                        let a = Axis::ALL[k % 3];
                        k /= 3;
                        a
                    })
                    .collect(),
            )
        })
        .collect()
}

#[test]
fn two_spin1_sites_have_no_spin2_component() {
    let a = build_aklt(&Graph::path(2), SpinKind::Spin1, Boundary::Zero).unwrap();
    let psi = DVector::from_fn(9, |i, _| a.amplitude(&[i / 3, i % 3], 0));
    assert!((psi.norm() - 1.0).abs() < 1e-12);
    let s = spin_matrices(2);
    let id = DMatrix::<Complex64>::identity(3, 3);
    let mut s2 = DMatrix::<Complex64>::zeros(9, 9);
    for m in &s {
        let tot = m.kronecker(&id) + id.kronecker(m);
        s2 += &tot * &tot;
    }
    let eig = s2.symmetric_eigen();
    let mut spin2 = 0.0;
    let mut total = 0.0;
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        let w = eig.eigenvectors.column(i).dotc(&psi).norm_sqr();
        total += w;
        if (l - 6.0).abs() < 1e-9 {
            spin2 += w;
        }
    }
    assert!((total - 1.0).abs() < 1e-12);
    assert!(spin2 < 1e-24, "spin-2 weight {spin2}");
}

fn assert_rotation_invariant(a: &AkltState, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for axis in Axis::ALL {
        let theta = rng.random_range(-PI..PI);
        let r = a.rotate_all(axis, theta).unwrap();
        assert!(r.fidelity(a.state()).unwrap() >= 1.0 - 1e-10, "{axis} {theta}");
    }
}

#[test]
fn closed_and_open_patches_are_rotation_invariant() {
    assert_rotation_invariant(&build_aklt(&Graph::path(2), SpinKind::Spin3Half, Boundary::Open).unwrap(), 1);
    assert_rotation_invariant(&build_aklt(&Graph::complete(4), SpinKind::Spin3Half, Boundary::Zero).unwrap(), 2);
    assert_rotation_invariant(&build_aklt(&Graph::cycle(5), SpinKind::Spin1, Boundary::Zero).unwrap(), 3);
    // The |0⟩ boundary breaks the symmetry, which the check has to notice.
    let pinned = build_aklt(&Graph::path(2), SpinKind::Spin3Half, Boundary::Zero).unwrap();
    assert!(pinned.rotate_all(Axis::X, 1.0).unwrap().fidelity(pinned.state()).unwrap() < 0.99);
}

#[test]
fn outcome_probabilities_sum_to_one() {
    let a = build_aklt(&Graph::path(3), SpinKind::Spin3Half, Boundary::Zero).unwrap();
    for site in 0..3 {
        // Marginal at `site` plus all orders of the others: the joint law sums to one.
        let mut total = 0.0;
        for axis in Axis::ALL {
            let mut o = vec![Axis::X; 3];
            o[site] = axis;
            for rest in all_outcomes(2) {
                let mut full = o.clone();
                let mut it = rest.0.iter();
                for (s, slot) in full.iter_mut().enumerate() {
                    if s != site {
                        *slot = *it.next().unwrap();
                    }
                }
                total += match sample_povm(&a, &PovmMode::Forced(PovmOutcome(full))) {
                    Ok(r) => r.probability,
                    Err(Error::ForbiddenBranch(_)) => 0.0,
                    Err(e) => panic!("{e}"),
                };
            }
        }
        assert!((total - 1.0).abs() < 1e-10);
    }
}

#[test]
fn single_site_all_z() {
    let a = build_aklt(&Graph::new(1), SpinKind::Spin3Half, Boundary::Zero).unwrap();
    let r = sample_povm(&a, &PovmMode::Forced("z".parse().unwrap())).unwrap();
    assert!((r.probability - 2.0 / 3.0).abs() < 1e-12);
    assert!(r.state.fidelity(&StateVector::zero(2).unwrap()).unwrap() > 1.0 - 1e-12);
    let f = povm_element(Axis::Z);
    assert!((f[(3, 3)] - c((2.0f64 / 3.0).sqrt())).norm() < 1e-12);
}

#[test]
fn two_site_same_axis_probability() {
    let zero = build_aklt(&Graph::path(2), SpinKind::Spin3Half, Boundary::Zero).unwrap();
    let open = build_aklt(&Graph::path(2), SpinKind::Spin3Half, Boundary::Open).unwrap();
    assert!((same_axis_probability(&zero, 0, 1).unwrap() - 1.0 / 6.0).abs() < 1e-12);
    assert!((same_axis_probability(&open, 0, 1).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    let trials = 10_000;
    let same = (0..trials)
        .filter(|&t| {
            let o = sample_povm(&open, &PovmMode::Sample(t)).unwrap().outcome;
            o.0[0] == o.0[1]
        })
        .count();
    let freq = same as f64 / trials as f64;
    assert!((freq - 1.0 / 3.0).abs() < 0.05, "{freq}");
}

#[test]
fn two_site_consistency() {
    for boundary in [Boundary::Zero, Boundary::Open] {
        let a = build_aklt(&Graph::path(2), SpinKind::Spin3Half, boundary).unwrap();
        let r = check_reduction_consistency(&a, &"xy".parse().unwrap()).unwrap();
        assert!(r.pass);
        assert_eq!((r.domains, r.bipartitions, r.edges.len()), (2, 1, 1));
        let r = check_reduction_consistency(&a, &"yy".parse().unwrap()).unwrap();
        assert!(r.pass);
        assert_eq!((r.domains, r.bipartitions), (1, 0));
    }
}

#[test]
fn every_small_patch_outcome_is_consistent() {
    let patches = [
        Graph::path(3),
        Graph::path(4),
        Graph::star(4),
        Graph::cycle(4),
        Graph::cycle(3),
        Graph::complete(4),
    ];
    for boundary in [Boundary::Zero, Boundary::Open] {
        for g in &patches {
            let a = build_aklt(g, SpinKind::Spin3Half, boundary).unwrap();
            let mut checked = 0;
            for o in all_outcomes(g.n_vertices()) {
                match check_reduction_consistency(&a, &o) {
                    Ok(r) => {
                        assert!(r.pass, "{boundary:?} {} {o}: {}", g.to_edge_list(), r.max_deviation);
                        checked += 1;
                    }
                    Err(Error::ForbiddenBranch(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
            assert!(checked > 0);
        }
    }
}

#[test]
fn hexagon_samples_are_consistent() {
    let a = build_aklt(&Graph::cycle(6), SpinKind::Spin3Half, Boundary::Zero).unwrap();
    for seed in 0..6 {
        let o = sample_povm(&a, &PovmMode::Sample(seed)).unwrap().outcome;
        assert!(check_reduction_consistency(&a, &o).unwrap().pass);
    }
}

#[test]
fn percolation_on_the_brick_wall() {
    assert_eq!(brick_wall(2).n_edges(), 3);
    let r = percolation_mc(10, &AxisModel::uniform(), 1000, 5).unwrap();
    assert!(r.fraction >= 0.9, "{}", r.fraction);
    let sizes = [4, 8, 12, 16];
    let rows: Vec<_> = sizes.iter().map(|&l| percolation_mc(l, &AxisModel::uniform(), 400, 9).unwrap()).collect();
    for w in rows.windows(2) {
        assert!(w[1].fraction >= w[0].fraction - (w[0].half_width + w[1].half_width) - 1e-12);
    }
    assert_eq!(percolation_mc(6, &AxisModel::uniform(), 50, 3), percolation_mc(6, &AxisModel::uniform(), 50, 3));
}

fn apply_pauli(q: &LogicalQubit, x: bool, z: bool) -> LogicalQubit {
    q.transformed(x, z, 0.0)
}

#[test]
fn chained_rotations_add_up() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..25 {
        let (g1, g2) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI));
        let q = LogicalQubit::normalized(
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        )
        .unwrap();
        let want = q.transformed(false, false, g1 + g2);
        for o1 in wire_step(&q, rotation_basis(g1, false)).unwrap() {
            if o1.label == WireLabel::Z {
                continue;
            }
            for o2 in wire_step(&o1.state, rotation_basis(g2, o1.x)).unwrap() {
                if o2.label == WireLabel::Z {
                    continue;
                }
                let best = [(false, false), (true, false), (false, true), (true, true)]
                    .iter()
                    .map(|&(x, z)| apply_pauli(&want, x, z).fidelity(&o2.state))
                    .fold(0.0, f64::max);
                assert!(best > 1.0 - 1e-10);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn wire_outcomes_are_normalized_and_factored(
        re0 in -1.0f64..1.0, im0 in -1.0f64..1.0, re1 in -1.0f64..1.0, im1 in -1.0f64..1.0,
        alpha in -PI..PI, use_b in any::<bool>(),
    ) {
        prop_assume!(re0.abs() + im0.abs() + re1.abs() + im1.abs() > 1e-3);
        let q = LogicalQubit::normalized(Complex64::new(re0, im0), Complex64::new(re1, im1)).unwrap();
        let basis = if use_b { WireBasis::B(alpha) } else { WireBasis::Xyz };
        let out = wire_step(&q, basis).unwrap();
        prop_assert!((out.iter().map(|o| o.probability).sum::<f64>() - 1.0).abs() < 1e-12);
        for o in &out {
            prop_assert!((o.probability - 1.0 / 3.0).abs() < 1e-12);
            prop_assert!(q.transformed(o.x, o.z, o.rotation).fidelity(&o.state) > 1.0 - 1e-12);
        }
    }

    #[test]
    fn reduction_ignores_contraction_order(
        edges in proptest::collection::vec((0usize..7, 0usize..7), 0..14),
        axes in proptest::collection::vec(0usize..3, 7),
        order_seed in any::<u64>(),
    ) {
        let mut g = Graph::new(7);
        for (u, v) in edges {
            if u != v && !g.has_edge(u, v) {
                g.add_edge(u, v).unwrap();
            }
        }
        let o = PovmOutcome(axes.iter().map(|&a| Axis::ALL[a]).collect());
        let red = reduce_to_graph(&g, &o).unwrap();
        let mut same: Vec<(usize, usize)> = g.edges().filter(|&(u, v)| o.0[u] == o.0[v]).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(order_seed);
        for i in (1..same.len()).rev() {
            same.swap(i, rng.random_range(0..=i));
        }
        let mut mg = Multigraph::from_graph(&g);
        let mut label: Vec<usize> = (0..7).collect();
        for (u, v) in same {
            let (a, b) = (label[u].min(label[v]), label[u].max(label[v]));
            if a == b {
                continue;
            }
            mg = contract_edge(&mg, a, b).unwrap();
            for l in label.iter_mut() {
                if *l == b {
                    *l = a;
                } else if *l > b {
                    *l -= 1;
                }
            }
        }
        prop_assert_eq!(reduce_multigraph(&mg), red.graph);
        prop_assert_eq!(label, red.domain_of);
    }
}

#[test]
fn relabelled_open_path() {
    // The sorted-party reduced matrix here once broke the dense eigensolver.
    let g = Graph::with_edges(4, [(0, 1), (0, 3), (1, 2)]).unwrap();
    let a = build_aklt(&g, SpinKind::Spin3Half, Boundary::Open).unwrap();
    let r = check_reduction_consistency(&a, &"yxzz".parse().unwrap()).unwrap();
    assert!(r.pass, "{}", r.max_deviation);
}

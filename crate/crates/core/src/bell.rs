//! GHZ correlations: the stabilizer checks, the hidden-variable count, and
//! the OR gate computed from them with parity-only classical processing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::hadamard;
use crate::stabilizer::{expectation, graph_state, Graph, PauliOperator};
use crate::statevec::{Basis, StateVector};
use crate::Complex64;

/// The four operators with eigenvalue +1 on |GHZ⟩.
pub const GHZ_STABILIZERS: [&str; 4] = ["+XXX", "-XYY", "-YXY", "-YYX"];

/// (|000⟩ + |111⟩)/√2
pub fn ghz_state() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut a = vec![Complex64::new(0.0, 0.0); 8];
    a[0] = Complex64::new(h, 0.0);
    a[7] = Complex64::new(h, 0.0);
    StateVector::from_amplitudes(a).expect("normalized")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhzRow {
    /// Unsigned product, e.g. "XYY".
    pub operator: String,
    pub expectation: f64,
    pub expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhzReport {
    pub rows: Vec<GhzRow>,
    /// Fidelity of H on the outer qubits of |GHZ⟩ with the three-qubit cluster.
    pub cluster_fidelity: f64,
    pub pass: bool,
}

pub fn ghz_checks() -> Result<GhzReport> {
    let ghz = ghz_state();
    let mut rows = Vec::new();
    for s in GHZ_STABILIZERS {
        let signed: PauliOperator = s.parse()?;
        let bare: PauliOperator = s[1..].parse()?;
        rows.push(GhzRow {
            operator: s[1..].to_string(),
            expectation: expectation(&ghz, &bare)?,
            expected: expectation(&ghz, &signed)? * if s.starts_with('-') { -1.0 } else { 1.0 },
        });
    }
    let mut h = ghz.clone();
    h.apply_1q(0, &hadamard())?;
    h.apply_1q(2, &hadamard())?;
    let cluster_fidelity = h.fidelity(&graph_state(&Graph::path(3))?)?;
    let pass = rows.iter().all(|r| (r.expectation - r.expected).abs() < 1e-10 && r.expected.abs() > 0.5)
        && cluster_fidelity > 1.0 - 1e-10;
    Ok(GhzReport { rows, cluster_fidelity, pass })
}

/// Pre-assigned values; bit i set means v = −1, in the order
/// X₁, X₂, X₃, Y₁, Y₂, Y₃.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HvmAssignment(pub u8);

impl HvmAssignment {
    pub fn all() -> impl Iterator<Item = HvmAssignment> {
        (0..64).map(HvmAssignment)
    }

    pub fn value(&self, i: usize) -> i8 {
        if self.0 >> i & 1 == 1 {
            -1
        } else {
            1
        }
    }

    /// Value for the observable on `qubit` (0-based), X or Y.
    pub fn of(&self, qubit: usize, y: bool) -> i8 {
        self.value(qubit + if y { 3 } else { 0 })
    }
}

/// (Y on qubit i?, required product) for the four GHZ constraints.
pub const HVM_CONSTRAINTS: [([bool; 3], i8); 4] = [
    ([false, false, false], 1),
    ([false, true, true], -1),
    ([true, false, true], -1),
    ([true, true, false], -1),
];

pub fn satisfies(v: HvmAssignment, constraint: usize) -> bool {
    let (ys, want) = HVM_CONSTRAINTS[constraint];
    (0..3).map(|q| v.of(q, ys[q])).product::<i8>() == want
}

/// Number of the 64 assignments meeting every constraint in `constraints`.
pub fn hvm_exhaustive(constraints: &[usize]) -> Result<usize> {
    if let Some(&c) = constraints.iter().find(|&&c| c >= HVM_CONSTRAINTS.len()) {
        return Err(Error::Invalid(format!("no constraint {c}")));
    }
    Ok(HvmAssignment::all().filter(|&v| constraints.iter().all(|&c| satisfies(v, c))).count())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrRun {
    pub a: u8,
    pub b: u8,
    /// 0 measures X, 1 measures Y.
    pub q: [u8; 3],
    pub s: [u8; 3],
    pub o: u8,
    pub probability: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrMode {
    Sample(u64),
    AllBranches,
}

fn or_bases(a: u8, b: u8) -> [u8; 3] {
    [a, b, a ^ b]
}

fn basis(q: u8) -> Basis {
    if q == 0 {
        Basis::x()
    } else {
        Basis::y()
    }
}

/// Measures qubit i of |GHZ⟩ in X or Y by q = (a, b, a⊕b) and returns
/// o = s₁⊕s₂⊕s₃, sampled once or for every possible branch.
pub fn mbqc_or(a: u8, b: u8, mode: OrMode) -> Result<Vec<OrRun>> {
    if a > 1 || b > 1 {
        return Err(Error::Invalid("inputs are bits".into()));
    }
    let q = or_bases(a, b);
    let ghz = ghz_state();
    let run = |s: [u8; 3], probability: f64| OrRun { a, b, q, s, o: s[0] ^ s[1] ^ s[2], probability };
    match mode {
        OrMode::Sample(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut state = ghz;
            let mut s = [0u8; 3];
            let mut p = 1.0;
            for i in 0..3 {
                // The register shrinks, so the next qubit is always index 0.
                let m = state.measure_random(0, basis(q[i]), &mut rng)?;
                s[i] = m.outcome;
                p *= m.probability;
                state = m.post_state;
            }
            Ok(vec![run(s, p)])
        }
        OrMode::AllBranches => {
            let mut out = Vec::new();
            for bits in 0..8u8 {
                let s = [bits & 1, bits >> 1 & 1, bits >> 2 & 1];
                let mut state = ghz.clone();
                let mut p = 1.0;
                let mut live = true;
                for i in 0..3 {
                    match state.measure(0, basis(q[i]), s[i]) {
                        Ok(m) => {
                            p *= m.probability;
                            state = m.post_state;
                        }
                        Err(Error::ForbiddenBranch(_)) => {
                            live = false;
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
                if live {
                    out.push(run(s, p));
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_expectations() {
        let r = ghz_checks().unwrap();
        assert!(r.pass);
        let e: Vec<f64> = r.rows.iter().map(|r| r.expectation.round()).collect();
        assert_eq!(e, vec![1.0, -1.0, -1.0, -1.0]);
    }

    #[test]
    fn hidden_variables_fail() {
        assert_eq!(hvm_exhaustive(&[0, 1, 2, 3]).unwrap(), 0);
        assert_eq!(hvm_exhaustive(&[0]).unwrap(), 32);
        assert_eq!(hvm_exhaustive(&[]).unwrap(), 64);
        assert!(hvm_exhaustive(&[4]).is_err());
    }

    #[test]
    fn or_truth_table() {
        for a in 0..2 {
            for b in 0..2 {
                let runs = mbqc_or(a, b, OrMode::AllBranches).unwrap();
                assert_eq!(runs.len(), 4);
                assert!(runs.iter().all(|r| r.o == a | b));
                assert!((runs.iter().map(|r| r.probability).sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }
}

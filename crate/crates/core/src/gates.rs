//! Single-qubit matrices and the small gate set used by circuits and pattern references.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::statevec::StateVector;

/// Haar-random 2×2 unitary (QR of a complex Gaussian matrix, phases fixed).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let mut g = || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let (a, b, c, d) = (g(), g(), g(), g());
    let n0 = (a.norm_sqr() + c.norm_sqr()).sqrt();
    let (u0, u1) = (a / n0, c / n0);
    let proj = u0.conj() * b + u1.conj() * d;
    let (v0, v1) = (b - proj * u0, d - proj * u1);
    let n1 = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
    [[u0, v0 / n1], [u1, v1 / n1]]
}

/// Row-major 2×2 complex matrix.
pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn hadamard() -> Mat2 {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub fn pauli_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_y() -> Mat2 {
    [[ZERO, -I], [I, ZERO]]
}

pub fn pauli_z() -> Mat2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}

/// e^{-iθX/2}
pub fn rx(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let c = Complex64::new(c, 0.0);
    let s = Complex64::new(0.0, -s);
    [[c, s], [s, c]]
}

/// e^{-iθZ/2}
pub fn rz(theta: f64) -> Mat2 {
    [
        [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
        [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
    ]
}

/// e^{-iζX/2} e^{-iηZ/2} e^{-iξX/2}; ξ acts first.
pub fn euler(zeta: f64, eta: f64, xi: f64) -> Mat2 {
    mul(&rx(zeta), &mul(&rz(eta), &rx(xi)))
}

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn dagger(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

/// Largest entry of |U†U − I|.
pub fn unitarity_deviation(u: &Mat2) -> f64 {
    let p = mul(&dagger(u), u);
    let id = identity();
    let mut worst: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            worst = worst.max((p[r][c] - id[r][c]).norm());
        }
    }
    worst
}

/// |tr(A†B)|/2 ≥ 1 − tol, i.e. equal up to a global phase for unitaries.
pub fn equal_up_to_phase(a: &Mat2, b: &Mat2, tol: f64) -> bool {
    let p = mul(&dagger(a), b);
    ((p[0][0] + p[1][1]).norm() / 2.0) >= 1.0 - tol
}

/// The gate set shared by circuits and pattern reference unitaries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum Gate {
    /// e^{-iζX/2} e^{-iηZ/2} e^{-iξX/2} on wire `q`.
    Rot { q: usize, zeta: f64, eta: f64, xi: f64 },
    Cnot { control: usize, target: usize },
    H { q: usize },
}

impl Gate {
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            Gate::Rot { q, .. } | Gate::H { q } => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn relabel(&self, f: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::Rot { q, zeta, eta, xi } => Gate::Rot { q: f(q), zeta, eta, xi },
            Gate::Cnot { control, target } => Gate::Cnot {
                control: f(control),
                target: f(target),
            },
            Gate::H { q } => Gate::H { q: f(q) },
        }
    }

    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        match *self {
            Gate::Rot { q, zeta, eta, xi } => state.apply_1q(q, &euler(zeta, eta, xi)),
            Gate::Cnot { control, target } => state.apply_cnot(control, target),
            Gate::H { q } => state.apply_1q(q, &hadamard()),
        }
    }
}

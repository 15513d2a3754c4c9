//! The spin-1 chain as a wire for one logical qubit spanned by |G₀⟩, |G₁⟩.
//!
//! Decoupling the first spin leaves
//! √(2/3)[(a₀/√2|0⟩ + a₁|−1⟩)|G₀⟩ − (a₀|+1⟩ + a₁/√2|0⟩)|G₁⟩],
//! and measuring that spin in |β⟩ maps (a₀, a₁) through ⟨β|·, which is
//! antilinear in β.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalQubit {
    a0: Complex64,
    a1: Complex64,
}

impl LogicalQubit {
    /// Rejects inputs whose norm is off by more than 1e−12.
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        let n = a0.norm_sqr() + a1.norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("logical qubit has norm² {n}")));
        }
        Ok(LogicalQubit { a0, a1 })
    }

    pub fn normalized(a0: Complex64, a1: Complex64) -> Result<Self> {
        let n = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if n < 1e-12 {
            return Err(Error::ZeroNorm);
        }
        Ok(LogicalQubit { a0: a0 / n, a1: a1 / n })
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.a0, self.a1]
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &LogicalQubit) -> f64 {
        (self.a0.conj() * other.a0 + self.a1.conj() * other.a1).norm_sqr()
    }

    /// X^x Z^z R^z(θ) applied to the state, with R^z(θ) = diag(1, e^{iθ}).
    pub fn transformed(&self, x: bool, z: bool, theta: f64) -> LogicalQubit {
        let mut a = [self.a0, self.a1 * Complex64::from_polar(1.0, theta)];
        if z {
            a[1] = -a[1];
        }
        if x {
            a.swap(0, 1);
        }
        LogicalQubit { a0: a[0], a1: a[1] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum WireBasis {
    /// |x⟩ = (|−1⟩ − |1⟩)/√2, |y⟩ = (|−1⟩ + |1⟩)/√2, |z⟩ = |0⟩.
    Xyz,
    /// {(1 ± e^{−iα})/2 |x⟩ + (1 ∓ e^{−iα})/2 |y⟩, |z⟩}.
    B(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WireLabel {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireOutcome {
    pub label: WireLabel,
    pub probability: f64,
    pub state: LogicalQubit,
    /// The output is X^x Z^z R^z(rotation) applied to the input, up to phase.
    pub x: bool,
    pub z: bool,
    pub rotation: f64,
}

type Spin1 = [Complex64; 3];

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// Components on (|+1⟩, |0⟩, |−1⟩).
const KET_X: Spin1 = [c(-FRAC_1_SQRT_2, 0.0), c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0)];
const KET_Y: Spin1 = [c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0)];
const KET_Z: Spin1 = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];

fn project(q: &LogicalQubit, beta: &Spin1) -> [Complex64; 2] {
    let r = (2.0f64 / 3.0).sqrt();
    let (a0, a1) = (q.a0, q.a1);
    // Rows of the decoupled state, per spin level: (G₀ part, G₁ part).
    let rows = [
        [c(0.0, 0.0), -a0 * r],
        [a0 * FRAC_1_SQRT_2 * r, -a1 * FRAC_1_SQRT_2 * r],
        [a1 * r, c(0.0, 0.0)],
    ];
    let mut out = [c(0.0, 0.0); 2];
    for (b, row) in beta.iter().zip(&rows) {
        out[0] += b.conj() * row[0];
        out[1] += b.conj() * row[1];
    }
    out
}

/// Measures the decoupled spin. B(α) realizes R^z(−α) on x-type outcomes;
/// a z outcome applies only Z, so the rotation has to be retried downstream.
pub fn wire_step(q: &LogicalQubit, basis: WireBasis) -> Result<Vec<WireOutcome>> {
    LogicalQubit::new(q.a0, q.a1)?;
    let kets: Vec<(WireLabel, Spin1, bool, bool, f64)> = match basis {
        WireBasis::Xyz => vec![
            (WireLabel::X, KET_X, true, false, 0.0),
            (WireLabel::Y, KET_Y, true, true, 0.0),
            (WireLabel::Z, KET_Z, false, true, 0.0),
        ],
        WireBasis::B(alpha) => {
            let e = Complex64::from_polar(1.0, -alpha);
            let (p, m) = ((1.0 + e) / 2.0, (1.0 - e) / 2.0);
            let mix = |a: Complex64, b: Complex64| -> Spin1 { [a * KET_X[0] + b * KET_Y[0], c(0.0, 0.0), a * KET_X[2] + b * KET_Y[2]] };
            vec![
                (WireLabel::Plus, mix(p, m), true, false, -alpha),
                (WireLabel::Minus, mix(m, p), true, true, -alpha),
                (WireLabel::Z, KET_Z, false, true, 0.0),
            ]
        }
    };
    kets.into_iter()
        .map(|(label, ket, x, z, rotation)| {
            let [b0, b1] = project(q, &ket);
            let probability = b0.norm_sqr() + b1.norm_sqr();
            Ok(WireOutcome { label, probability, state: LogicalQubit::normalized(b0, b1)?, x, z, rotation })
        })
        .collect()
}

/// The basis that realizes R^z(γ) when the logical qubit currently carries an
/// X byproduct iff `x_frame`.
pub fn rotation_basis(gamma: f64, x_frame: bool) -> WireBasis {
    WireBasis::B(if x_frame { gamma } else { -gamma })
}

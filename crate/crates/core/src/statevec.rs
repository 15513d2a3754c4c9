//! Dense state vectors. Qubit 0 is the least significant bit of the basis index
//! and |0⟩ is the +1 eigenstate of Z.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{unitarity_deviation, Mat2};
use crate::stabilizer::Graph;

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 24;
/// Branches below this probability are treated as forbidden.
pub const PROB_EPS: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;

/// Equatorial measurement direction cos φ X + sin φ Y with φ in (−π/2, π/2].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquatorialBasis {
    angle: f64,
}

impl EquatorialBasis {
    /// Canonicalizes `phi`. The flag is true when the ± labels swapped, i.e.
    /// outcome s at `phi` corresponds to outcome 1−s at the returned angle.
    pub fn new(phi: f64) -> (Self, bool) {
        let mut a = phi.rem_euclid(2.0 * PI);
        if a > PI {
            a -= 2.0 * PI;
        }
        let mut flipped = false;
        if a > FRAC_PI_2 {
            a -= PI;
            flipped = true;
        } else if a <= -FRAC_PI_2 {
            a += PI;
            flipped = true;
        }
        (EquatorialBasis { angle: a }, flipped)
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Basis {
    Z,
    Equatorial(EquatorialBasis),
}

impl Basis {
    pub fn x() -> Basis {
        Basis::Equatorial(EquatorialBasis { angle: 0.0 })
    }

    pub fn y() -> Basis {
        Basis::Equatorial(EquatorialBasis { angle: FRAC_PI_2 })
    }
}

#[derive(Clone, Debug)]
pub struct MeasureResult {
    pub outcome: u8,
    pub probability: f64,
    pub post_state: StateVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount { got: n, cap: MAX_QUBITS });
    }
    Ok(())
}

impl StateVector {
    /// |+⟩^⊗n
    pub fn plus(n: usize) -> Result<Self> {
        check_count(n)?;
        let a = (0.5f64).powf(n as f64 / 2.0);
        Ok(StateVector {
            n,
            amps: vec![Complex64::new(a, 0.0); 1 << n],
        })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_count(n)?;
        if index >> n != 0 {
            return Err(Error::Invalid(format!("basis index {index} needs more than {n} qubits")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Normalizes the given amplitudes; length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Invalid(format!("amplitude count {len} is not 2^n with n ≥ 1")));
        }
        let n = len.trailing_zeros() as usize;
        check_count(n)?;
        let mut s = StateVector { n, amps };
        s.normalize()?;
        Ok(s)
    }

    /// Product state; `factors[k]` is the (unnormalized) state of qubit k.
    pub fn product(factors: &[[Complex64; 2]]) -> Result<Self> {
        check_count(factors.len())?;
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for f in factors {
            let norm = (f[0].norm_sqr() + f[1].norm_sqr()).sqrt();
            if norm < PROB_EPS {
                return Err(Error::ZeroNorm);
            }
            let mut next = Vec::with_capacity(amps.len() * 2);
            next.extend(amps.iter().map(|a| a * f[0] / norm));
            next.extend(amps.iter().map(|a| a * f[1] / norm));
            amps = next;
        }
        Ok(StateVector { n: factors.len(), amps })
    }

    /// Haar-random state from complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_count(n)?;
        let amps = (0..1usize << n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        StateVector::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub(crate) fn normalize(&mut self) -> Result<f64> {
        let p = self.norm_sqr();
        if p < PROB_EPS * PROB_EPS {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / p.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= s);
        Ok(p)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitIndex { index: q, n: self.n });
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::RepeatedQubit(a));
        }
        Ok(())
    }

    /// Negates every amplitude whose index has bits i and j set.
    pub fn apply_cphase(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        let mask = (1 << i) | (1 << j);
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if idx & mask == mask {
                *a = -*a;
            }
        }
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_pair(control, target)?;
        let (c, t) = (1 << control, 1 << target);
        for idx in 0..self.amps.len() {
            if idx & c != 0 && idx & t == 0 {
                self.amps.swap(idx, idx | t);
            }
        }
        Ok(())
    }

    pub fn apply_1q(&mut self, q: usize, u: &Mat2) -> Result<()> {
        self.check_qubit(q)?;
        let dev = unitarity_deviation(u);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        self.apply_1q_unchecked(q, u);
        Ok(())
    }

    pub(crate) fn apply_1q_unchecked(&mut self, q: usize, u: &Mat2) {
        let stride = 1 << q;
        for block in (0..self.amps.len()).step_by(2 * stride) {
            for i0 in block..block + stride {
                let i1 = i0 + stride;
                let (a0, a1) = (self.amps[i0], self.amps[i1]);
                self.amps[i0] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[i1] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }

    /// Applies a row-major 2^k × 2^k matrix to `qubits`; local bit i is `qubits[i]`.
    /// No unitarity check.
    pub(crate) fn apply_matrix(&mut self, qubits: &[usize], m: &[Complex64]) -> Result<()> {
        let k = qubits.len();
        let dim = 1usize << k;
        if m.len() != dim * dim {
            return Err(Error::Dimension { expected: dim * dim, got: m.len() });
        }
        let mut mask = 0usize;
        for &q in qubits {
            self.check_qubit(q)?;
            if mask & (1 << q) != 0 {
                return Err(Error::RepeatedQubit(q));
            }
            mask |= 1 << q;
        }
        let offsets: Vec<usize> = (0..dim)
            .map(|l| {
                (0..k)
                    .filter(|&b| l >> b & 1 == 1)
                    .map(|b| 1 << qubits[b])
                    .sum()
            })
            .collect();
        let mut local = vec![Complex64::new(0.0, 0.0); dim];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (l, off) in offsets.iter().enumerate() {
                local[l] = self.amps[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let row = &m[r * dim..(r + 1) * dim];
                self.amps[base | off] = row.iter().zip(&local).map(|(x, y)| x * y).sum();
            }
        }
        Ok(())
    }

    /// Applies a k-qubit unitary given row-major.
    pub fn apply_unitary(&mut self, qubits: &[usize], m: &[Complex64]) -> Result<()> {
        let dim = 1usize << qubits.len();
        let dev = matrix_unitarity_deviation(m, dim);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        self.apply_matrix(qubits, m)
    }

    /// Applies a Kraus operator, renormalizes, and returns the branch probability.
    pub fn apply_kraus(&mut self, qubits: &[usize], m: &[Complex64]) -> Result<f64> {
        let before = self.amps.clone();
        self.apply_matrix(qubits, m)?;
        let p = self.norm_sqr();
        if p < PROB_EPS {
            self.amps = before;
            return Err(Error::ForbiddenBranch(p));
        }
        self.normalize()?;
        Ok(p)
    }

    /// Diagonal evolution e^{-i g t m(x)} where m counts edges with both ends set.
    /// At t = π/g this is the product of cPhase over all edges.
    pub fn evolve_ising(&mut self, graph: &Graph, g: f64, t: f64) -> Result<()> {
        if graph.n_vertices() != self.n {
            return Err(Error::Dimension { expected: self.n, got: graph.n_vertices() });
        }
        let masks: Vec<usize> = graph.edges().map(|(a, b)| (1 << a) | (1 << b)).collect();
        let phase = -g * t;
        for (idx, a) in self.amps.iter_mut().enumerate() {
            let m = masks.iter().filter(|&&mk| idx & mk == mk).count();
            if m > 0 {
                *a *= Complex64::from_polar(1.0, phase * m as f64);
            }
        }
        Ok(())
    }

    /// Unnormalized post-measurement amplitudes for outcome `s` with qubit q removed.
    fn project(&self, q: usize, basis: Basis, s: u8) -> Vec<Complex64> {
        let half = self.amps.len() / 2;
        let low = (1usize << q) - 1;
        let bit = 1usize << q;
        let mut out = Vec::with_capacity(half);
        match basis {
            Basis::Z => {
                let set = if s == 1 { bit } else { 0 };
                for j in 0..half {
                    out.push(self.amps[((j & !low) << 1) | (j & low) | set]);
                }
            }
            Basis::Equatorial(b) => {
                let sign = if s == 1 { -1.0 } else { 1.0 };
                let w = Complex64::from_polar(sign * FRAC_1_SQRT_2, -b.angle);
                for j in 0..half {
                    let i0 = ((j & !low) << 1) | (j & low);
                    out.push(self.amps[i0] * FRAC_1_SQRT_2 + self.amps[i0 | bit] * w);
                }
            }
        }
        out
    }

    pub fn outcome_probability(&self, q: usize, basis: Basis, s: u8) -> Result<f64> {
        self.check_qubit(q)?;
        Ok(self.project(q, basis, s & 1).iter().map(|a| a.norm_sqr()).sum())
    }

    /// Forced-branch measurement; the measured qubit is removed from the register.
    pub fn measure(&self, q: usize, basis: Basis, s: u8) -> Result<MeasureResult> {
        self.check_qubit(q)?;
        let s = s & 1;
        let amps = self.project(q, basis, s);
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if p < PROB_EPS {
            return Err(Error::ForbiddenBranch(p));
        }
        let scale = 1.0 / p.sqrt();
        let post_state = StateVector {
            n: self.n - 1,
            amps: amps.into_iter().map(|a| a * scale).collect(),
        };
        Ok(MeasureResult { outcome: s, probability: p, post_state })
    }

    /// Born-rule sampled measurement.
    pub fn measure_random<R: Rng + ?Sized>(&self, q: usize, basis: Basis, rng: &mut R) -> Result<MeasureResult> {
        let p0 = self.outcome_probability(q, basis, 0)?;
        let u: f64 = rng.random();
        let mut s = u8::from(u >= p0);
        if (s == 0 && p0 < PROB_EPS) || (s == 1 && 1.0 - p0 < PROB_EPS) {
            s ^= 1;
        }
        self.measure(q, basis, s)
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::Dimension { expected: self.n, got: other.n });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// |⟨a|b⟩|²
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// True iff |⟨a|b⟩| ≥ 1 − tol.
    pub fn equal_up_to_global_phase(&self, other: &StateVector, tol: f64) -> Result<bool> {
        Ok(self.inner(other)?.norm() >= 1.0 - tol)
    }

    /// `self` occupies the low qubits, `other` the high ones.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.n + other.n;
        if n > MAX_QUBITS {
            return Err(Error::QubitCount { got: n, cap: MAX_QUBITS });
        }
        let mut amps = Vec::with_capacity(1 << n);
        for b in &other.amps {
            amps.extend(self.amps.iter().map(|a| a * b));
        }
        Ok(StateVector { n, amps })
    }

    /// Appends a fresh |+⟩ as the new highest qubit.
    pub fn push_plus(&mut self) -> Result<()> {
        if self.n + 1 > MAX_QUBITS {
            return Err(Error::QubitCount { got: self.n + 1, cap: MAX_QUBITS });
        }
        let h = FRAC_1_SQRT_2;
        let mut amps = Vec::with_capacity(self.amps.len() * 2);
        amps.extend(self.amps.iter().map(|a| a * h));
        amps.extend(self.amps.iter().map(|a| a * h));
        self.amps = amps;
        self.n += 1;
        Ok(())
    }

    /// Reorders qubits: new qubit k is old qubit `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<StateVector> {
        if order.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: order.len() });
        }
        let mut seen = 0usize;
        for &o in order {
            self.check_qubit(o)?;
            if seen & (1 << o) != 0 {
                return Err(Error::RepeatedQubit(o));
            }
            seen |= 1 << o;
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (new_idx, slot) in amps.iter_mut().enumerate() {
            let mut old = 0;
            for (k, &o) in order.iter().enumerate() {
                old |= (new_idx >> k & 1) << o;
            }
            *slot = self.amps[old];
        }
        Ok(StateVector { n: self.n, amps })
    }

    /// CSV dump with header `index,real,imag`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,real,imag\n");
        for (i, a) in self.amps.iter().enumerate() {
            let _ = writeln!(out, "{i},{:e},{:e}", a.re, a.im);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<StateVector> {
        let mut amps = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || lineno == 0 && line.starts_with("index") {
                continue;
            }
            let err = |msg: &str| Error::Parse { line: lineno + 1, msg: msg.to_string() };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(err("expected index,real,imag"));
            }
            let idx: usize = fields[0].parse().map_err(|_| err("bad index"))?;
            if idx != amps.len() {
                return Err(err("indices must be consecutive from 0"));
            }
            let re: f64 = fields[1].parse().map_err(|_| err("bad real part"))?;
            let im: f64 = fields[2].parse().map_err(|_| err("bad imaginary part"))?;
            amps.push(Complex64::new(re, im));
        }
        StateVector::from_amplitudes(amps)
    }
}

pub(crate) fn matrix_unitarity_deviation(m: &[Complex64], dim: usize) -> f64 {
    if m.len() != dim * dim {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for r in 0..dim {
        for c in 0..dim {
            let dot: Complex64 = (0..dim).map(|k| m[k * dim + r].conj() * m[k * dim + c]).sum();
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{hadamard, pauli_z};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &StateVector, b: &StateVector) -> bool {
        a.equal_up_to_global_phase(b, 1e-12).unwrap()
    }

    #[test]
    fn plus_state_amplitudes() {
        let s = StateVector::plus(2).unwrap();
        assert!(s.amplitudes().iter().all(|a| (a - c(0.5, 0.0)).norm() < 1e-15));
        assert!(StateVector::plus(0).is_err());
        assert!(StateVector::plus(MAX_QUBITS + 1).is_err());
    }

    #[test]
    fn cphase_on_plus_plus() {
        let mut s = StateVector::plus(2).unwrap();
        s.apply_cphase(0, 1).unwrap();
        // (|0+⟩ + |1−⟩)/√2 with qubit 0 the control.
        let want = StateVector::from_amplitudes(vec![c(1., 0.), c(1., 0.), c(1., 0.), c(-1., 0.)]).unwrap();
        assert!(close(&s, &want));
        assert_eq!(s.apply_cphase(1, 1), Err(Error::RepeatedQubit(1)));
    }

    #[test]
    fn three_qubit_chain() {
        let mut s = StateVector::plus(3).unwrap();
        s.apply_cphase(1, 0).unwrap();
        s.apply_cphase(1, 2).unwrap();
        // (|+0+⟩ + |−1−⟩)/√2
        let h = FRAC_1_SQRT_2;
        let plus = [c(h, 0.), c(h, 0.)];
        let minus = [c(h, 0.), c(-h, 0.)];
        let zero = [c(1., 0.), c(0., 0.)];
        let one = [c(0., 0.), c(1., 0.)];
        let a = StateVector::product(&[plus, zero, plus]).unwrap();
        let b = StateVector::product(&[minus, one, minus]).unwrap();
        let sum: Vec<Complex64> = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x + y).collect();
        assert!(close(&s, &StateVector::from_amplitudes(sum).unwrap()));
    }

    #[test]
    fn hadamard_and_z() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_1q(0, &hadamard()).unwrap();
        assert!(close(&s, &StateVector::plus(1).unwrap()));
        s.apply_1q(0, &pauli_z()).unwrap();
        assert!((s.amplitudes()[1] + c(FRAC_1_SQRT_2, 0.)).norm() < 1e-15);
        let bad = [[c(1., 0.), c(1., 0.)], [c(0., 0.), c(1., 0.)]];
        assert!(matches!(s.apply_1q(0, &bad), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn measuring_plus_in_x() {
        let s = StateVector::plus(1).unwrap();
        let r = s.measure(0, Basis::x(), 0).unwrap();
        assert!((r.probability - 1.0).abs() < 1e-12);
        assert!(matches!(s.measure(0, Basis::x(), 1), Err(Error::ForbiddenBranch(_))));
    }

    #[test]
    fn canonical_angles() {
        let (b, f) = EquatorialBasis::new(PI);
        assert!(b.angle().abs() < 1e-15 && f);
        let (b, f) = EquatorialBasis::new(-FRAC_PI_2);
        assert!((b.angle() - FRAC_PI_2).abs() < 1e-15 && f);
        let (b, f) = EquatorialBasis::new(FRAC_PI_2);
        assert!((b.angle() - FRAC_PI_2).abs() < 1e-15 && !f);
    }

    #[test]
    fn flipped_basis_swaps_labels() {
        let s = StateVector::from_amplitudes(vec![c(0.3, 0.1), c(-0.2, 0.9)]).unwrap();
        let phi = 2.4;
        let (b, flipped) = EquatorialBasis::new(phi);
        assert!(flipped);
        let raw = EquatorialBasis { angle: phi };
        let p_raw = s.outcome_probability(0, Basis::Equatorial(raw), 0).unwrap();
        let p_can = s.outcome_probability(0, Basis::Equatorial(b), 1).unwrap();
        assert!((p_raw - p_can).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip() {
        let s = StateVector::from_amplitudes(vec![c(0.3, 0.1), c(-0.2, 0.9)]).unwrap();
        let back = StateVector::from_csv(&s.to_csv()).unwrap();
        assert!(close(&s, &back));
        assert!(matches!(StateVector::from_csv("index,real,imag\n0,1\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn permute_moves_bits() {
        let s = StateVector::basis(3, 0b001).unwrap();
        let p = s.permute(&[1, 0, 2]).unwrap();
        assert!((p.amplitudes()[0b010].norm() - 1.0).abs() < 1e-15);
    }
}

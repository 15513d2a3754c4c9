//! Geometric entanglement: overlap with the closest product state.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{dagger, random_unitary, unitarity_deviation, Mat2};
use crate::statevec::StateVector;

pub const MAX_GE_QUBITS: usize = 12;
const MAX_SWEEPS: usize = 10_000;
const GAIN_TOL: f64 = 1e-12;
/// Angular spacing of the n = 3 oracle grid.
pub const GRID_STEP: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    BruteForce,
    UpperBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GEResult {
    /// Best overlap |⟨φ|ψ⟩| found.
    pub lambda_max: f64,
    /// −log₂ λ², an upper bound on the true value unless `provenance` says otherwise.
    pub e_g: f64,
    pub restart_overlaps: Vec<f64>,
    pub iterations: Vec<usize>,
    pub closest_product: Vec<[Complex64; 2]>,
    pub provenance: Provenance,
    /// Bounds on E_G from the grid oracle (n = 3 only).
    pub bracket: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridOracle {
    /// Best overlap on the grid; a lower bound on Λ_max.
    pub lambda_lower: f64,
    /// Grid value plus the Lipschitz slack of the grid spacing.
    pub lambda_upper: f64,
    pub argmax: Vec<[Complex64; 2]>,
}

impl GridOracle {
    pub fn e_g(&self) -> f64 {
        e_g_of(self.lambda_lower)
    }
}

fn e_g_of(lambda: f64) -> f64 {
    (-2.0 * lambda.min(1.0).log2()).max(0.0)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Top singular value and vectors of a 2×2 matrix m[i][j] (rows i).
fn top_singular(m: [[Complex64; 2]; 2]) -> (f64, [Complex64; 2], [Complex64; 2]) {
    // Eigenvector of M†M with the larger eigenvalue gives the right vector.
    let g00 = m[0][0].norm_sqr() + m[1][0].norm_sqr();
    let g11 = m[0][1].norm_sqr() + m[1][1].norm_sqr();
    let g01 = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
    let tr = g00 + g11;
    let disc = ((g00 - g11).powi(2) / 4.0 + g01.norm_sqr()).sqrt();
    let top = tr / 2.0 + disc;
    let mut v = if g01.norm() > 1e-15 {
        [g01, c(top - g00, 0.0)]
    } else if g00 >= g11 {
        [c(1.0, 0.0), c(0.0, 0.0)]
    } else {
        [c(0.0, 0.0), c(1.0, 0.0)]
    };
    let nv = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    v = [v[0] / nv, v[1] / nv];
    let mut u = [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
    let nu = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt();
    if nu > 0.0 {
        u = [u[0] / nu, u[1] / nu];
    } else {
        u = [c(1.0, 0.0), c(0.0, 0.0)];
    }
    (top.max(0.0).sqrt(), u, v)
}

/// Exact for n ≤ 2; a spherical grid over qubit 0 for n = 3, with the other
/// two qubits optimized exactly by an SVD.
pub fn grid_oracle(state: &StateVector) -> Result<GridOracle> {
    let a = state.amplitudes();
    match state.n_qubits() {
        1 => {
            let norm = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
            Ok(GridOracle { lambda_lower: norm, lambda_upper: norm, argmax: vec![[a[0] / norm, a[1] / norm]] })
        }
        2 => {
            // Rows are qubit 0, columns qubit 1; ⟨u⊗v|ψ⟩ is maximized by conjugated singular vectors.
            let (s, u, v) = top_singular([[a[0], a[2]], [a[1], a[3]]]);
            Ok(GridOracle { lambda_lower: s, lambda_upper: s, argmax: vec![u, [v[0].conj(), v[1].conj()]] })
        }
        3 => {
            let nt = (std::f64::consts::PI / GRID_STEP).ceil() as usize;
            let np = (2.0 * std::f64::consts::PI / GRID_STEP).ceil() as usize;
            let best = (0..=nt)
                .into_par_iter()
                .map(|i| {
                    let th = (i as f64 * GRID_STEP).min(std::f64::consts::PI);
                    let (st, ct) = (th / 2.0).sin_cos();
                    let mut local = (f64::MIN, [c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0); 2], [c(0.0, 0.0); 2]);
                    for j in 0..np {
                        let f = [c(ct, 0.0), Complex64::from_polar(st, j as f64 * GRID_STEP)];
                        // m[i1][i2] = Σ_b conj(f_b) ψ[b + 2 i1 + 4 i2]
                        let mut m = [[c(0.0, 0.0); 2]; 2];
                        for (i1, row) in m.iter_mut().enumerate() {
                            for (i2, e) in row.iter_mut().enumerate() {
                                let base = 2 * i1 + 4 * i2;
                                *e = f[0].conj() * a[base] + f[1].conj() * a[base + 1];
                            }
                        }
                        let (s, u, v) = top_singular(m);
                        if s > local.0 {
                            local = (s, f, u, v);
                        }
                        if st == 0.0 {
                            break;
                        }
                    }
                    local
                })
                .reduce(
                    || (f64::MIN, [c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0); 2], [c(0.0, 0.0); 2]),
                    |x, y| if y.0 > x.0 { y } else { x },
                );
            let (s, f, u, v) = best;
            // Nearest grid point is within 0.8·step in state distance, and the
            // optimal overlap is 1-Lipschitz in the qubit-0 factor.
            Ok(GridOracle {
                lambda_lower: s,
                lambda_upper: (s + 0.8 * GRID_STEP).min(1.0),
                argmax: vec![f, u, [v[0].conj(), v[1].conj()]],
            })
        }
        n => Err(Error::Cap { what: "qubits for the grid oracle", got: n, cap: 3 }),
    }
}

/// Σ over indices with bit k = b of ψ[idx] Π_{j≠k} conj(φ_j[bit j]).
fn partial_overlap(amps: &[Complex64], factors: &[[Complex64; 2]], k: usize) -> [Complex64; 2] {
    let n = factors.len();
    let mut v = [c(0.0, 0.0); 2];
    for (idx, &amp) in amps.iter().enumerate() {
        let mut w = amp;
        for (j, f) in factors.iter().enumerate().take(n) {
            if j != k {
                w *= f[idx >> j & 1].conj();
            }
        }
        v[idx >> k & 1] += w;
    }
    v
}

fn optimize(amps: &[Complex64], mut factors: Vec<[Complex64; 2]>) -> (f64, usize, Vec<[Complex64; 2]>) {
    let n = factors.len();
    let mut prev = 0.0;
    let mut overlap = 0.0;
    for sweep in 1..=MAX_SWEEPS {
        for k in 0..n {
            let v = partial_overlap(amps, &factors, k);
            let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            if norm > 1e-15 {
                factors[k] = [v[0] / norm, v[1] / norm];
            }
            overlap = norm;
        }
        if overlap - prev < GAIN_TOL {
            return (overlap, sweep, factors);
        }
        prev = overlap;
    }
    (overlap, MAX_SWEEPS, factors)
}

fn random_factors(n: usize, seed: u64, restart: usize) -> Vec<[Complex64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    (0..n)
        .map(|_| {
            let u = random_unitary(&mut rng);
            [u[0][0], u[1][0]]
        })
        .collect()
}

/// Alternating single-site optimization from `restarts` random product states.
/// Restart r always uses the same start for a given seed. For n ≤ 3 the grid
/// oracle also seeds one extra start and supplies the provenance.
pub fn geometric_entanglement(state: &StateVector, restarts: usize, seed: u64) -> Result<GEResult> {
    let n = state.n_qubits();
    if n > MAX_GE_QUBITS {
        return Err(Error::Cap { what: "qubits for geometric entanglement", got: n, cap: MAX_GE_QUBITS });
    }
    if restarts == 0 {
        return Err(Error::Invalid("at least one restart is needed".into()));
    }
    let amps = state.amplitudes();
    let runs: Vec<(f64, usize, Vec<[Complex64; 2]>)> = (0..restarts)
        .into_par_iter()
        .map(|r| optimize(amps, random_factors(n, seed, r)))
        .collect();
    let restart_overlaps: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let mut iterations: Vec<usize> = runs.iter().map(|r| r.1).collect();
    let mut best = runs.into_iter().fold(None::<(f64, usize, Vec<[Complex64; 2]>)>, |acc, r| match acc {
        Some(a) if a.0 >= r.0 => Some(a),
        _ => Some(r),
    });
    let (provenance, bracket) = if n <= 3 {
        let oracle = grid_oracle(state)?;
        let polished = optimize(amps, oracle.argmax.clone());
        iterations.push(polished.1);
        if best.as_ref().is_none_or(|b| polished.0 > b.0) {
            best = Some(polished);
        }
        if n <= 2 {
            (Provenance::Exact, None)
        } else {
            (Provenance::BruteForce, Some((e_g_of(oracle.lambda_upper), e_g_of(oracle.lambda_lower))))
        }
    } else {
        (Provenance::UpperBound, None)
    };
    let (lambda, _, closest_product) = best.expect("restarts > 0");
    let lambda_max = lambda.min(1.0);
    Ok(GEResult {
        lambda_max,
        e_g: e_g_of(lambda_max),
        restart_overlaps,
        iterations,
        closest_product,
        provenance,
        bracket,
    })
}

/// Largest single-outcome probability when qubit k is measured in the basis
/// given by the columns of `bases[k]`.
pub fn max_outcome_probability(state: &StateVector, bases: &[Mat2]) -> Result<f64> {
    if bases.len() != state.n_qubits() {
        return Err(Error::Dimension { expected: state.n_qubits(), got: bases.len() });
    }
    let mut s = state.clone();
    for (q, u) in bases.iter().enumerate() {
        let dev = unitarity_deviation(u);
        if dev > 1e-10 {
            return Err(Error::NotUnitary(dev));
        }
        s.apply_1q(q, &dagger(u))?;
    }
    Ok(s.amplitudes().iter().map(|a| a.norm_sqr()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{hadamard, identity};

    fn ghz3() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut a = vec![c(0.0, 0.0); 8];
        a[0] = c(h, 0.0);
        a[7] = c(h, 0.0);
        StateVector::from_amplitudes(a).unwrap()
    }

    #[test]
    fn ghz_has_one_bit() {
        let ge = geometric_entanglement(&ghz3(), 4, 1).unwrap();
        let oracle = grid_oracle(&ghz3()).unwrap();
        assert!((ge.e_g - 1.0).abs() < 1e-9);
        assert!((ge.e_g - oracle.e_g()).abs() < 1e-6);
        let (lo, hi) = ge.bracket.unwrap();
        assert!(lo <= ge.e_g && ge.e_g <= hi + 1e-12);
        assert_eq!(ge.provenance, Provenance::BruteForce);
    }

    #[test]
    fn product_state_is_unentangled() {
        let s = StateVector::plus(5).unwrap();
        let ge = geometric_entanglement(&s, 3, 2).unwrap();
        assert!(ge.e_g.abs() < 1e-9);
        assert_eq!(ge.provenance, Provenance::UpperBound);
    }

    #[test]
    fn outcome_probabilities() {
        assert!((max_outcome_probability(&StateVector::zero(3).unwrap(), &[identity(); 3]).unwrap() - 1.0).abs() < 1e-12);
        assert!((max_outcome_probability(&ghz3(), &[identity(); 3]).unwrap() - 0.5).abs() < 1e-12);
        assert!((max_outcome_probability(&ghz3(), &[hadamard(); 3]).unwrap() - 0.25).abs() < 1e-12);
        let bad = [[c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(max_outcome_probability(&ghz3(), &[bad, identity(), identity()]).is_err());
    }
}

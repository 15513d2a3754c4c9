//! Valence-bond resource states built from virtual spin-1/2 singlets, the
//! spin-3/2 POVM that turns them into graph states, and the spin-1 wire.
//!
//! Each site is stored on two qubits (2s, 2s+1) holding the physical level
//! w = number of virtual 1s, so m = S − w. Ancillas for an open boundary
//! follow the site qubits, one per dangling leg.

mod reduce;
mod wire;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stabilizer::Graph;
use crate::statevec::{StateVector, MAX_QUBITS};

pub use reduce::{
    brick_wall, check_reduction_consistency, check_sampled, percolation_mc, reduce_to_graph, spans, AxisModel,
    ConsistencyReport, PercolationResult, Reduction,
};
pub use wire::{rotation_basis, wire_step, LogicalQubit, WireBasis, WireLabel, WireOutcome};

/// Cap on the total number of virtual spin-1/2s.
pub const MAX_VIRTUAL: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpinKind {
    /// Two virtual qubits per site.
    Spin1,
    /// Three virtual qubits per site.
    Spin3Half,
}

impl SpinKind {
    pub fn virtual_count(self) -> usize {
        match self {
            SpinKind::Spin1 => 2,
            SpinKind::Spin3Half => 3,
        }
    }

    pub fn dimension(self) -> usize {
        self.virtual_count() + 1
    }
}

/// What happens to virtual legs that have no partner.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Dangling legs fixed to |0⟩.
    #[default]
    Zero,
    /// Each dangling leg forms a singlet with its own ancilla qubit.
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Axis> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            _ => Err(Error::Invalid(format!("unknown axis {s:?}"))),
        }
    }
}

/// One axis label per site.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PovmOutcome(pub Vec<Axis>);

impl PovmOutcome {
    pub fn axes(&self) -> &[Axis] {
        &self.0
    }
}

impl fmt::Display for PovmOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|a| write!(f, "{a}"))
    }
}

impl FromStr for PovmOutcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<PovmOutcome> {
        s.chars().map(|c| c.to_string().parse()).collect::<Result<_>>().map(PovmOutcome)
    }
}

/// Spin matrices (S_x, S_y, S_z) for spin `two_s`/2, basis index w ↔ m = s − w.
pub fn spin_matrices(two_s: usize) -> [DMatrix<Complex64>; 3] {
    let d = two_s + 1;
    let s = two_s as f64 / 2.0;
    let mut sp = DMatrix::<Complex64>::zeros(d, d);
    for w in 1..d {
        let m = s - w as f64;
        sp[(w - 1, w)] = Complex64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let sm = sp.adjoint();
    let sx = (&sp + &sm) * Complex64::new(0.5, 0.0);
    let sy = (&sp - &sm) * Complex64::new(0.0, -0.5);
    let sz = DMatrix::from_fn(d, d, |r, c| if r == c { Complex64::new(s - r as f64, 0.0) } else { Complex64::new(0.0, 0.0) });
    [sx, sy, sz]
}

/// F_a = (S_a² − 1/4)/√6 on the spin-3/2 space.
pub fn povm_element(axis: Axis) -> DMatrix<Complex64> {
    let s = &spin_matrices(3)[axis.index()];
    (s * s - DMatrix::identity(4, 4) * Complex64::new(0.25, 0.0)) / Complex64::new(6f64.sqrt(), 0.0)
}

/// √(2/3) times the projector onto the m = ±3/2 eigenvectors of S_a.
pub fn povm_element_projector(axis: Axis) -> DMatrix<Complex64> {
    let s = spin_matrices(3)[axis.index()].clone();
    let eig = s.symmetric_eigen();
    let mut out = DMatrix::<Complex64>::zeros(4, 4);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l.abs() > 1.0 {
            let v = eig.eigenvectors.column(i);
            out += &v * v.adjoint();
        }
    }
    out * Complex64::new((2.0f64 / 3.0).sqrt(), 0.0)
}

/// Row-major entries of a site operator padded to the 4-level register.
fn site_matrix(op: &DMatrix<Complex64>, pad_identity: bool) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); 16];
    for r in 0..4 {
        for c in 0..4 {
            out[r * 4 + c] = if r < op.nrows() && c < op.ncols() {
                op[(r, c)]
            } else if pad_identity && r == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct AkltState {
    state: StateVector,
    lattice: Graph,
    kind: SpinKind,
    boundary: Boundary,
    /// Host site of each dangling leg, in ancilla order.
    dangling: Vec<usize>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Singlets on every lattice edge, boundary legs per `boundary`, then the
/// symmetric projection at every site.
pub fn build_aklt(lattice: &Graph, kind: SpinKind, boundary: Boundary) -> Result<AkltState> {
    let n = lattice.n_vertices();
    let k = kind.virtual_count();
    if n == 0 {
        return Err(Error::Invalid("lattice has no sites".into()));
    }
    if n * k > MAX_VIRTUAL {
        return Err(Error::Cap { what: "virtual qubits", got: n * k, cap: MAX_VIRTUAL });
    }
    if let Some(s) = (0..n).find(|&s| lattice.degree(s) > k) {
        return Err(Error::Invalid(format!("site {s} has degree {} but only {k} virtual legs", lattice.degree(s))));
    }
    let edges: Vec<(usize, usize)> = lattice.edges().collect();
    let dangling: Vec<usize> = (0..n).flat_map(|s| std::iter::repeat_n(s, k - lattice.degree(s))).collect();
    let n_anc = if boundary == Boundary::Open { dangling.len() } else { 0 };
    let nq = 2 * n + n_anc;
    if nq > MAX_QUBITS {
        return Err(Error::QubitCount { got: nq, cap: MAX_QUBITS });
    }
    let weight: Vec<f64> = (0..=k).map(|w| 1.0 / binomial(k, w).sqrt()).collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << nq];
    let mut w = vec![0usize; n];
    for eb in 0..1usize << edges.len() {
        for db in 0..1usize << n_anc {
            w.iter_mut().for_each(|x| *x = 0);
            let mut amp = 1.0;
            // Singlet (|01⟩ − |10⟩)/√2 with bit b on the first endpoint.
            for (i, &(u, v)) in edges.iter().enumerate() {
                let b = eb >> i & 1;
                w[u] += b;
                w[v] += 1 - b;
                amp *= if b == 0 { h } else { -h };
            }
            let mut index = 0usize;
            for (i, &s) in dangling.iter().enumerate().take(n_anc) {
                let b = db >> i & 1;
                w[s] += b;
                amp *= if b == 0 { h } else { -h };
                index |= (1 - b) << (2 * n + i);
            }
            for (s, &ws) in w.iter().enumerate() {
                amp *= weight[ws];
                index |= ws << (2 * s);
            }
            amps[index] += Complex64::new(amp, 0.0);
        }
    }
    Ok(AkltState { state: StateVector::from_amplitudes(amps)?, lattice: lattice.clone(), kind, boundary, dangling })
}

impl AkltState {
    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn lattice(&self) -> &Graph {
        &self.lattice
    }

    pub fn kind(&self) -> SpinKind {
        self.kind
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn n_sites(&self) -> usize {
        self.lattice.n_vertices()
    }

    pub fn dangling(&self) -> &[usize] {
        &self.dangling
    }

    pub fn site_qubits(&self, s: usize) -> [usize; 2] {
        [2 * s, 2 * s + 1]
    }

    /// Register qubits of site `s` together with its ancillas.
    pub fn party_qubits(&self, s: usize) -> Vec<usize> {
        let mut q = self.site_qubits(s).to_vec();
        if self.boundary == Boundary::Open {
            let base = 2 * self.n_sites();
            q.extend(self.dangling.iter().enumerate().filter(|(_, &h)| h == s).map(|(i, _)| base + i));
        }
        q
    }

    /// Amplitude of the physical levels `levels` (ancillas in state `ancilla`).
    pub fn amplitude(&self, levels: &[usize], ancilla: usize) -> Complex64 {
        let mut index = ancilla << (2 * self.n_sites());
        for (s, &w) in levels.iter().enumerate() {
            index |= w << (2 * s);
        }
        self.state.amplitudes()[index]
    }

    /// exp(−iθ S_a) on every site and exp(−iθ σ_a/2) on every ancilla.
    pub fn rotate_all(&self, axis: Axis, theta: f64) -> Result<StateVector> {
        let mi = Complex64::new(0.0, -theta);
        let site = (&spin_matrices(self.kind.virtual_count())[axis.index()] * mi).exp();
        let site = site_matrix(&site, true);
        let half = (&spin_matrices(1)[axis.index()] * mi).exp();
        let half: Vec<Complex64> = (0..4).map(|i| half[(i / 2, i % 2)]).collect();
        let mut s = self.state.clone();
        for v in 0..self.n_sites() {
            s.apply_unitary(&self.site_qubits(v), &site)?;
        }
        if self.boundary == Boundary::Open {
            for i in 0..self.dangling.len() {
                s.apply_unitary(&[2 * self.n_sites() + i], &half)?;
            }
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PovmMode {
    Sample(u64),
    Forced(PovmOutcome),
}

#[derive(Clone, Debug)]
pub struct PovmResult {
    pub outcome: PovmOutcome,
    /// Joint probability of the recorded outcome.
    pub probability: f64,
    pub state: StateVector,
}

fn require_spin3half(aklt: &AkltState) -> Result<()> {
    if aklt.kind != SpinKind::Spin3Half {
        return Err(Error::Invalid("the POVM acts on spin-3/2 sites".into()));
    }
    Ok(())
}

/// Applies {F_x, F_y, F_z} site by site, with Born-rule sampling or forced labels.
pub fn sample_povm(aklt: &AkltState, mode: &PovmMode) -> Result<PovmResult> {
    require_spin3half(aklt)?;
    let n = aklt.n_sites();
    let f: Vec<Vec<Complex64>> = Axis::ALL.iter().map(|&a| site_matrix(&povm_element(a), false)).collect();
    let mut state = aklt.state.clone();
    let mut probability = 1.0;
    let mut axes = Vec::with_capacity(n);
    match mode {
        PovmMode::Forced(o) => {
            if o.0.len() != n {
                return Err(Error::Dimension { expected: n, got: o.0.len() });
            }
            for (s, &a) in o.0.iter().enumerate() {
                probability *= state.apply_kraus(&aklt.site_qubits(s), &f[a.index()])?;
                axes.push(a);
            }
        }
        PovmMode::Sample(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for s in 0..n {
                let q = aklt.site_qubits(s);
                let branches: Vec<(f64, StateVector)> = f
                    .iter()
                    .map(|m| {
                        let mut b = state.clone();
                        b.apply_matrix(&q, m)?;
                        Ok((b.norm_sqr(), b))
                    })
                    .collect::<Result<_>>()?;
                let u: f64 = rng.random::<f64>() * branches.iter().map(|b| b.0).sum::<f64>();
                let mut acc = 0.0;
                let mut pick = 2;
                for (i, b) in branches.iter().enumerate() {
                    acc += b.0;
                    if u < acc && b.0 > 0.0 {
                        pick = i;
                        break;
                    }
                }
                let (p, mut b) = branches.into_iter().nth(pick).expect("three branches");
                b.normalize()?;
                probability *= p;
                state = b;
                axes.push(Axis::ALL[pick]);
            }
        }
    }
    Ok(PovmResult { outcome: PovmOutcome(axes), probability, state })
}

/// Probability that sites u and v return the same axis.
pub fn same_axis_probability(aklt: &AkltState, u: usize, v: usize) -> Result<f64> {
    require_spin3half(aklt)?;
    let n = aklt.n_sites();
    if u >= n || v >= n || u == v {
        return Err(Error::Invalid(format!("sites ({u}, {v}) on a {n}-site lattice")));
    }
    let mut total = 0.0;
    for a in Axis::ALL {
        let m = site_matrix(&povm_element(a), false);
        let mut s = aklt.state.clone();
        s.apply_matrix(&aklt.site_qubits(u), &m)?;
        s.apply_matrix(&aklt.site_qubits(v), &m)?;
        total += s.norm_sqr();
    }
    Ok(total)
}

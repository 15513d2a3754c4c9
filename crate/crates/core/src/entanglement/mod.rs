//! Entanglement measures for small pure states. Entropies are in bits.

mod geometric;
mod width;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::StateVector;

pub use geometric::{geometric_entanglement, grid_oracle, max_outcome_probability, GEResult, GridOracle, Provenance};
pub use width::{enumerate_binary_trees, entanglement_width, tree_width, SubcubicTree, WidthResult, MAX_WIDTH_QUBITS};

/// Eigenvalues of ρ_A below this are dropped.
pub const EIG_EPS: f64 = 1e-12;

/// Subset A of the qubits; B is the complement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    n: usize,
    subset: Vec<usize>,
}

impl Bipartition {
    pub fn new(n: usize, subset: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut subset: Vec<usize> = subset.into_iter().collect();
        subset.sort_unstable();
        subset.dedup();
        if let Some(&q) = subset.iter().find(|&&q| q >= n) {
            return Err(Error::Cut(format!("qubit {q} outside a {n}-qubit register")));
        }
        if subset.is_empty() || subset.len() == n {
            return Err(Error::Cut("both sides must be non-empty".into()));
        }
        Ok(Bipartition { n, subset })
    }

    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        Bipartition::new(n, (0..n).filter(|q| mask >> q & 1 == 1))
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn mask(&self) -> u64 {
        self.subset.iter().map(|q| 1u64 << q).sum()
    }

    pub fn complement(&self) -> Bipartition {
        let m = self.mask();
        Bipartition { n: self.n, subset: (0..self.n).filter(|q| m >> q & 1 == 0).collect() }
    }
}

/// S(ρ_A) = −Tr ρ_A log₂ ρ_A.
pub fn vn_entropy(state: &StateVector, cut: &Bipartition) -> Result<f64> {
    if cut.n != state.n_qubits() {
        return Err(Error::Dimension { expected: state.n_qubits(), got: cut.n });
    }
    Ok(mask_entropy(state, cut.mask()))
}

/// Entropy of the qubits in `mask`; 0 for the empty or full set.
pub(crate) fn mask_entropy(state: &StateVector, mask: u64) -> f64 {
    let n = state.n_qubits();
    let full = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mask = mask & full;
    if mask == 0 || mask == full {
        return 0.0;
    }
    // The smaller side gives the smaller reduced matrix; both have equal spectra.
    let side = if mask.count_ones() as usize * 2 <= n { mask } else { full & !mask };
    entropy_from_spectrum(&reduced_spectrum(state, side))
}

fn reduced_spectrum(state: &StateVector, side: u64) -> Vec<f64> {
    let n = state.n_qubits();
    let a: Vec<usize> = (0..n).filter(|q| side >> q & 1 == 1).collect();
    let b: Vec<usize> = (0..n).filter(|q| side >> q & 1 == 0).collect();
    let spread = |bits: &[usize], v: usize| -> usize {
        bits.iter().enumerate().map(|(i, &q)| (v >> i & 1) << q).sum()
    };
    let (da, db) = (1usize << a.len(), 1usize << b.len());
    let amps = state.amplitudes();
    let a_off: Vec<usize> = (0..da).map(|v| spread(&a, v)).collect();
    let b_off: Vec<usize> = (0..db).map(|v| spread(&b, v)).collect();
    // nalgebra's complex eigensolver, complex SVD and real symmetric
    // eigensolver all misbehave on some of these sparse, highly degenerate
    // matrices (wrong spectra, NaN, inf), so faer does the decomposition.
    let m = faer::Mat::<faer::c64>::from_fn(da, db, |i, j| {
        let z = amps[a_off[i] | b_off[j]];
        faer::c64::new(z.re, z.im)
    });
    match m.singular_values() {
        Ok(s) => s.into_iter().map(|x| x * x).collect(),
        Err(_) => {
            let rho = if da <= db { &m * m.adjoint() } else { m.adjoint() * &m };
            rho.self_adjoint_eigenvalues(faer::Side::Lower).expect("Hermitian eigendecomposition")
        }
    }
}

pub(crate) fn entropy_from_spectrum(eigs: &[f64]) -> f64 {
    eigs.iter().filter(|&&l| l > EIG_EPS).map(|&l| -l * l.log2()).sum::<f64>().max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::{graph_state, Graph};
    use num_complex::Complex64;

    #[test]
    fn product_state_has_no_entropy() {
        let s = StateVector::plus(4).unwrap();
        let cut = Bipartition::new(4, [0, 2]).unwrap();
        assert!(vn_entropy(&s, &cut).unwrap().abs() < 1e-12);
    }

    #[test]
    fn cluster_odd_even_cut() {
        for n in 2..=8 {
            let s = graph_state(&Graph::path(n)).unwrap();
            let cut = Bipartition::new(n, (0..n).step_by(2)).unwrap();
            assert!((vn_entropy(&s, &cut).unwrap() - (n / 2) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn ghz_single_qubit_cut() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut a = vec![Complex64::new(0.0, 0.0); 8];
        a[0] = Complex64::new(h, 0.0);
        a[7] = Complex64::new(h, 0.0);
        let ghz = StateVector::from_amplitudes(a).unwrap();
        for q in 0..3 {
            let cut = Bipartition::new(3, [q]).unwrap();
            assert!((vn_entropy(&ghz, &cut).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_cuts() {
        assert!(Bipartition::new(3, []).is_err());
        assert!(Bipartition::new(3, [0, 1, 2]).is_err());
        assert!(Bipartition::new(3, [5]).is_err());
    }
}
